"""Exception hierarchy shared by all qhilab modules."""


class QhiError(Exception):
    """Base class for all qhilab errors."""


class CutViolation(QhiError):
    """Argument lies on a branch cut where the function is undefined."""


class DegenerateInput(QhiError):
    """Input sits at a degenerate point (0, 1, coincident roots, ...)."""


class PoleHit(QhiError):
    """Evaluation point is within tolerance of a pole."""


class ZeroProximityWarning(UserWarning):
    """Evaluation point is within tolerance of a zero of the function.

    The returned value is still meaningful (it is close to 0), so this is
    a warning rather than an error.
    """


class ShiftOverflow(QhiError):
    """Analytic continuation would need more functional-equation shifts
    than the configured cap."""


class StripViolation(QhiError):
    """Argument lies outside the strip where the defining integral converges."""


class CurveViolation(QhiError):
    """Point fails the Fermat-curve constraint x^N + y^N = 1."""


class DivisionByZero(QhiError):
    """A product factor 1 - x*zeta^j vanished."""


class WeightViolation(QhiError):
    """Weight datum is off the allowed lattice (2*pi*i*Z or pi*i*Z)."""


class RelationViolation(QhiError):
    """Tetrahedral or edge relation residual exceeds tolerance, signalling
    an inconsistent (point, colors) pair."""


class NoAdmissibleRoot(QhiError):
    """No critical-point candidate falls in the admissible strip."""


class DegenerateSaddle(QhiError):
    """Second derivative vanishes at the critical point."""


class ContourInvalid(QhiError):
    """A contour segment crosses a registered cut, passes too close to a
    registered pole, or violates a scenario sign condition."""


class PoleOnContour(ContourInvalid):
    """The integration contour passes within tolerance of a pole."""


class NonConvergent(QhiError):
    """Adaptive quadrature failed to reach the requested tolerance within
    the panel-doubling cap."""


class IllConditioned(QhiError):
    """Least-squares design matrix condition number exceeds the cap."""
