"""Classical and quantum gluing data of the figure-eight complement.

The complement is triangulated by two ideal tetrahedra with shape triples
u = (u0, u1, u2) and v = (v0, v1, v2), w_{i+1} = 1/(1 - w_i).  The gluing
variety is the plane curve

    u0^2 v0^2 = (1 - u0)(1 - v0),

with the complete hyperbolic structure at (e^{i pi/3}, e^{-i pi/3}).  A
quantum point at odd level N consists of compatible N-th roots of the six
shapes, encoded by integer edge colors (a_k, b_k) solving

    a2 = -2 - a0 - a1,   b2 = 2 - b0 - b1,   a1 + 2 a2 - 2 b0 - b1 = -4,

together with the longitude/meridian weight data.  The parity of a1 decides
the growth case: odd = exponential (case a), even = subexponential (case b).

Only this triangulation is implemented; no generic triangulation parser.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import mpmath as mp

from .errors import (DegenerateInput, RelationViolation, WeightViolation)
from .precision import PrecisionContext

__all__ = [
    "Case", "ShapeTriple", "GluingPoint", "ColorSystem", "QuantumGluingPoint",
    "complete_point", "solve_curve", "dilation", "colors_from_weights",
    "classify_case", "quantum_lift", "boundary_weight",
    "log_weight_lambda", "log_weight_mu",
]


class Case(enum.Enum):
    """Growth dichotomy: A = odd-parity longitude weight (volume growth),
    B = even parity (subexponential)."""
    A = "a"
    B = "b"


# ---------------------------------------------------------------------------
# Classical points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeTriple:
    """Shape parameters of one ideal tetrahedron, cycling by
    w_{i+1} = 1/(1 - w_i)."""
    w0: mp.mpc
    w1: mp.mpc
    w2: mp.mpc

    @classmethod
    def from_w0(cls, w0, ctx: PrecisionContext) -> "ShapeTriple":
        with ctx.workdps():
            w0 = mp.mpc(w0)
            if abs(w0) < ctx.pole_tol or abs(w0 - 1) < ctx.pole_tol:
                raise DegenerateInput("shape parameter at 0 or 1")
            return cls(w0, 1 / (1 - w0), 1 - 1 / w0)

    def __iter__(self):
        return iter((self.w0, self.w1, self.w2))


@dataclass(frozen=True)
class GluingPoint:
    """A point (u0, v0) of the gluing curve with its two shape triples."""
    u0: mp.mpc
    v0: mp.mpc
    u: ShapeTriple
    v: ShapeTriple

    @classmethod
    def from_coordinates(cls, u0, v0, ctx: PrecisionContext) -> "GluingPoint":
        with ctx.workdps():
            u0, v0 = mp.mpc(u0), mp.mpc(v0)
            resid = abs(u0 ** 2 * v0 ** 2 - (1 - u0) * (1 - v0))
            if resid > ctx.eps(8) * max(1, abs(u0 * v0) ** 2):
                raise DegenerateInput(
                    f"(u0, v0) off the gluing curve: residual "
                    f"{mp.nstr(resid, 5)}")
            return cls(u0, v0, ShapeTriple.from_w0(u0, ctx),
                       ShapeTriple.from_w0(v0, ctx))


def complete_point(ctx: PrecisionContext) -> GluingPoint:
    """The point realizing the complete hyperbolic structure:
    (u0, v0) = (e^{i pi/3}, e^{-i pi/3})."""
    with ctx.workdps():
        u0 = mp.expjpi(mp.mpf(1) / 3)
        v0 = mp.expjpi(-mp.mpf(1) / 3)
        return GluingPoint.from_coordinates(u0, v0, ctx)


def solve_curve(u0, ctx: PrecisionContext) -> list[GluingPoint]:
    """Both roots in v0 of u0^2 v0^2 + (1-u0) v0 - (1-u0) = 0, packaged as
    gluing points and sorted by (Im, Re)."""
    with ctx.workdps():
        u0 = mp.mpc(u0)
        if abs(u0) < ctx.pole_tol or abs(u0 - 1) < ctx.pole_tol:
            raise DegenerateInput("u0 must avoid {0, 1}")
        a = u0 ** 2
        b = 1 - u0
        disc = mp.sqrt(b * b + 4 * a * b)
        roots = [(-b + disc) / (2 * a), (-b - disc) / (2 * a)]
        roots.sort(key=lambda r: (mp.im(r), mp.re(r)))
        return [GluingPoint.from_coordinates(u0, r, ctx) for r in roots]


def dilation(p: GluingPoint):
    """Dilation factors of the longitude and meridian:
    delta(lambda) = u0^4/(1-u0)^2,  delta(mu) = (u0-1)(v0-1)/(u0 v0)."""
    u0, v0 = p.u0, p.v0
    return (u0 ** 4 / (1 - u0) ** 2,
            (u0 - 1) * (v0 - 1) / (u0 * v0))


# ---------------------------------------------------------------------------
# Edge colors and weights
# ---------------------------------------------------------------------------

def _lattice_int(value, unit, what: str) -> int:
    """value / unit as an exact integer, else WeightViolation."""
    q = mp.mpc(value) / unit
    k = int(mp.nint(mp.re(q)))
    if abs(q - k) > mp.mpf("1e-9"):
        raise WeightViolation(f"{what} = {value} is off the lattice "
                              f"{mp.nstr(unit, 5)} * Z")
    return k


@dataclass(frozen=True)
class ColorSystem:
    """Integer edge colors with their defining weight data.

    lk_lambda, lk_mu are the longitude/meridian log weights in the
    complete-point normalization (for other curve points the same lattice
    data plays the role of h_rho, see quantum_lift); h_rho_lambda is the
    parity-carrying datum of the growth dichotomy.
    """
    a0: int
    a1: int
    a2: int
    b0: int
    b1: int
    b2: int
    lk_lambda: mp.mpc
    lk_mu: mp.mpc
    h2_mu: int
    h_rho_lambda: mp.mpc

    def __post_init__(self):
        if self.a2 != -2 - self.a0 - self.a1:
            raise RelationViolation("a2 != -2 - a0 - a1")
        if self.b2 != 2 - self.b0 - self.b1:
            raise RelationViolation("b2 != 2 - b0 - b1")
        if self.a1 + 2 * self.a2 - 2 * self.b0 - self.b1 != -4:
            raise RelationViolation("edge relation a1+2a2-2b0-b1 = -4 fails")
        if self.h2_mu != (self.a2 + self.b2) % 2:
            raise RelationViolation("h2(mu) != a2 + b2 mod 2")


def colors_from_weights(a0: int, lk_lambda, lk_mu,
                        ctx: PrecisionContext) -> ColorSystem:
    """Solve the color relations for given free color a0 (even, >= 4) and
    weights lk_lambda in 2*pi*i*Z, lk_mu in pi*i*Z:

        a1 = -2 a0 + lk_lambda/2 pi i - 2,
        b0 = lk_mu/pi i - a0,
        b1 = 2 a0 - 2 lk_mu/pi i - lk_lambda/2 pi i + 2.
    """
    if a0 % 2 != 0 or a0 < 4:
        raise WeightViolation(f"a0 must be an even integer >= 4, got {a0}")
    with ctx.workdps():
        k = _lattice_int(mp.mpc(lk_lambda), 2j * mp.pi, "lk(lambda)")
        m = _lattice_int(mp.mpc(lk_mu), 1j * mp.pi, "lk(mu)")
        # store the weights snapped onto the lattice at working precision
        lk_lambda = 2j * mp.pi * k
        lk_mu = 1j * mp.pi * m
        a1 = -2 * a0 + k - 2
        b0 = m - a0
        b1 = 2 * a0 - 2 * m - k + 2
        a2 = -2 - a0 - a1
        b2 = 2 - b0 - b1
        return ColorSystem(a0=a0, a1=a1, a2=a2, b0=b0, b1=b1, b2=b2,
                           lk_lambda=lk_lambda, lk_mu=lk_mu,
                           h2_mu=(a2 + b2) % 2, h_rho_lambda=lk_lambda)


def classify_case(c: ColorSystem) -> Case:
    """Case A iff a1 is odd (equivalently h_rho(lambda)/2 pi i odd)."""
    return Case.A if c.a1 % 2 != 0 else Case.B


def log_weight_lambda(p: GluingPoint, c: ColorSystem):
    """Longitude log weight computed from logs and colors:
    2 Log u0 - 2 Log u2 + 2 pi i (a0 - a2)."""
    return (2 * mp.log(p.u.w0) - 2 * mp.log(p.u.w2)
            + 2j * mp.pi * (c.a0 - c.a2))


def log_weight_mu(p: GluingPoint, c: ColorSystem):
    """Meridian log weight: Log u2 + Log v2 + pi i (a2 + b2)."""
    return (mp.log(p.u.w2) + mp.log(p.v.w2)
            + 1j * mp.pi * (c.a2 + c.b2))


# ---------------------------------------------------------------------------
# Quantum lifts
# ---------------------------------------------------------------------------

def _wrap_log(w, lo_excl, hi_incl):
    """Shift w by 2 pi i k into the window Im(w) in (lo_excl, hi_incl]."""
    k = int(mp.ceil((lo_excl - mp.im(w)) / (2 * mp.pi)))
    w = w + 2j * mp.pi * k
    while mp.im(w) > hi_incl:
        w -= 2j * mp.pi
    while mp.im(w) <= lo_excl:
        w += 2j * mp.pi
    return w


@dataclass(frozen=True)
class QuantumGluingPoint:
    """Quantum shape parameters at level N over a classical gluing point.

    uq/vq are the N-th-root lifts exp((Log w_k + pi i d_k)/N + pi i d_k);
    l0u/l1u (and the conjugate-side l0vs/l1vs) are the log-parameters
    normalized into Im(l0) in (-2pi, 0], Im(l1) in (0, 2pi], the windows
    used by the integral representation of the state sum.
    """
    base: GluingPoint
    colors: ColorSystem
    N: int
    uq: tuple
    vq: tuple
    l0u: mp.mpc
    l1u: mp.mpc
    l0vs: mp.mpc
    l1vs: mp.mpc

    @property
    def case(self) -> Case:
        return classify_case(self.colors)

    def to_json_dict(self, digits: int = 30) -> dict:
        def c2s(z):
            return [mp.nstr(mp.re(z), digits), mp.nstr(mp.im(z), digits)]
        return {
            "N": self.N,
            "u0": c2s(self.base.u0),
            "v0": c2s(self.base.v0),
            "colors": {k: getattr(self.colors, k)
                       for k in ("a0", "a1", "a2", "b0", "b1", "b2",
                                 "h2_mu")},
            "uq": [c2s(w) for w in self.uq],
            "vq": [c2s(w) for w in self.vq],
            "log_params": {"l0u": c2s(self.l0u), "l1u": c2s(self.l1u),
                           "l0vstar": c2s(self.l0vs),
                           "l1vstar": c2s(self.l1vs)},
        }

    def to_json(self, digits: int = 30) -> str:
        return json.dumps(self.to_json_dict(digits))


def quantum_lift(p: GluingPoint, c: ColorSystem, N: int,
                 ctx: PrecisionContext) -> QuantumGluingPoint:
    """Lift a classical point to level N with the given colors.

    Raises RelationViolation when the tetrahedral or edge residuals exceed
    tolerance (inconsistent colors for this point, e.g. shapes with the
    wrong orientation of imaginary parts).
    """
    if N < 3 or N % 2 == 0:
        raise ValueError("N must be an odd integer >= 3")
    with ctx.workdps():
        # Rebuild the point at lift precision: u0 is taken as exact data,
        # v0 is refined onto the gluing curve (nearest quadratic root), and
        # the shape triples are recomputed, so all residual checks below see
        # the current tolerance whatever precision the point was built at.
        u0 = mp.mpc(p.u0)
        a, b = u0 ** 2, 1 - u0
        disc = mp.sqrt(b * b + 4 * a * b)
        v0 = min(((-b + disc) / (2 * a), (-b - disc) / (2 * a)),
                 key=lambda r: abs(r - p.v0))
        if abs(v0 - p.v0) > mp.mpf("1e-6") * max(1, abs(v0)):
            raise RelationViolation(
                "(u0, v0) too far from the gluing curve to refine")
        p = GluingPoint(u0=u0, v0=v0, u=ShapeTriple.from_w0(u0, ctx),
                        v=ShapeTriple.from_w0(v0, ctx))
        acolors = (c.a0, c.a1, c.a2)
        bcolors = (c.b0, c.b1, c.b2)
        uq = tuple(mp.exp((mp.log(w) + 1j * mp.pi * d) / N + 1j * mp.pi * d)
                   for w, d in zip(p.u, acolors))
        vq = tuple(mp.exp((mp.log(w) + 1j * mp.pi * d) / N + 1j * mp.pi * d)
                   for w, d in zip(p.v, bcolors))
        tol = ctx.eps(8)

        def _close(x, y):
            return abs(x - y) <= tol * max(1, abs(y))

        for wq, w in zip(uq + vq, tuple(p.u) + tuple(p.v)):
            if not _close(wq ** N, w):
                raise RelationViolation(
                    "quantum shape fails (w_q)^N = w; colors inconsistent "
                    "with the point")
        if not _close(uq[0] * uq[1] * uq[2], mp.expjpi(-mp.mpf(1) / N)):
            raise RelationViolation("tetrahedral relation fails on u side")
        if not _close(vq[0] * vq[1] * vq[2], mp.expjpi(mp.mpf(1) / N)):
            raise RelationViolation("tetrahedral relation fails on v side")
        edge = uq[1] * uq[0] ** 2 * vq[2] ** -2 * vq[1] ** -1
        if not _close(edge, mp.expjpi(-mp.mpf(2) / N)):
            raise RelationViolation("edge relation fails")

        lu = [(mp.log(w) + 1j * mp.pi * d) / N + 1j * mp.pi * d
              for w, d in zip(p.u, acolors)]
        lvs = [(mp.conj(mp.log(w)) - 1j * mp.pi * d) / N - 1j * mp.pi * d
               for w, d in zip(p.v, bcolors)]
        l0u = _wrap_log(lu[0], -2 * mp.pi, mp.mpf(0))
        l1u = _wrap_log(lu[1], mp.mpf(0), 2 * mp.pi)
        l0vs = _wrap_log(lvs[0], -2 * mp.pi, mp.mpf(0))
        l1vs = _wrap_log(lvs[1], mp.mpf(0), 2 * mp.pi)
        return QuantumGluingPoint(base=p, colors=c, N=N, uq=uq, vq=vq,
                                  l0u=l0u, l1u=l1u, l0vs=l0vs, l1vs=l1vs)


def boundary_weight(q: QuantumGluingPoint):
    """Boundary weights (kappa(lambda), kappa(mu)) =
    (uq0^2 uq2^{-2}, uq2 vq2); kappa(lambda)^N equals delta(lambda)."""
    uq, vq = q.uq, q.vq
    return (uq[0] ** 2 * uq[2] ** -2, uq[2] * vq[2])
