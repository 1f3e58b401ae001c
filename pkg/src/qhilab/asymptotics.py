"""Saddle-point machinery, deformed contours, and growth-rate fits.

The state-sum integrand is governed, in the large-N limit, by the two
potentials

    f_-(z) = Li2(e^{l0 + z}) + z^2 - l1 z,
    f_+(z) = Li2(e^{l0 + z}) + z^2 - (l1 - 2 i pi) z,

with l0 = -2 i pi and l1 = i pi (case a) or 2 i pi (case b).  This module
evaluates them, finds their saddle points, builds the steepest-descent
polylines, integrates e^{(N/2 i pi) f} along vertical or deformed routes,
produces the one-term saddle-point and endpoint (Perron) predictions, and
fits growth sequences (2 pi/N) Log|value| against c0 + c1 Log(N)/N + c2/N.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import mpmath as mp

from .contours import Contour, contour_integral, oscillation_panels
from .dilog import li2, log_s_hat, s_hat
from .errors import (ContourInvalid, CutViolation, DegenerateInput,
                     DegenerateSaddle, IllConditioned, NoAdmissibleRoot)
from .gluing import QuantumGluingPoint
from .precision import PrecisionContext

__all__ = [
    "PotentialKind", "Potential", "potential_eval", "potential_d1",
    "second_derivative", "saddle_points",
    "Scenario", "build_contour", "classical_integral",
    "SaddleExpansion", "spm_prediction", "perron_prediction",
    "QuantumIntegralResult", "quantum_integral",
    "GrowthRow", "FitResult", "GrowthSeries", "growth_fit", "pm_check",
]


class PotentialKind(enum.Enum):
    MINUS = "minus"
    PLUS = "plus"


@dataclass(frozen=True)
class Potential:
    """f_-(z) = Li2(e^{l0+z}) + z^2 - l1 z,
    f_+(z) = Li2(e^{l0+z}) + z^2 - (l1 - 2 i pi) z."""
    kind: PotentialKind
    l0_inf: mp.mpc
    l1_inf: mp.mpc

    @classmethod
    def case_a(cls, kind: PotentialKind) -> "Potential":
        with mp.workdps(300):
            return cls(kind, -2j * mp.pi, 1j * mp.pi)

    @classmethod
    def case_b(cls, kind: PotentialKind) -> "Potential":
        with mp.workdps(300):
            return cls(kind, -2j * mp.pi, 2j * mp.pi)

    @property
    def l1_eff(self):
        if self.kind is PotentialKind.MINUS:
            return mp.mpc(self.l1_inf)
        return mp.mpc(self.l1_inf) - 2j * mp.pi


def _exp_arg_on_cut(w):
    """True when e^w lies on the Li2 cut [1, +inf)."""
    return (mp.re(w) >= 0
            and mp.fmod(mp.im(w), 2 * mp.pi) == 0)


def potential_eval(p: Potential, z, ctx: PrecisionContext):
    """f_{+-}(z); CutViolation when e^{l0+z} crosses [1, +inf)."""
    with ctx.workdps():
        z = mp.mpc(z)
        w = mp.mpc(p.l0_inf) + z
        if _exp_arg_on_cut(w):
            raise CutViolation("e^{l0+z} on the dilogarithm cut")
        return li2(mp.exp(w), ctx) + z * z - p.l1_eff * z


def potential_d1(p: Potential, z, ctx: PrecisionContext):
    """f'(z) = 2z - Log(1 - e^{l0+z}) - l1_eff."""
    with ctx.workdps():
        z = mp.mpc(z)
        w = mp.mpc(p.l0_inf) + z
        if _exp_arg_on_cut(w):
            raise CutViolation("e^{l0+z} on the dilogarithm cut")
        return 2 * z - mp.log(1 - mp.exp(w)) - p.l1_eff


def second_derivative(p: Potential, z0, ctx: PrecisionContext):
    """f''(z0) = 1 + 1/(1 - e^{l0+z0})."""
    with ctx.workdps():
        w = mp.mpc(p.l0_inf) + mp.mpc(z0)
        if _exp_arg_on_cut(w):
            raise CutViolation("e^{l0+z0} on the dilogarithm cut")
        return 1 + 1 / (1 - mp.exp(w))


def saddle_points(p: Potential, ctx: PrecisionContext):
    """The unique critical point of f_{+-}.

    Critical points solve e^{-l1} X^2 + e^{l0} X - 1 = 0 in X = e^{z0}; the
    admissible branch is fixed by 2 Im(z0) in (-pi + Im l1, pi + Im l1] for
    the minus potential, shifted by -2 pi for plus.
    """
    with ctx.workdps():
        a = mp.exp(-mp.mpc(p.l1_inf))
        b = mp.exp(mp.mpc(p.l0_inf))
        disc = mp.sqrt(b * b + 4 * a)
        roots = [(-b + disc) / (2 * a), (-b - disc) / (2 * a)]
        im_l1 = mp.im(p.l1_inf)
        if p.kind is PotentialKind.MINUS:
            lo, hi = (-mp.pi + im_l1) / 2, (mp.pi + im_l1) / 2
        else:
            lo, hi = (-3 * mp.pi + im_l1) / 2, (-mp.pi + im_l1) / 2
        found = []
        for X in roots:
            if X == 0:
                continue
            base = mp.log(X)
            for k in range(-3, 4):
                z0 = base + 2j * mp.pi * k
                if lo < mp.im(z0) <= hi:
                    found.append(z0)
        uniq = []
        for z0 in found:
            if all(abs(z0 - other) > ctx.eps(10) for other in uniq):
                uniq.append(z0)
        if len(uniq) != 1:
            raise NoAdmissibleRoot(
                f"{len(uniq)} admissible critical points found")
        z0 = uniq[0]
        resid = abs(potential_d1(p, z0, ctx))
        if resid > ctx.eps(8):
            raise NoAdmissibleRoot(
                f"critical-point residual {mp.nstr(resid, 5)}")
        return z0


# ---------------------------------------------------------------------------
# Contour scenarios
# ---------------------------------------------------------------------------

class Scenario(enum.Enum):
    RECTANGLE = "rectangle"
    VERTICAL = "vertical"
    CASE_A_PLUS = "case_a_plus"
    CASE_B_PLUS = "case_b_plus"
    CASE_B_MINUS = "case_b_minus"


_SCENARIO_POTENTIAL = {
    Scenario.CASE_A_PLUS: lambda: Potential.case_a(PotentialKind.PLUS),
    Scenario.CASE_B_PLUS: lambda: Potential.case_b(PotentialKind.PLUS),
    Scenario.CASE_B_MINUS: lambda: Potential.case_b(PotentialKind.MINUS),
}


@dataclass
class ContourParams:
    """Deformation parameters; defaults follow the documented windows
    (s_N^- = alpha_minus pi/N with alpha_minus in (0,1), eta/eta' fixed
    offsets, x the far-left abscissa)."""
    alpha_minus: float = 0.5
    alpha_plus: float = 1.5
    eps: float | None = None       # rectangle half-width, default pi/N
    eta: float = 0.3
    eta_prime: float = 0.3
    eps_hat: float = 0.2           # half-gap of the near-saddle chords
    x: float = -12.0


def _graded(a, b, N: int, base: float = 8.0, ratio: float = 4.0):
    """Vertices from a to b with geometric grading away from a, spacing
    base/N growing by `ratio` (resolves log-singular integrand phase near
    a cut anchor at a)."""
    a, b = mp.mpc(a), mp.mpc(b)
    L = abs(b - a)
    u = (b - a) / L
    pts = [a]
    d = mp.mpf(base) / N
    while d < L / 2:
        pts.append(a + u * d)
        d *= ratio
    pts.append(b)
    return pts


def _sign_check(pot: Potential, ctx: PrecisionContext,
                pairs: list, skip_near: list, slack=1e-9):
    """Assert Im f < slack at interior samples of the given logical contour
    parts, excluding points within 0.2 of saddle/endpoint locations."""
    with ctx.workdps():
        for a, b in pairs:
            a, b = mp.mpc(a), mp.mpc(b)
            for t in range(1, 10):
                z = a + (b - a) * mp.mpf(t) / 10
                if any(abs(z - mp.mpc(s)) < mp.mpf("0.2")
                       for s in skip_near):
                    continue
                if mp.im(potential_eval(pot, z, ctx)) > slack:
                    raise ContourInvalid(
                        f"Im f > 0 at {mp.nstr(z, 6)} on part "
                        f"[{mp.nstr(a, 4)}, {mp.nstr(b, 4)}]")


def build_contour(scenario: Scenario, N: int, ctx: PrecisionContext,
                  params: ContourParams | None = None) -> Contour:
    """Polyline for the requested scenario with cut/pole registry and
    oscillation-scaled panel hints.

    RECTANGLE      closed rectangle circling i[2 pi/N, 2 pi - 2 pi/N]
    VERTICAL       the segment i[s_N^-, 2 pi - s_N^+]
    CASE_A_PLUS    far-left detour where Im f_+ < 0 (five parts)
    CASE_B_PLUS    descent through the saddle Log((sqrt 5 - 1)/2) (six parts)
    CASE_B_MINUS   descent through Log((sqrt 5 + 1)/2) + i pi (five parts)
    """
    params = params or ContourParams()
    if not 0 < params.alpha_minus < 1:
        raise ContourInvalid("alpha_minus must lie in (0, 1)")
    if not 0 < params.alpha_plus < 2:
        raise ContourInvalid("alpha_plus must lie in (0, 2)")
    with ctx.workdps():
        s_minus = mp.mpf(params.alpha_minus) * mp.pi / N
        s_plus = mp.mpf(params.alpha_plus) * mp.pi / N
        lo = mp.mpc(0, s_minus)
        hi = mp.mpc(0, 2 * mp.pi - s_plus)
        cuts = [mp.mpc(0), 2j * mp.pi]

        if scenario is Scenario.RECTANGLE:
            eps = mp.mpf(params.eps) if params.eps is not None else mp.pi / N
            verts = [lo + eps, hi + eps, hi - eps, lo - eps, lo + eps]
            poles = [2j * mp.pi * b / N for b in range(0, N + 1)]
            pan = oscillation_panels(verts, N,
                                     rel_tol=float(ctx.quad_rel_tol))
            c = Contour(verts, pan, cuts=[], poles=poles)
            c.validate(ctx, pole_clearance=min(s_minus, 2 * mp.pi / N - s_plus,
                                               eps) / 4)
            return c

        if scenario is Scenario.VERTICAL:
            verts = [lo, hi]
            pan = oscillation_panels(verts, N,
                                     rel_tol=float(ctx.quad_rel_tol))
            return Contour(verts, pan, cuts=cuts)

        if scenario is Scenario.CASE_A_PLUS:
            x = mp.mpf(params.x)
            if x > -2:
                raise ContourInvalid("x must be far enough left (x <= -2)")
            # geometric grading toward the cut anchors 0 and 2 i pi, where
            # the integrand phase is log-singular along the real direction
            verts = ([lo] + _graded(0, x, N)
                     + list(reversed(_graded(2j * mp.pi, x + 2j * mp.pi, N)))
                     + [hi])
            pan = oscillation_panels(verts, N,
                                     rel_tol=float(ctx.quad_rel_tol))
            c = Contour(verts, pan, cuts=cuts)
            c.validate(ctx)
            _sign_check(_SCENARIO_POTENTIAL[scenario](), ctx,
                        pairs=[(0, x), (mp.mpc(x), mp.mpc(x, 2 * mp.pi)),
                               (mp.mpc(x, 2 * mp.pi), 2j * mp.pi)],
                        skip_near=[0, 2j * mp.pi])
            return c

        if scenario is Scenario.CASE_B_PLUS:
            eta = mp.mpf(params.eta)
            etap = mp.mpf(params.eta_prime)
            a_pt = mp.log((mp.sqrt(5) - 1) / 2)
            verts = [lo, mp.mpc(0), mp.mpc(0, -eta), a_pt,
                     a_pt + 1j * (2 * mp.pi - etap),
                     mp.mpc(0, 2 * mp.pi - etap), hi]
            pan = oscillation_panels(verts, N,
                                     rel_tol=float(ctx.quad_rel_tol))
            c = Contour(verts, pan, cuts=cuts)
            c.validate(ctx)
            _sign_check(_SCENARIO_POTENTIAL[scenario](), ctx,
                        pairs=[(mp.mpc(0, -eta), a_pt),
                               (a_pt, a_pt + 1j * (2 * mp.pi - etap)),
                               (a_pt + 1j * (2 * mp.pi - etap),
                                mp.mpc(0, 2 * mp.pi - etap))],
                        skip_near=[a_pt, mp.mpc(0)])
            return c

        if scenario is Scenario.CASE_B_MINUS:
            eh = mp.mpf(params.eps_hat)
            b_pt = mp.log((mp.sqrt(5) + 1) / 2) + 1j * mp.pi
            # grade the low horizontal away from the cut anchor at 0
            verts = (_graded(lo, 1 + lo, N)
                     + [mp.mpc(1, mp.pi - eh), b_pt, mp.mpc(0, mp.pi + eh),
                        hi])
            pan = oscillation_panels(verts, N,
                                     rel_tol=float(ctx.quad_rel_tol))
            c = Contour(verts, pan, cuts=cuts)
            c.validate(ctx)
            _sign_check(_SCENARIO_POTENTIAL[scenario](), ctx,
                        pairs=[(lo, 1 + lo),
                               (1 + lo, mp.mpc(1, mp.pi - eh)),
                               (mp.mpc(1, mp.pi - eh), b_pt),
                               (b_pt, mp.mpc(0, mp.pi + eh))],
                        skip_near=[b_pt, lo, 1 + lo])
            return c

    raise ValueError(f"unknown scenario {scenario}")




# ---------------------------------------------------------------------------
# Classical integrals
# ---------------------------------------------------------------------------

def _deformed_scenario(p: Potential):
    l1 = mp.im(p.l1_inf)
    case_b = abs(l1 - 2 * mp.pi) < 1e-9
    if p.kind is PotentialKind.PLUS:
        return Scenario.CASE_B_PLUS if case_b else Scenario.CASE_A_PLUS
    if case_b:
        return Scenario.CASE_B_MINUS
    return None  # case (a) minus: the vertical route is the good one


def classical_integral(p: Potential, N: int, s_minus, s_plus,
                       ctx: PrecisionContext, route: str = "auto",
                       params: ContourParams | None = None, order: int = 12,
                       confirm: bool = True):
    """I_{+-,N} = int e^{(N/2 i pi) f_{+-}(z)} dz from i s_minus to
    i(2 pi - s_plus), along the vertical segment or the scenario's deformed
    contour (equal by holomorphy).

    route = "auto" switches to the deformed contour when the vertical route
    would cancel more than digits - 20 decimal digits (the case (b) routes
    and the bounded case (a) plus integral).
    """
    with ctx.workdps():
        s_minus, s_plus = mp.mpf(s_minus), mp.mpf(s_plus)
        if not (0 < s_minus < 2 * mp.pi / N and 0 < s_plus < 2 * mp.pi / N):
            raise ValueError("s_minus, s_plus must lie in (0, 2 pi/N)")
        params = params or ContourParams(
            alpha_minus=float(s_minus * N / mp.pi),
            alpha_plus=float(s_plus * N / mp.pi))
        scen = _deformed_scenario(p)
        if route == "auto":
            # cancellation on the vertical route: integrand peaks at
            # exp((N/2 pi) Cl2(pi/3)) while the result may be O(1)
            cancel_digits = 0.0702 * N
            bounded_result = scen is not None
            route = ("deformed" if bounded_result
                     and cancel_digits > ctx.digits - 20 else "vertical")
        if route == "vertical":
            contour = build_contour(Scenario.VERTICAL, N, ctx, params)
        elif route == "deformed":
            if scen is None:
                raise ValueError(
                    "no deformed scenario for the case (a) minus potential")
            contour = build_contour(scen, N, ctx, params)
        else:
            raise ValueError(f"unknown route {route!r}")

        # raw closure: the contour is already validated against the cuts,
        # so skip the per-node cut checks of potential_eval
        from .dilog import _GUARD, _li2_raw
        dps = ctx.digits + _GUARD
        l0 = mp.mpc(p.l0_inf)
        leff = p.l1_eff
        pref = N / (2j * mp.pi)

        def integrand(z):
            return mp.exp(pref * (_li2_raw(mp.exp(l0 + z), dps)
                                  + z * z - leff * z))

        return contour_integral(integrand, contour, ctx, order=order,
                                confirm=confirm)


# ---------------------------------------------------------------------------
# Saddle-point and endpoint predictions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SaddleExpansion:
    """One-term saddle-point data for int e^{n(-i) f} dz, n = N/2 pi."""
    value: mp.mpc          # sqrt(2 pi/n) e^{i theta} e^{n(-i) f(z0)}/sqrt|f''|
    z0: mp.mpc
    f0: mp.mpc
    fpp: mp.mpc
    theta: mp.mpf
    amplitude: mp.mpf      # |value|
    phase_slope: mp.mpf    # d arg / dN = -Re f(z0) / 2 pi


def spm_prediction(p: Potential, N: int, ctx: PrecisionContext,
                   z0=None) -> SaddleExpansion:
    """Leading saddle-point term with unit amplitude function:
    sqrt(2 pi/n) e^{i theta} e^{n (-i) f(z0)} / sqrt|f''(z0)|, n = N/2 pi,
    theta = pi - arg(-1/f''(z0))/2."""
    with ctx.workdps():
        if z0 is None:
            z0 = saddle_points(p, ctx)
        fpp = second_derivative(p, z0, ctx)
        if abs(fpp) < mp.mpf("1e-12"):
            raise DegenerateSaddle("f''(z0) vanishes")
        f0 = potential_eval(p, z0, ctx)
        n = mp.mpf(N) / (2 * mp.pi)
        theta = mp.pi - mp.arg(-1 / fpp) / 2
        value = (mp.sqrt(2 * mp.pi / n) * mp.exp(1j * theta)
                 / mp.sqrt(abs(fpp)) * mp.exp(n * (-1j) * f0))
        return SaddleExpansion(
            value=value, z0=z0, f0=f0, fpp=fpp, theta=theta,
            amplitude=abs(value), phase_slope=-mp.re(f0) / (2 * mp.pi))


def perron_prediction(g_at_z0, fprime_at_z0, f_at_z0, n):
    """Endpoint-dominated leading term of int_lambda g e^{n(-i) f} dz for a
    contour starting at the maximum z0 of Im f:
    e^{n(-i) f(z0)} g(z0) / (i f'(z0) n)."""
    fprime_at_z0 = mp.mpc(fprime_at_z0)
    if abs(fprime_at_z0) == 0:
        raise DegenerateInput("f'(z0) must be nonzero for the endpoint rule")
    return (mp.exp(mp.mpf(n) * (-1j) * mp.mpc(f_at_z0))
            * mp.mpc(g_at_z0) / (1j * fprime_at_z0 * mp.mpf(n)))


# ---------------------------------------------------------------------------
# The quantum integral
# ---------------------------------------------------------------------------

@dataclass
class QuantumIntegralResult:
    sigma: mp.mpc            # Sigma_N reconstructed from the integral
    integral: mp.mpc         # the bare rectangle integral
    growth: mp.mpf           # (2 pi/N) Log|sigma|
    rho_samples: dict        # diagnostic rho(z) at the case's saddle points
    contour: Contour


def _rho_factor(q: QuantumGluingPoint, z, ctx: PrecisionContext):
    """rho(z) = e^{-l1' z/2 i pi} (1 - e^z)^{-l0'/2 i pi - 1/2}, the
    N-independent amplitude factor of the integrand; l_k' = Log u_k +
    i pi a_k."""
    with ctx.workdps():
        c = q.colors
        l0p = mp.log(q.base.u.w0) + 1j * mp.pi * c.a0
        l1p = mp.log(q.base.u.w1) + 1j * mp.pi * c.a1
        z = mp.mpc(z)
        return (mp.exp(-l1p * z / (2j * mp.pi))
                * mp.exp((-l0p / (2j * mp.pi) - mp.mpf(1) / 2)
                         * mp.log(1 - mp.exp(z))))


def quantum_integral(q: QuantumGluingPoint, ctx: PrecisionContext,
                     eps=None, upsilon: float | None = None,
                     order: int = 24,
                     confirm: bool = True) -> QuantumIntegralResult:
    """Sigma_N(uq0, uq1) computed from the rectangle contour integral

      1 + (1/S_N(l0)) (N/4 i pi) oint_{C_N} e^{(N/2 i pi)(z^2 - l1 z)}
          S_N(l0 + z) coth(Nz/2) dz,

    with endpoint windows s_N^- = (1+upsilon)/2 * pi/N and
    s_N^+ = (1+upsilon'') pi/N chosen from arg(u0) so the contour clears
    the shifted cuts.  Reports rho at the relevant saddle points as a
    diagnostic of the N-independent amplitude.
    """
    from .statesum import residue_contour  # local import: no cycle

    with ctx.workdps():
        N = q.N
        if upsilon is None:
            upsilon = min(0.9, abs(mp.arg(q.base.u0)) / mp.pi + 0.05)
        ups2 = upsilon + (1 - upsilon) / 2
        s_minus = (1 + upsilon) / 2 * mp.pi / N
        s_plus = (1 + ups2) * mp.pi / N
        contour = residue_contour(q, ctx, eps=eps, s_minus=s_minus,
                                  s_plus=s_plus, order=order)
        l0, l1 = q.l0u, q.l1u

        def integrand(z):
            return (mp.exp(N / (2j * mp.pi) * (z * z - l1 * z))
                    * s_hat(l0 + z, N, ctx) * mp.coth(N * z / 2))

        integral = contour_integral(integrand, contour, ctx, order=order,
                                    pole_clearance=mp.pi / (8 * N),
                                    confirm=confirm)
        sigma = 1 + mp.exp(-log_s_hat(l0, N, ctx)) \
            * N / (4j * mp.pi) * integral
        growth = 2 * mp.pi / N * mp.log(abs(sigma))
        case_b = q.colors.a1 % 2 == 0
        pots = ([Potential.case_b(PotentialKind.PLUS),
                 Potential.case_b(PotentialKind.MINUS)] if case_b
                else [Potential.case_a(PotentialKind.MINUS)])
        rho_samples = {}
        for pot in pots:
            z0 = saddle_points(pot, ctx)
            rho_samples[(pot.kind.value, mp.nstr(z0, 8))] = \
                _rho_factor(q, z0, ctx)
        return QuantumIntegralResult(sigma=sigma, integral=integral,
                                     growth=growth, rho_samples=rho_samples,
                                     contour=contour)


# ---------------------------------------------------------------------------
# Growth series, extrapolation, polynomial-modulus checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthRow:
    n: int
    value: mp.mpc
    growth: mp.mpf


@dataclass(frozen=True)
class FitResult:
    c0: float
    c1: float
    c2: float
    model: str
    residual: float


@dataclass
class GrowthSeries:
    """Sequence of (N, value, growth = (2 pi/N) Log|value|) with an
    optional extrapolation fit."""
    rows: list
    fit: FitResult | None = None

    @classmethod
    def from_values(cls, pairs, ctx: PrecisionContext) -> "GrowthSeries":
        with ctx.workdps():
            rows = [GrowthRow(int(n), mp.mpc(v),
                              2 * mp.pi / int(n) * mp.log(abs(mp.mpc(v))))
                    for n, v in pairs]
        return cls(rows=rows)

    def growths(self):
        return [(r.n, r.growth) for r in self.rows]


_FIT_MODEL = "growth(N) = c0 + c1*log(N)/N + c2/N"


def growth_fit(series: GrowthSeries, model: str = "asymptotic",
               min_n: int | None = None, cond_cap: float = 1e14) -> FitResult:
    """Least-squares fit of growth(N) = c0 + c1 Log(N)/N + c2/N; c0 is the
    extrapolated limit.  Raises IllConditioned when the normal equations
    are numerically singular."""
    if model not in ("asymptotic", _FIT_MODEL):
        raise ValueError(f"unknown fit model {model!r}")
    rows = [r for r in series.rows if min_n is None or r.n >= min_n]
    if len(rows) < 4:
        raise ValueError("growth fit needs at least 4 rows")
    with mp.workdps(40):
        A = mp.matrix(len(rows), 3)
        y = mp.matrix(len(rows), 1)
        for i, r in enumerate(rows):
            n = mp.mpf(r.n)
            A[i, 0] = 1
            A[i, 1] = mp.log(n) / n
            A[i, 2] = 1 / n
            y[i] = mp.mpf(r.growth)
        At = A.T
        M = At * A
        try:
            Minv = M ** -1
        except ZeroDivisionError as exc:
            raise IllConditioned("singular design matrix") from exc
        cond = mp.mnorm(M, 1) * mp.mnorm(Minv, 1)
        if cond > cond_cap:
            raise IllConditioned(
                f"normal-equation condition {mp.nstr(cond, 3)} exceeds cap")
        beta = Minv * (At * y)
        resid_vec = A * beta - y
        residual = mp.sqrt(mp.fsum(r ** 2 for r in resid_vec) / len(rows))
        fit = FitResult(c0=float(beta[0]), c1=float(beta[1]),
                        c2=float(beta[2]), model=_FIT_MODEL,
                        residual=float(residual))
    series.fit = fit
    return fit


def pm_check(values, tol: float = 0.75, return_details: bool = False):
    """Polynomial-modulus test: fit Log|value| = c + beta Log N and accept
    when every residual stays below `tol` (operationalizes membership in
    the exp(O(1) + log N O(1)) class)."""
    pts = [(int(n), mp.mpc(v)) for n, v in values]
    if len(pts) < 4:
        raise ValueError("pm_check needs at least 4 rows")
    with mp.workdps(40):
        xs = [mp.log(n) for n, _ in pts]
        ys = [mp.log(abs(v)) for _, v in pts]
        if any(not mp.isfinite(y) for y in ys):
            return (False, None, mp.inf) if return_details else False
        n = len(pts)
        sx = mp.fsum(xs)
        sy = mp.fsum(ys)
        sxx = mp.fsum(x * x for x in xs)
        sxy = mp.fsum(x * y for x, y in zip(xs, ys))
        den = n * sxx - sx * sx
        beta = (n * sxy - sx * sy) / den
        c = (sy - beta * sx) / n
        max_resid = max(abs(y - c - beta * x) for x, y in zip(xs, ys))
        ok = bool(max_resid <= tol)
    if return_details:
        return ok, float(beta), float(max_resid)
    return ok
