"""Arbitrary-precision special functions for the quantum invariants.

Implements the Euler dilogarithm Li2, the Clausen function Cl2, the
Bloch-Wigner function D, the non-compact quantum dilogarithm Phi_b, its
shifted odd-level version S_N (the building block of the state sums), the
cyclic dilogarithm omega_N on the Fermat curve, the weighted product g_N,
and the correction terms Xi_N / Psi_N that measure how fast log S_N
approaches its semiclassical limit (N/2 i pi) Li2.

Branch policy: a single global principal branch.  Every fractional power
is exp(a*Log(x)) with Log the principal logarithm, arg in (-pi, pi].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
import mpmath as mp

from .errors import (CurveViolation, CutViolation, DegenerateInput,
                     DivisionByZero, NonConvergent, PoleHit, ShiftOverflow,
                     StripViolation, ZeroProximityWarning)
from .precision import PrecisionContext
from .quadrature import gauss_legendre_nodes

__all__ = [
    "li2", "clausen2", "bloch_wigner", "figure_eight_volume",
    "phi_b", "log_phi_b", "s_hat", "log_s_hat",
    "omega", "omega_factors", "g_n", "log_g_n",
    "xi_n", "psi_n", "eps_ratio",
    "ErrorEnvelope", "DEFAULT_ENVELOPE", "calibrate_envelope",
    "exp_ratio_bound",
]

_GUARD = 10  # extra working digits inside every routine


# ---------------------------------------------------------------------------
# Euler dilogarithm and friends
# ---------------------------------------------------------------------------

_LI2_COEFFS: dict[int, list] = {}


def _li2_coeffs(dps: int) -> list:
    """Coefficients B_{2k}/(2k+1)! of the u-series of Li2, u = -Log(1-w)."""
    if dps in _LI2_COEFFS:
        return _LI2_COEFFS[dps]
    with mp.workdps(dps + 10):
        # |u| <= 1.4 after the transformations below; each term gains a
        # factor <= (1.4/2pi), i.e. ~0.65 digits.
        kmax = int(dps / 1.3) + 8
        coeffs = [mp.bernoulli(2 * k) / mp.factorial(2 * k + 1)
                  for k in range(1, kmax + 1)]
    _LI2_COEFFS[dps] = coeffs
    return coeffs


def _li2_series(w, dps: int):
    """Li2(w) for |w| <= 1, Re(w) <= 0.5, via the Bernoulli series in
    u = -Log(1-w): u - u^2/4 + u^3 sum_k c_k (u^2)^{k-1}, evaluated by
    Horner with the term count fixed by |u|."""
    u = -mp.log(1 - w)
    au = abs(u)
    if au == 0:
        return mp.mpc(0)
    coeffs = _li2_coeffs(dps)
    # terms shrink by (|u|/2 pi) each; |u| <= ~1.5 after the transforms
    nterms = min(len(coeffs),
                 max(1, int((dps + 6) * 2.302585
                            / (1.8379 - mp.log(au))) + 1))
    acc = coeffs[nterms - 1]
    u2 = u * u
    for k in range(nterms - 2, -1, -1):
        acc = acc * u2 + coeffs[k]
    return u - u2 / 4 + u * u2 * acc


def _li2_raw(w, dps: int):
    """Principal-branch Li2 at the current working precision.  `w` must be
    off the cut [1, +inf)."""
    w = mp.mpc(w)
    if w == 0:
        return mp.mpc(0)
    if abs(w) > 1:
        # inversion: Li2(w) + Li2(1/w) = -pi^2/6 - Log(-w)^2/2
        return (-mp.pi ** 2 / 6 - mp.log(-w) ** 2 / 2
                - _li2_raw(1 / w, dps))
    if mp.re(w) > 0.5:
        # reflection: Li2(w) + Li2(1-w) = pi^2/6 - Log(w) Log(1-w)
        if w == 1:
            return mp.mpc(mp.pi ** 2 / 6)
        return (mp.pi ** 2 / 6 - mp.log(w) * mp.log(1 - w)
                - _li2_raw(1 - w, dps))
    return _li2_series(w, dps)


def li2(z, ctx: PrecisionContext):
    """Euler dilogarithm Li2(z) = -int_0^z Log(1-t)/t dt, principal branch.

    Raises CutViolation for z on the cut [1, +inf).
    """
    with ctx.workdps():
        z = mp.mpc(z)
        if mp.im(z) == 0 and mp.re(z) >= 1:
            raise CutViolation(f"Li2 undefined on the cut [1, +inf): z={z}")
    with mp.workdps(ctx.digits + _GUARD):
        val = _li2_raw(z, ctx.digits + _GUARD)
    with ctx.workdps():
        return mp.mpc(val)


def clausen2(t, ctx: PrecisionContext):
    """Clausen function Cl2(t) = -int_0^t Log|2 sin(s/2)| ds.

    2*pi-periodic and odd; Cl2(t) = Im Li2(e^{it}) for real t.
    """
    with mp.workdps(ctx.digits + _GUARD):
        t = mp.mpf(t)
        tr = mp.fmod(t, 2 * mp.pi)
        if tr > mp.pi:
            tr -= 2 * mp.pi
        elif tr <= -mp.pi:
            tr += 2 * mp.pi
        if tr == 0:
            return mp.mpf(0)
        val = mp.im(_li2_raw(mp.expjpi(tr / mp.pi), ctx.digits + _GUARD))
    with ctx.workdps():
        return mp.mpf(val)


def bloch_wigner(y, ctx: PrecisionContext):
    """Bloch-Wigner dilogarithm D(y) = Im(Li2(y)) + arg(1-y) Log|y|.

    Vanishes on the real line; D(e^{it}) = Cl2(t).
    """
    with mp.workdps(ctx.digits + _GUARD):
        y = mp.mpc(y)
        if y == 0 or y == 1:
            raise DegenerateInput(f"D(y) undefined at y={y}")
        if mp.im(y) == 0:
            return mp.mpf(0)
        val = (mp.im(_li2_raw(y, ctx.digits + _GUARD))
               + mp.arg(1 - y) * mp.log(abs(y)))
    with ctx.workdps():
        return mp.mpf(val)


def figure_eight_volume(ctx: PrecisionContext):
    """Hyperbolic volume of the figure-eight knot complement, 2*Cl2(pi/3)."""
    with ctx.workdps():
        return 2 * clausen2(mp.pi / 3, ctx)


# ---------------------------------------------------------------------------
# The Taylor remainder eps(z) = (z/sinh z - 1)/z^2
# ---------------------------------------------------------------------------

_EPS_COEFFS: dict[int, list] = {}


def _eps_coeffs(dps: int) -> list:
    """Series coefficients of (z/sinh z - 1)/z^2 in powers of z^2:
    (2 - 2^{2k}) B_{2k} / (2k)! for k >= 1."""
    if dps in _EPS_COEFFS:
        return _EPS_COEFFS[dps]
    with mp.workdps(dps + 10):
        kmax = int(dps / 2.1) + 6  # |z| < 1/4: each term gains ~2.2 digits
        coeffs = [(2 - mp.mpf(4) ** k) * mp.bernoulli(2 * k)
                  / mp.factorial(2 * k) for k in range(1, kmax + 1)]
    _EPS_COEFFS[dps] = coeffs
    return coeffs


def eps_ratio(z, dps: int | None = None):
    """(z/sinh(z) - 1)/z^2, evaluated by series for |z| < 1/4 to avoid the
    0/0 at the origin."""
    if dps is None:
        dps = mp.mp.dps
    z = mp.mpc(z)
    if abs(z) >= 0.25:
        return (z / mp.sinh(z) - 1) / (z * z)
    z2 = z * z
    total = mp.mpc(0)
    term = mp.mpc(1)
    for c in _eps_coeffs(dps):
        total += c * term
        term *= z2
    return total


# ---------------------------------------------------------------------------
# Faddeev's non-compact quantum dilogarithm
# ---------------------------------------------------------------------------

def _strip_half_height(b):
    return (b + 1 / b) / 2


def _phi_pole_distance(z, b, search: int = 4):
    """Distance from z to the pole/zero lattice +-i((b+1/b)/2 + m b + n/b)."""
    H = _strip_half_height(b)
    best = mp.inf
    y = abs(mp.im(z))
    for m in range(int(max(0, (y - H) / b)) + search):
        for n in range(int(max(0, (y - H) / (1 / b))) + search):
            d = abs(mp.mpc(mp.re(z), y - (H + m * b + n / b)))
            if d < best:
                best = d
    return best


def _geometric_cells(r, V, cap=None):
    """Panel boundaries from r to V: widths double until `cap`, then stay
    uniform.  `cap` keeps (decay rate) * (cell width) small enough for the
    fixed Gauss-Legendre order to resolve the exponential tail."""
    pts = [mp.mpf(r)]
    cap = mp.mpf(cap) if cap is not None else mp.inf
    while pts[-1] < V:
        width = min(pts[-1], cap)
        pts.append(min(pts[-1] + width, mp.mpf(V)))
    return pts


def _phi_integrand_factory(b):
    b = mp.mpf(b)

    def den(w):
        return w * mp.sinh(b * w) * mp.sinh(w / b)
    return den


def _log_phi_direct(z, b, dps: int, rel_tol):
    """Log Phi_b(z) = (1/4) int_Omega e^{-2izw} / (w sinh(bw) sinh(w/b)) dw
    for z inside the pole-free strip.  Omega is the real line deformed by an
    upper semicircle around 0; the radius stays below half the distance to
    the nearest integrand pole i*pi*min(b, 1/b)."""
    b = mp.mpf(b)
    H = _strip_half_height(b)
    rate = 2 * H - 2 * abs(mp.im(z))
    if rate <= 0:
        raise StripViolation("z outside the strip of the defining integral")
    V = (dps * mp.log(10) + 12) / rate
    r = min(mp.mpf("0.5"), mp.pi * min(b, 1 / b) / 2)
    den = _phi_integrand_factory(b)

    def f(w):
        return mp.exp(-2j * z * w) / den(w)

    order = 16
    freq = abs(mp.re(z)) / mp.pi  # oscillation cycles per unit length
    cells = _geometric_cells(r, V, cap=order / (2 * rate))

    def pass_at(mult: int):
        total = mp.mpc(0)
        nodes, weights = gauss_legendre_nodes(order, dps)
        for sign in (1, -1):
            for i in range(len(cells) - 1):
                # traversal keeps the -V -> -r -> (arc) -> r -> V direction
                if sign == 1:
                    a, c = cells[i], cells[i + 1]
                else:
                    a, c = -cells[i + 1], -cells[i]
                width = abs(c - a)
                panels = mult * (1 + int(width * freq))
                step = (c - a) / panels
                for p in range(panels):
                    mid = a + step * p + step / 2
                    acc = mp.mpc(0)
                    for x, w in zip(nodes, weights):
                        acc += w * f(mid + step / 2 * x)
                    total += acc * step / 2
        # upper semicircle from -r to r: theta from pi to 0
        panels = 4 * mult
        step = -mp.pi / panels
        for p in range(panels):
            mid = mp.pi + step * p + step / 2
            acc = mp.mpc(0)
            for x, w in zip(nodes, weights):
                th = mid + step / 2 * x
                v = r * mp.expjpi(th / mp.pi)
                acc += w * f(v) * 1j * v
            total += acc * step / 2
        return total / 4

    prev = pass_at(1)
    for mult in (2, 4, 8):
        cur = pass_at(mult)
        if abs(cur - prev) <= mp.mpf(rel_tol) * max(abs(cur), mp.mpf(1)):
            return cur
        prev = cur
    raise NonConvergent("Phi_b quadrature did not converge")


def log_phi_b(z, b, ctx: PrecisionContext, max_shifts: int = 256):
    """Log of Faddeev's quantum dilogarithm Phi_b(z), b real positive.

    Direct quadrature inside the strip |Im z| < (b + 1/b)/2; outside, the
    argument is moved into the strip with the shift relation
    Phi_b(z - i b^{+-1}/2) = (1 + e^{2 pi b^{+-1} z}) Phi_b(z + i b^{+-1}/2),
    at most `max_shifts` times.
    """
    dps = ctx.digits + _GUARD
    with mp.workdps(dps):
        z = mp.mpc(z)
        b = mp.mpf(b)
        if b <= 0:
            raise ValueError("b must be real positive")
        H = _strip_half_height(b)
        if abs(mp.im(z)) >= H and _phi_pole_distance(z, b) < ctx.pole_tol:
            raise PoleHit(f"Phi_b pole/zero within tolerance of z={z}")
        extra = mp.mpc(0)
        steps = sorted((b, 1 / b), reverse=True)
        shifts = 0
        while abs(mp.im(z)) > 0.75 * H:
            s = steps[0] if abs(mp.im(z)) - steps[0] > -0.75 * H else steps[1]
            if shifts >= max_shifts:
                raise ShiftOverflow(
                    f"more than {max_shifts} shifts needed to reach the "
                    f"strip of Phi_b")
            if mp.im(z) > 0:
                # Phi(z) = Phi(z - i s) / (1 + e^{2 pi s (z - i s/2)})
                factor = 1 + mp.exp(2 * mp.pi * s * (z - 1j * s / 2))
                if abs(factor) < ctx.pole_tol:
                    warnings.warn("argument within tolerance of a zero of "
                                  "Phi_b", ZeroProximityWarning)
                extra -= mp.log(factor)
                z = z - 1j * s
            else:
                # Phi(z) = (1 + e^{2 pi s (z + i s/2)}) Phi(z + i s)
                factor = 1 + mp.exp(2 * mp.pi * s * (z + 1j * s / 2))
                if abs(factor) < ctx.pole_tol:
                    raise PoleHit("argument within tolerance of a pole of "
                                  "Phi_b")
                extra += mp.log(factor)
                z = z + 1j * s
            shifts += 1
        val = _log_phi_direct(z, b, dps, ctx.quad_rel_tol)
        return val + extra


def phi_b(z, b, ctx: PrecisionContext, max_shifts: int = 256):
    """Faddeev's quantum dilogarithm Phi_b(z).  See log_phi_b."""
    with mp.workdps(ctx.digits + _GUARD):
        return mp.exp(log_phi_b(z, b, ctx, max_shifts=max_shifts))


# ---------------------------------------------------------------------------
# The shifted quantum dilogarithm S_N
# ---------------------------------------------------------------------------
#
#   S_N(z) = Phi_{1/sqrt N}( sqrt(N)/(2 pi) (z - i(pi - pi/N)) )
#
# Holomorphic and zero-free on the strip -2pi/N < Im z < 2pi, with the shift
# relation S_N(z) = S_N(z + 2 i pi/N) (1 - e^{z + 2 i pi/N}), poles at
# 2 i pi + 2 i p pi / N (p >= 0) and zeros at -2 i pi (l+1)/N (l >= 0).
#
# The defining integral, after the change of variable w = sqrt(N) v, reads
#
#   Log S_N(z) = (1/4) int_Omega e^{q v} / (v sinh(v) sinh(N v)) dv,
#   q = -(i N / pi) (z - i pi + i pi/N),
#
# with Omega the real line deformed above 0.  Both tails decay at rate about
# N once Im(z) is near the middle of the strip, so arguments are first moved
# there with the (exact) shift relation; the quadrature then needs O(digits)
# nodes independently of N.  Node tables and the z-independent denominator
# factors are cached per (N, digits).

_SHAT_PLANS: dict[tuple[int, int, int, int], list] = {}


def _shat_plan(n_level: int, dps: int, level: int, tail_digits: int) -> list:
    """Cached (node, coefficient) pairs for the S_N strip integral at the
    given refinement level; coefficient = weight * jacobian / denominator.
    The tail is truncated where it drops below 10^-tail_digits, which may
    be looser than the working precision when only quad_rel_tol accuracy
    is requested."""
    key = (n_level, dps, level, tail_digits)
    if key in _SHAT_PLANS:
        return _SHAT_PLANS[key]
    with mp.workdps(dps + 8):
        N = n_level
        order = 16
        mult = 2 ** level
        r = min(mp.mpf("0.5"), mp.pi / (2 * N))
        V = (tail_digits * mp.log(10) + 12) / (N - 1)
        cells = _geometric_cells(r, V, cap=mp.mpf(order) / (2 * (N - 1)))
        nodes, weights = gauss_legendre_nodes(order, dps + 8)
        plan = []

        def den(v):
            return v * mp.sinh(v) * mp.sinh(N * v)

        for sign in (1, -1):
            for i in range(len(cells) - 1):
                if sign == 1:
                    a, c = cells[i], cells[i + 1]
                else:
                    a, c = -cells[i + 1], -cells[i]
                panels = mult
                step = (c - a) / panels
                for p in range(panels):
                    mid = a + step * p + step / 2
                    for x, w in zip(nodes, weights):
                        v = mid + step / 2 * x
                        plan.append((v, w * step / 2 / den(v)))
        # upper semicircle
        panels = 4 * mult
        step = -mp.pi / panels
        for p in range(panels):
            mid = mp.pi + step * p + step / 2
            for x, w in zip(nodes, weights):
                th = mid + step / 2 * x
                v = r * mp.expjpi(th / mp.pi)
                plan.append((v, w * step / 2 / den(v) * 1j * v))
    _SHAT_PLANS[key] = plan
    return plan


_SHAT_LEVELS: dict[tuple[int, int, int], int] = {}


def _eval_shat_plan(q, N: int, dps: int, level: int, tail_digits: int):
    total = mp.mpc(0)
    for v, coef in _shat_plan(N, dps, level, tail_digits):
        total += coef * mp.exp(q * v)
    return total / 4


def _confirmed_level(N: int, dps: int, tail_digits: int, rel_tol) -> int:
    """Smallest refinement level whose strip quadrature agrees with the
    next level to rel_tol/10 at a set of worst-case probe arguments.
    Cached, so every subsequent evaluation runs a single plan level."""
    key = (N, dps, tail_digits)
    if key in _SHAT_LEVELS:
        return _SHAT_LEVELS[key]
    probes = [mp.mpc(x, mp.pi + s * mp.pi / N)
              for x in (0, 2, -2, 5, -5) for s in (-1, 1)]
    tol = mp.mpf(rel_tol) / 10
    for level in (0, 1, 2):
        ok = True
        for w0 in probes:
            q = -(1j * N / mp.pi) * (w0 - 1j * mp.pi + 1j * mp.pi / N)
            a = _eval_shat_plan(q, N, dps, level, tail_digits)
            b = _eval_shat_plan(q, N, dps, level + 1, tail_digits)
            if abs(a - b) > tol * max(abs(b), mp.mpf(1)):
                ok = False
                break
        if ok:
            _SHAT_LEVELS[key] = level
            return level
    _SHAT_LEVELS[key] = 3
    return 3


def _log_shat_midstrip(w0, N: int, dps: int, rel_tol):
    """Direct integral for Log S_N at a point of the middle band
    |Im w0 - pi| <= pi/N."""
    q = -(1j * N / mp.pi) * (w0 - 1j * mp.pi + 1j * mp.pi / N)
    tail_digits = min(dps, int(-mp.log10(mp.mpf(rel_tol))) + 6)
    level = _confirmed_level(N, dps, tail_digits, rel_tol)
    return _eval_shat_plan(q, N, dps, level, tail_digits)


def _shat_singularity_guard(z, N: int, tol):
    """PoleHit near 2 i pi + 2 i p pi/N, ZeroProximityWarning near
    -2 i pi (l+1)/N."""
    if abs(mp.re(z)) >= tol:
        return
    y = mp.im(z)
    if y >= 2 * mp.pi - float(tol):
        p = mp.nint((y - 2 * mp.pi) * N / (2 * mp.pi))
        if p >= 0 and abs(z - 1j * (2 * mp.pi + 2 * p * mp.pi / N)) < tol:
            raise PoleHit(f"S_N pole within tolerance of z={z}")
    if y <= -2 * mp.pi / N + float(tol):
        l = mp.nint(-y * N / (2 * mp.pi) - 1)
        if l >= 0 and abs(z + 1j * 2 * mp.pi * (l + 1) / N) < tol:
            warnings.warn(f"S_N zero within tolerance of z={z}",
                          ZeroProximityWarning)


def log_s_hat(z, N: int, ctx: PrecisionContext, max_shifts: int = 128):
    """A logarithm of S_N(z) (exact up to 2 pi i times an integer).

    The argument is moved into the strip with S_N(z) = S_N(z + 2 i pi)
    (1 - e^{N z}), then to the middle band with the 2 i pi/N shift relation,
    where the defining integral is evaluated by cached Gauss-Legendre
    quadrature.
    """
    if N < 3 or N % 2 == 0:
        raise ValueError("N must be an odd integer >= 3")
    dps = ctx.digits + _GUARD
    with mp.workdps(dps):
        z = mp.mpc(z)
        tol = ctx.pole_tol
        _shat_singularity_guard(z, N, tol)
        extra = mp.mpc(0)
        sigma = mp.mpf("0.95") * mp.pi / N
        shifts = 0
        # full-period shifts into -sigma <= Im z <= 2 pi - sigma
        while mp.im(z) < -sigma or mp.im(z) > 2 * mp.pi - sigma:
            if shifts >= max_shifts:
                raise ShiftOverflow("too many 2 pi i shifts for S_N")
            if mp.im(z) < -sigma:
                factor = 1 - mp.exp(N * z)
                if abs(factor) < tol:
                    warnings.warn(f"S_N zero within tolerance of z={z}",
                                  ZeroProximityWarning)
                extra += mp.log(factor)
                z = z + 2j * mp.pi
            else:
                z = z - 2j * mp.pi
                factor = 1 - mp.exp(N * z)
                if abs(factor) < tol:
                    raise PoleHit(f"S_N pole within tolerance")
                extra -= mp.log(factor)
            shifts += 1
        # 2 pi i / N steps into the middle band |Im z - pi| <= pi/N
        m = int(mp.nint((mp.pi - mp.im(z)) * N / (2 * mp.pi)))
        h = 2j * mp.pi / N
        if m > 0:
            for j in range(1, m + 1):
                factor = 1 - mp.exp(z + j * h)
                if abs(factor) < tol:
                    warnings.warn("near-vanishing shift factor in S_N",
                                  ZeroProximityWarning)
                extra += mp.log(factor)
            z = z + m * h
        elif m < 0:
            for j in range(0, -m):
                factor = 1 - mp.exp(z - j * h)
                if abs(factor) < tol:
                    raise PoleHit("near-vanishing divisor while shifting "
                                  "S_N downwards")
                extra -= mp.log(factor)
            z = z + m * h
        return _log_shat_midstrip(z, N, dps, ctx.quad_rel_tol) + extra


def s_hat(z, N: int, ctx: PrecisionContext, max_shifts: int = 128):
    """The shifted quantum dilogarithm S_N(z).  See log_s_hat."""
    with mp.workdps(ctx.digits + _GUARD):
        return mp.exp(log_s_hat(z, N, ctx, max_shifts=max_shifts))


# ---------------------------------------------------------------------------
# Cyclic dilogarithm omega_N and the weighted product g_N
# ---------------------------------------------------------------------------

def _check_curve(x, y, N: int, ctx: PrecisionContext):
    resid = abs(x ** N + y ** N - 1)
    scale = max(mp.mpf(1), abs(x) ** N, abs(y) ** N)
    if resid > ctx.eps(8) * scale:
        raise CurveViolation(
            f"(x, y) off the curve x^N + y^N = 1: residual {mp.nstr(resid, 5)}")


def omega_factors(x, y, N: int, ctx: PrecisionContext, n_max: int):
    """Yield omega_N(x, y | n) for n = 0, 1, ..., n_max via the recurrence
    omega(n) = omega(n-1) * y / (1 - x zeta^n)."""
    with mp.workdps(ctx.digits + _GUARD):
        x, y = mp.mpc(x), mp.mpc(y)
        _check_curve(x, y, N, ctx)
        zeta = mp.expjpi(mp.mpf(2) / N)
        zj = mp.mpc(1)
        val = mp.mpc(1)
        yield val
        tiny = ctx.pole_tol
        for n in range(1, n_max + 1):
            zj *= zeta
            den = 1 - x * zj
            if abs(den) < tiny:
                raise DivisionByZero(
                    f"1 - x zeta^{n} vanishes within tolerance")
            val = val * y / den
            yield val


def omega(x, y, n: int, N: int, ctx: PrecisionContext):
    """Cyclic quantum dilogarithm omega_N(x, y | n) = prod_{j=1}^n
    y / (1 - x zeta^j) on the Fermat curve x^N + y^N = 1.

    N-periodic in n: omega_N(x, y | N + n) = omega_N(x, y | n).
    """
    if n < 0:
        raise ValueError("n must be a non-negative integer")
    last = None
    for last in omega_factors(x, y, N, ctx, n):
        pass
    return last


def log_g_n(z, N: int, ctx: PrecisionContext):
    """Log of g_N(z) = prod_{j=1}^{N-1} (1 - z zeta^{-j})^{j/N}, each factor
    on the principal branch."""
    with mp.workdps(ctx.digits + _GUARD):
        z = mp.mpc(z)
        zconj = mp.expjpi(-mp.mpf(2) / N)
        zj = mp.mpc(1)
        total = mp.mpc(0)
        tiny = ctx.pole_tol
        for j in range(1, N):
            zj *= zconj
            f = 1 - z * zj
            if abs(f) < tiny:
                raise DivisionByZero(f"1 - z zeta^-{j} vanishes")
            total += mp.log(f) * mp.mpf(j) / N
        return total


def g_n(z, N: int, ctx: PrecisionContext):
    """g_N(z) = prod_{j=1}^{N-1} (1 - z zeta^{-j})^{j/N}; O(N) arithmetic."""
    with mp.workdps(ctx.digits + _GUARD):
        return mp.exp(log_g_n(z, N, ctx))


# ---------------------------------------------------------------------------
# Correction terms Xi_N and Psi_N
# ---------------------------------------------------------------------------

def xi_n(z, N: int, ctx: PrecisionContext):
    """Xi_N(z) = int_Omega eps(v/N) e^{-izv/pi - v + v/N} / (4 sinh v) dv,
    Omega the real line deformed by an upper semicircle around 0.

    N * (Log S_N(z) - (N/2 i pi) Li2(e^{z + i pi/N})) on the strip
    -pi/N < Im z < 2 pi - pi/N.
    """
    dps = ctx.digits + _GUARD
    with mp.workdps(dps):
        z = mp.mpc(z)
        y = mp.im(z)
        rate_plus = 2 - mp.mpf(1) / N - y / mp.pi
        rate_minus = y / mp.pi + mp.mpf(1) / N
        if rate_plus <= 0 or rate_minus <= 0:
            raise StripViolation(
                f"Im z = {float(y)} outside (-pi/N, 2pi - pi/N) for N={N}")
        r = mp.mpf("0.5")
        Vp = (dps * mp.log(10) + 12) / rate_plus
        Vm = (dps * mp.log(10) + 12) / rate_minus

        def f(v):
            return (eps_ratio(v / N, dps)
                    * mp.exp(-1j * z * v / mp.pi - v + v / N)
                    / (4 * mp.sinh(v)))

        order = 16
        nodes, weights = gauss_legendre_nodes(order, dps)
        freq = abs(mp.re(z)) / mp.pi

        def pass_at(mult):
            total = mp.mpc(0)
            for sign, V in ((1, Vp), (-1, Vm)):
                rate = rate_plus if sign == 1 else rate_minus
                cells = _geometric_cells(r, V, cap=order / (2 * rate))
                for i in range(len(cells) - 1):
                    if sign == 1:
                        a, c = cells[i], cells[i + 1]
                    else:
                        a, c = -cells[i + 1], -cells[i]
                    width = abs(c - a)
                    panels = mult * (1 + int(width * freq))
                    step = (c - a) / panels
                    for p in range(panels):
                        mid = a + step * p + step / 2
                        acc = mp.mpc(0)
                        for x, w in zip(nodes, weights):
                            acc += w * f(mid + step / 2 * x)
                        total += acc * step / 2
            arc_panels = 4 * mult
            step = -mp.pi / arc_panels
            for p in range(arc_panels):
                mid = mp.pi + step * p + step / 2
                acc = mp.mpc(0)
                for x, w in zip(nodes, weights):
                    th = mid + step / 2 * x
                    v = r * mp.expjpi(th / mp.pi)
                    acc += w * f(v) * 1j * v
                total += acc * step / 2
            return total

        prev = pass_at(1)
        for mult in (2, 4, 8):
            cur = pass_at(mult)
            if abs(cur - prev) <= mp.mpf(ctx.quad_rel_tol) * max(abs(cur),
                                                                 mp.mpf(1)):
                return cur
            prev = cur
        raise NonConvergent("Xi_N quadrature did not converge")


def psi_n(z, N: int, ctx: PrecisionContext):
    """Psi_N(z) = Xi_N(z) + (i pi/2) int_0^1 t int_0^1
    e^{z + i pi t s/N} / (1 - e^{z + i pi t s/N}) ds dt.

    The double integral is elementary;  integrating twice gives
    (N^2/2 i pi)(Li2(e^{z + i pi/N}) - Li2(e^z)) + (N/2) Log(1 - e^z).
    Requires z off the cut [0, +inf) (so Im z in (0, 2pi - pi/N) mod 2pi,
    or Re z < 0).
    """
    dps = ctx.digits + _GUARD
    with mp.workdps(dps):
        z = mp.mpc(z)
        if mp.im(z) == 0 and mp.re(z) >= 0:
            raise CutViolation("Psi_N undefined on the cut [0, +inf)")
        xi = xi_n(z, N, ctx)
        corr = (N ** 2 / (2j * mp.pi)
                * (_li2_raw(mp.exp(z + 1j * mp.pi / N), dps)
                   - _li2_raw(mp.exp(z), dps))
                + mp.mpf(N) / 2 * mp.log(1 - mp.exp(z)))
        return xi + corr


# ---------------------------------------------------------------------------
# Error envelopes (uniform strip bounds, calibrated constants)
# ---------------------------------------------------------------------------

def exp_ratio_bound(delta, M):
    """Uniform bound e^{M/2} / (delta sqrt(1 - pi^2/24)) for
    |e^z/(1-e^z)| on half-strips (-inf, M] + i[delta, 2pi - delta]."""
    delta = mp.mpf(delta)
    return mp.exp(mp.mpf(M) / 2) / (delta * mp.sqrt(1 - mp.pi ** 2 / 24))


@dataclass(frozen=True)
class ErrorEnvelope:
    """Calibrated envelope for the correction terms.

    xi_bound(delta)      >= |Xi_N| on strips at distance delta from the cuts
    bound(delta, M) = B'/delta + B'' + pi e^{M/2} / (2 delta sqrt(1-pi^2/24))
                         >= |Psi_N| on the corresponding half-strips.

    B', B'' are calibration constants fitted once from a dense Xi_N scan
    (see calibrate_envelope); they are configuration, not derived truth.
    """

    b_prime: float
    b_doubleprime: float

    def xi_bound(self, delta):
        return mp.mpf(self.b_prime) / mp.mpf(delta) + mp.mpf(self.b_doubleprime)

    def bound(self, delta, M):
        return (self.xi_bound(delta)
                + mp.pi * mp.exp(mp.mpf(M) / 2)
                / (2 * mp.mpf(delta) * mp.sqrt(1 - mp.pi ** 2 / 24)))


# Frozen from calibrate_envelope over N in {7, 15, 41}, delta in
# [0.15, 1.4], Re z in [-8, 8] (with 25% headroom); regression-guarded in
# the test suite.
DEFAULT_ENVELOPE = ErrorEnvelope(b_prime=0.2625, b_doubleprime=0.3283)


def calibrate_envelope(ctx: PrecisionContext,
                       n_values=(7, 15, 41),
                       deltas=(0.15, 0.3, 0.6, 1.0, 1.4),
                       re_values=(-8, -4, -1, 0, 1, 4, 8),
                       headroom: float = 1.25) -> ErrorEnvelope:
    """Fit (B', B'') so that |Xi_N(z)| <= B'/delta + B'' on the scanned
    strips, with multiplicative headroom."""
    with ctx.workdps():
        worst = {}
        for N in n_values:
            for d in deltas:
                lo = mp.mpf(d) - mp.pi / N
                hi = 2 * mp.pi - mp.mpf(d) - mp.pi / N
                for y in (lo, (lo + hi) / 2, hi):
                    for x in re_values:
                        v = abs(xi_n(mp.mpc(x, y), N, ctx))
                        worst[d] = max(worst.get(d, mp.mpf(0)), v)
        # B'' from the widest strip, B' to dominate the rest
        dmax = max(worst)
        b2 = worst[dmax]
        b1 = max((worst[d] - b2) * mp.mpf(d) for d in worst)
        b1 = max(b1, mp.mpf(0))
        return ErrorEnvelope(b_prime=float(b1 * headroom),
                             b_doubleprime=float(b2 * headroom))
