"""State sums, the reduced and full invariants, and exact cross-checks.

The level-N invariant of the figure-eight complement factors as a
symmetry-defect monomial times the reduced invariant

    H_N = (uq0^{-1} vq0^{-1})^{(N-1)/2} * H_N^red,
    H_N^red = g_N(uq0) conj(g_N(vq0*)) / |g_N(1)|^2
              * Sigma_N(uq0, uq1) * conj(Sigma_N(vq0*, vq1*)),

with the one-tetrahedron sum Sigma_N(x0, x1) = sum_beta zeta^{beta^2}
omega_N(x0, x1^{-1} | beta).  This module also provides the Kashaev
invariant, the discrete kernels J_N that decompose H_N^red, and the
residue-theorem identity expressing Sigma_N as a rectangle contour
integral of the shifted quantum dilogarithm.

Phases of the invariants are meaningful only modulo 2N-th roots of unity;
all verified quantities are moduli (phases are still reported).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import mpmath as mp

from .contours import Contour, contour_integral, oscillation_panels
from .dilog import g_n, log_s_hat, omega, omega_factors, s_hat
from .errors import DivisionByZero
from .gluing import QuantumGluingPoint, boundary_weight
from .precision import PrecisionContext

__all__ = [
    "StateSumResult", "sigma_n", "sigma_n_bruteforce", "sigma_n_via_s_hat",
    "reduced_qhi", "reduced_qhi_bruteforce", "full_qhi",
    "kashaev", "j_kernel", "kernel_total",
    "residue_contour", "residue_check", "ResidueCheckResult",
]


def _zeta_pow(N: int):
    """Table of zeta^j = e^{2 pi i j/N}, j = 0..N-1, at working precision."""
    return [mp.expjpi(mp.mpf(2 * j) / N) for j in range(N)]


# ---------------------------------------------------------------------------
# The one-tetrahedron sum Sigma_N
# ---------------------------------------------------------------------------

def sigma_n(x0q, x1q, N: int, ctx: PrecisionContext):
    """Sigma_N(x0, x1) = sum_{beta=0}^{N-1} zeta^{beta^2}
    omega_N(x0, x1^{-1} | beta), via the incremental omega recurrence.

    Requires (x0, x1^{-1}) on the Fermat curve x^N + y^N = 1.
    """
    with ctx.workdps():
        x0q, x1q = mp.mpc(x0q), mp.mpc(x1q)
        zt = _zeta_pow(N)
        total = mp.mpc(0)
        for beta, om in enumerate(omega_factors(x0q, 1 / x1q, N, ctx,
                                                N - 1)):
            total += zt[(beta * beta) % N] * om
        return total


def sigma_n_bruteforce(x0q, x1q, N: int, ctx: PrecisionContext):
    """O(N^2) oracle: each omega factor evaluated independently as a
    literal product, phases as e^{2 pi i beta^2/N} without mod-N reduction."""
    with ctx.workdps():
        x0q, x1q = mp.mpc(x0q), mp.mpc(x1q)
        y = 1 / x1q
        total = mp.mpc(0)
        for beta in range(N):
            om = mp.mpc(1)
            for j in range(1, beta + 1):
                om *= y / (1 - x0q * mp.expjpi(mp.mpf(2 * j) / N))
            total += mp.expjpi(mp.mpf(2 * beta * beta) / N) * om
        return total


def sigma_n_via_s_hat(l0, l1, N: int, ctx: PrecisionContext):
    """Sigma_N from the shifted quantum dilogarithm:
    1 + (1/S_N(l0)) sum_{beta>=1} zeta^{beta^2} e^{-l1 beta}
    S_N(l0 + 2 beta i pi/N)."""
    with ctx.workdps():
        l0, l1 = mp.mpc(l0), mp.mpc(l1)
        zt = _zeta_pow(N)
        log_s0 = log_s_hat(l0, N, ctx)
        total = mp.mpc(1)
        for beta in range(1, N):
            term = (zt[(beta * beta) % N] * mp.exp(-l1 * beta)
                    * mp.exp(log_s_hat(l0 + 2j * mp.pi * beta / N, N, ctx)
                             - log_s0))
            total += term
        return total


# ---------------------------------------------------------------------------
# Reduced and full invariants
# ---------------------------------------------------------------------------

def reduced_qhi(q: QuantumGluingPoint, ctx: PrecisionContext):
    """H_N^red = g_N(uq0) conj(g_N(conj(vq0))) / |g_N(1)|^2 *
    Sigma_N(uq0, uq1) * conj(Sigma_N(conj(vq0), conj(vq1)))."""
    with ctx.workdps():
        N = q.N
        gu = g_n(q.uq[0], N, ctx)
        gvs = g_n(mp.conj(q.vq[0]), N, ctx)
        g1 = g_n(1, N, ctx)
        su = sigma_n(q.uq[0], q.uq[1], N, ctx)
        svs = sigma_n(mp.conj(q.vq[0]), mp.conj(q.vq[1]), N, ctx)
        return (gu * mp.conj(gvs) / abs(g1) ** 2) * su * mp.conj(svs)


def reduced_qhi_bruteforce(q: QuantumGluingPoint, ctx: PrecisionContext):
    """Independent oracle: the literal double sum over (alpha, beta) of
    zeta^{beta^2 - alpha^2} omega_N(uq0, uq1^{-1}|beta)
    conj(omega_N(vq0*, (vq1*)^{-1}|alpha)), same normalization."""
    with ctx.workdps():
        N = q.N
        u0, u1 = q.uq[0], q.uq[1]
        v0s, v1s = mp.conj(q.vq[0]), mp.conj(q.vq[1])
        total = mp.mpc(0)
        for beta in range(N):
            om_b = omega(u0, 1 / u1, beta, N, ctx)
            for alpha in range(N):
                om_a = omega(v0s, 1 / v1s, alpha, N, ctx)
                total += (mp.expjpi(mp.mpf(2 * (beta * beta
                                               - alpha * alpha)) / N)
                          * om_b * mp.conj(om_a))
        gu = g_n(u0, N, ctx)
        gvs = g_n(v0s, N, ctx)
        g1 = g_n(1, N, ctx)
        return gu * mp.conj(gvs) / abs(g1) ** 2 * total


@dataclass
class StateSumResult:
    """One full-invariant evaluation at level N."""
    N: int
    sigma_u: mp.mpc
    sigma_vstar: mp.mpc
    g_u0: mp.mpc
    g_v0star: mp.mpc
    reduced: mp.mpc
    defect: mp.mpc
    full_modulus: mp.mpf
    growth: mp.mpf
    digits_used: int
    seconds: float

    @property
    def value(self) -> mp.mpc:
        return self.defect * self.reduced


def full_qhi(q: QuantumGluingPoint, ctx: PrecisionContext) -> StateSumResult:
    """Defect monomial (uq0^{-1} vq0^{-1})^{(N-1)/2} times the reduced
    invariant; growth statistic (2 pi/N) Log of the modulus."""
    t0 = time.perf_counter()
    with ctx.workdps():
        N = q.N
        gu = g_n(q.uq[0], N, ctx)
        gvs = g_n(mp.conj(q.vq[0]), N, ctx)
        g1 = g_n(1, N, ctx)
        su = sigma_n(q.uq[0], q.uq[1], N, ctx)
        svs = sigma_n(mp.conj(q.vq[0]), mp.conj(q.vq[1]), N, ctx)
        reduced = (gu * mp.conj(gvs) / abs(g1) ** 2) * su * mp.conj(svs)
        defect = (1 / (q.uq[0] * q.vq[0])) ** ((N - 1) // 2)
        full_modulus = abs(defect) * abs(reduced)
        growth = 2 * mp.pi / N * mp.log(full_modulus)
        return StateSumResult(
            N=N, sigma_u=su, sigma_vstar=svs, g_u0=gu, g_v0star=gvs,
            reduced=reduced, defect=defect, full_modulus=full_modulus,
            growth=growth, digits_used=ctx.digits,
            seconds=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Kashaev invariant and discrete kernels
# ---------------------------------------------------------------------------

def kashaev(N: int, ctx: PrecisionContext):
    """<K>_N = sum_{j=0}^{N-1} prod_{k=1}^{j} |1 - zeta^k|^{-2}, positive."""
    if N < 1:
        raise ValueError("N must be >= 1")
    with ctx.workdps():
        total = mp.mpf(1)
        term = mp.mpf(1)
        for j in range(1, N):
            term /= 2 - 2 * mp.cospi(mp.mpf(2 * j) / N)
            total += term
        return total


def j_kernel(u0q, v0q, i: int, N: int, ctx: PrecisionContext):
    """Discrete kernel J_N(u0, v0 | i) = g_N(u0)/(N g_N(v0)) * sum_j
    zeta^{4ij+i} u0^{2(i+j)} v0^{-2(i-j)}
    prod_{k=1}^{i+N-j-1}(1 - v0 zeta^k) / prod_{k=1}^{i+j}(1 - u0 zeta^k).

    J_N(1, 1 | 0) is the Kashaev invariant.
    """
    if not 0 <= i < N:
        raise ValueError("kernel index i must satisfy 0 <= i < N")
    with ctx.workdps():
        u0q, v0q = mp.mpc(u0q), mp.mpc(v0q)
        zt = _zeta_pow(N)
        tiny = ctx.pole_tol

        def zeta(k):
            return zt[k % N]

        # prefix products; j = 0 start, then one multiply / divide per step
        den = mp.mpc(1)
        for k in range(1, i + 1):
            den *= 1 - u0q * zeta(k)
        num = mp.mpc(1)
        for k in range(1, i + N):
            num *= 1 - v0q * zeta(k)
        total = mp.mpc(0)
        u2 = u0q ** 2
        v2 = v0q ** 2
        upow = u2 ** i
        vpow = v2 ** -i
        for j in range(N):
            if abs(den) < tiny:
                raise DivisionByZero(
                    f"kernel denominator vanishes at j={j}")
            total += zeta(4 * i * j + i) * upow * vpow * num / den
            if j == N - 1:
                break
            # advance j -> j+1: one more u factor, one fewer v factor
            den *= 1 - u0q * zeta(i + j + 1)
            if i + N - j - 1 >= 1:
                f = 1 - v0q * zeta(i + N - j - 1)
                if abs(f) < tiny:
                    raise DivisionByZero(
                        f"kernel numerator factor vanishes at j={j}")
                num /= f
            upow *= u2
            vpow *= v2
        return g_n(u0q, N, ctx) / (N * g_n(v0q, N, ctx)) * total


def kernel_total(q: QuantumGluingPoint, ctx: PrecisionContext):
    """Kernel decomposition sum_{i=0}^{N-1} kappa(lambda)^{-i}
    J_N(uq0, vq0 | i); equals the reduced invariant."""
    with ctx.workdps():
        kl, _ = boundary_weight(q)
        kinv = 1 / kl
        total = mp.mpc(0)
        kpow = mp.mpc(1)
        for i in range(q.N):
            total += kpow * j_kernel(q.uq[0], q.vq[0], i, q.N, ctx)
            kpow *= kinv
        return total


# ---------------------------------------------------------------------------
# Residue-theorem cross-check (state sum vs rectangle integral)
# ---------------------------------------------------------------------------

def residue_contour(q: QuantumGluingPoint, ctx: PrecisionContext,
                    eps=None, s_minus=None, s_plus=None,
                    order: int = 24) -> Contour:
    """Closed rectangle |Re z| <= eps, s_minus <= Im z <= 2 pi - s_plus,
    counterclockwise, with the coth and S_N pole registries populated.

    Defaults: eps = pi/N, s_minus = pi/(2N), s_plus = 3 pi/(2N).  Panel
    counts resolve the e^{(N/2 i pi) z^2} oscillation at the given
    Gauss-Legendre order.
    """
    with ctx.workdps():
        N = q.N
        eps = mp.mpf(eps) if eps is not None else mp.pi / N
        s_minus = mp.mpf(s_minus) if s_minus is not None else mp.pi / (2 * N)
        s_plus = mp.mpf(s_plus) if s_plus is not None else 3 * mp.pi / (2 * N)
        lo, hi = s_minus, 2 * mp.pi - s_plus
        verts = [mp.mpc(eps, lo), mp.mpc(eps, hi), mp.mpc(-eps, hi),
                 mp.mpc(-eps, lo), mp.mpc(eps, lo)]
        vert_panels = oscillation_panels(
            verts[:2], N, order=order, rel_tol=float(ctx.quad_rel_tol))[0]
        horiz_panels = 4
        # poles of coth(Nz/2) at 2 i pi beta / N and of S_N(l0 + z) at
        # 2 i pi - l0 + 2 i p pi/N
        poles = [2j * mp.pi * beta / N for beta in range(0, N + 1)]
        p0 = 2j * mp.pi - q.l0u
        while mp.im(p0) < hi + mp.pi / N:
            poles.append(p0)
            p0 += 2j * mp.pi / N
        return Contour(vertices=verts,
                       panels_per_segment=[vert_panels, horiz_panels,
                                           vert_panels, horiz_panels],
                       poles=poles)


@dataclass
class ResidueCheckResult:
    lhs: mp.mpc
    rhs: mp.mpc
    rel_diff: mp.mpf


def residue_check(q: QuantumGluingPoint, contour: Contour,
                  ctx: PrecisionContext,
                  order: int = 24) -> ResidueCheckResult:
    """Exact identity (residue theorem): Sigma_N(uq0, uq1) equals

      1 + (1/S_N(l0)) (N/4 i pi) oint e^{(N/2 i pi)(z^2 - l1 z)}
          S_N(l0 + z) coth(Nz/2) dz

    along the rectangle.  Quadrature is the only error source.
    """
    with ctx.workdps():
        N = q.N
        l0, l1 = q.l0u, q.l1u
        pref = N / (4j * mp.pi)

        def integrand(z):
            return (mp.exp(N / (2j * mp.pi) * (z * z - l1 * z))
                    * s_hat(l0 + z, N, ctx)
                    * mp.coth(N * z / 2))

        lhs = sigma_n(q.uq[0], q.uq[1], N, ctx)
        integral = contour_integral(integrand, contour, ctx, order=order,
                                    pole_clearance=mp.pi / (8 * N))
        rhs = 1 + mp.exp(-log_s_hat(l0, N, ctx)) * pref * integral
        rel = abs(lhs - rhs) / abs(lhs)
        return ResidueCheckResult(lhs=lhs, rhs=rhs, rel_diff=rel)
