import random

import mpmath as mp
import pytest

from qhilab import gluing as gl
from qhilab import statesum as ss
from qhilab.dilog import omega_factors
from qhilab.errors import PoleOnContour
from qhilab.precision import PrecisionContext, context_for_level

CTX = PrecisionContext(digits=30)


def random_lifts(n_level, count=5, seed=2026):
    """Deterministic family of valid quantum points: random curve points
    near the complete one (Im u0 > 0, Im v0 < 0 branch) with assorted
    admissible weights."""
    rng = random.Random(seed)
    lifts = []
    while len(lifts) < count:
        a0 = 2 * rng.randrange(2, 5)
        k = rng.randrange(-2, 4)
        m = rng.randrange(-2, 3)
        colors = gl.colors_from_weights(a0, 2j * mp.pi * k, 1j * mp.pi * m,
                                        CTX)
        u0 = mp.expjpi(mp.mpf(1) / 3) \
            + mp.mpc(rng.uniform(-0.15, 0.15), rng.uniform(-0.1, 0.2))
        branch = [r for r in gl.solve_curve(u0, CTX) if mp.im(r.v0) < 0]
        if not branch:
            continue
        lifts.append(gl.quantum_lift(branch[0], colors, n_level, CTX))
    return lifts


class TestSigma:
    def test_beta_zero_term_is_one(self, complete, colors_a):
        q = gl.quantum_lift(complete, colors_a, 5, CTX)
        first = next(omega_factors(q.uq[0], 1 / q.uq[1], 5, CTX, 0))
        assert first == 1

    def test_matches_bruteforce_complete(self, complete, colors_a):
        q = gl.quantum_lift(complete, colors_a, 5, CTX)
        fast = ss.sigma_n(q.uq[0], q.uq[1], 5, CTX)
        slow = ss.sigma_n_bruteforce(q.uq[0], q.uq[1], 5, CTX)
        assert abs(fast - slow) / abs(fast) < CTX.eps(10)

    @pytest.mark.parametrize("n_level", [3, 9, 15])
    def test_matches_bruteforce_random_lifts(self, n_level):
        for q in random_lifts(n_level, count=5):
            fast = ss.sigma_n(q.uq[0], q.uq[1], n_level, CTX)
            slow = ss.sigma_n_bruteforce(q.uq[0], q.uq[1], n_level, CTX)
            assert abs(fast - slow) / abs(fast) < CTX.eps(10)

    def test_matches_s_hat_route(self, complete, colors_a):
        for N in (5, 9):
            q = gl.quantum_lift(complete, colors_a, N, CTX)
            a = ss.sigma_n(q.uq[0], q.uq[1], N, CTX)
            b = ss.sigma_n_via_s_hat(q.l0u, q.l1u, N, CTX)
            assert abs(a - b) / abs(a) < CTX.eps(10)

    def test_l1_translation_invariance(self, complete, colors_a):
        # the quantum-dilogarithm route depends on l1 only mod 2 i pi
        N = 7
        q = gl.quantum_lift(complete, colors_a, N, CTX)
        a = ss.sigma_n_via_s_hat(q.l0u, q.l1u, N, CTX)
        b = ss.sigma_n_via_s_hat(q.l0u, q.l1u + 2j * mp.pi, N, CTX)
        assert abs(a - b) / abs(a) < CTX.eps(10)


class TestReduced:
    @pytest.mark.parametrize("n_level", [3, 5, 7])
    def test_matches_double_sum(self, complete, colors_a, n_level):
        q = gl.quantum_lift(complete, colors_a, n_level, CTX)
        a = ss.reduced_qhi(q, CTX)
        b = ss.reduced_qhi_bruteforce(q, CTX)
        assert abs(a - b) / abs(a) < CTX.eps(10)

    def test_matches_double_sum_random_lift(self):
        q = random_lifts(7, count=1, seed=5)[0]
        a = ss.reduced_qhi(q, CTX)
        b = ss.reduced_qhi_bruteforce(q, CTX)
        assert abs(a - b) / abs(a) < CTX.eps(10)

    def test_case_a_growth_near_volume(self, complete, colors_a, volume):
        ctx = context_for_level(201)
        q = gl.quantum_lift(complete, colors_a, 201, ctx)
        r = ss.full_qhi(q, ctx)
        assert abs(r.growth - volume) < 0.15


class TestFull:
    def test_defect_modulus_formula(self, colors_a):
        # (2 pi/N) Log|defect| = -pi (N-1)/N^2 Re(Log u0 + Log v0), exactly
        q = random_lifts(9, count=1, seed=12)[0]
        r = ss.full_qhi(q, CTX)
        lhs = 2 * mp.pi / q.N * mp.log(abs(r.defect))
        rhs = -mp.pi * (q.N - 1) / q.N ** 2 \
            * mp.re(mp.log(q.base.u0) + mp.log(q.base.v0))
        assert abs(lhs - rhs) < CTX.eps(8)

    def test_defect_modulus_one_at_complete(self, complete, colors_a):
        q = gl.quantum_lift(complete, colors_a, 7, CTX)
        r = ss.full_qhi(q, CTX)
        assert abs(abs(r.defect) - 1) < CTX.eps(8)

    def test_full_modulus_identity(self, complete, colors_b):
        q = gl.quantum_lift(complete, colors_b, 7, CTX)
        r = ss.full_qhi(q, CTX)
        assert abs(r.full_modulus - abs(r.defect) * abs(r.reduced)) \
            < CTX.eps(8) * r.full_modulus
        recomputed = 2 * mp.pi / 7 * mp.log(r.full_modulus)
        assert abs(recomputed - r.growth) < CTX.eps(8)


class TestKashaev:
    def test_first_values(self):
        assert ss.kashaev(1, CTX) == 1
        assert abs(ss.kashaev(3, CTX) - mp.mpf(13) / 9) < CTX.eps(8)

    def test_strictly_increasing(self):
        prev = None
        for n in range(3, 103, 2):
            val = ss.kashaev(n, CTX)
            if prev is not None:
                assert val > prev
            prev = val

    def test_growth_toward_volume(self, volume):
        growths = [2 * mp.pi / n * mp.log(ss.kashaev(n, CTX))
                   for n in (101, 201, 301, 401, 501)]
        assert all(a < b for a, b in zip(growths, growths[1:]))
        assert growths[-1] < volume


class TestKernels:
    @pytest.mark.parametrize("n_level", [3, 5, 21, 51])
    def test_kashaev_specialization(self, n_level):
        jk = ss.j_kernel(1, 1, 0, n_level, CTX)
        kk = ss.kashaev(n_level, CTX)
        assert abs(jk - kk) / kk < CTX.eps(8)

    @pytest.mark.parametrize("n_level", [5, 7])
    def test_kernel_decomposition(self, complete, colors_a, n_level):
        q = gl.quantum_lift(complete, colors_a, n_level, CTX)
        red = ss.reduced_qhi(q, CTX)
        tot = ss.kernel_total(q, CTX)
        assert abs(tot - red) / abs(red) < CTX.eps(12)

    def test_kernel_decomposition_case_b(self, complete, colors_b):
        q = gl.quantum_lift(complete, colors_b, 5, CTX)
        red = ss.reduced_qhi(q, CTX)
        tot = ss.kernel_total(q, CTX)
        assert abs(tot - red) / abs(red) < CTX.eps(12)

    def test_index_periodicity(self, complete, colors_a):
        # raw kernel formula at index i + N: the zeta powers repeat, each
        # product range gains one full cycle (prod over a period of
        # 1 - w zeta^k is 1 - w^N, the omega-periodicity fact), and the
        # monomials gain u0^{2N} v0^{-2N}
        N = 5
        q = gl.quantum_lift(complete, colors_a, N, CTX)
        u0, v0 = q.uq[0], q.vq[0]

        def raw(i):
            zeta = lambda k: mp.expjpi(mp.mpf(2 * (k % N)) / N)
            total = mp.mpc(0)
            for j in range(N):
                num = mp.mpc(1)
                for k in range(1, i + N - j):
                    num *= 1 - v0 * zeta(k)
                den = mp.mpc(1)
                for k in range(1, i + j + 1):
                    den *= 1 - u0 * zeta(k)
                total += zeta(4 * i * j + i) * u0 ** (2 * (i + j)) \
                    * v0 ** (-2 * (i - j)) * num / den
            from qhilab.dilog import g_n
            return g_n(u0, N, CTX) / (N * g_n(v0, N, CTX)) * total

        cycle = (u0 ** (2 * N) * v0 ** (-2 * N)
                 * (1 - v0 ** N) / (1 - u0 ** N))
        for i in (0, 2):
            a = ss.j_kernel(u0, v0, i, N, CTX)
            b = raw(i + N) / cycle
            assert abs(a - b) / abs(a) < CTX.eps(8)


class TestResidue:
    @pytest.mark.parametrize("n_level", [5, 15])
    def test_identity(self, n_level):
        ctx = PrecisionContext(digits=26, quad_rel_tol=1e-10)
        p = gl.complete_point(ctx)
        colors = gl.colors_from_weights(4, 2j * mp.pi, 0, ctx)
        q = gl.quantum_lift(p, colors, n_level, ctx)
        contour = ss.residue_contour(q, ctx)
        res = ss.residue_check(q, contour, ctx)
        assert res.rel_diff < 1e-8

    def test_pole_on_contour(self, complete, colors_a):
        ctx = PrecisionContext(digits=26, quad_rel_tol=1e-10)
        q = gl.quantum_lift(complete, colors_a, 5, ctx)
        contour = ss.residue_contour(q, ctx, s_minus=1e-30)
        with pytest.raises(PoleOnContour):
            ss.residue_check(q, contour, ctx)

    def test_error_scales_with_tolerance(self, complete, colors_a):
        # rel_diff tracks quad_rel_tol (coarse tolerance, coarse error)
        rels = []
        for tol in (1e-4, 1e-8):
            ctx = PrecisionContext(digits=26, quad_rel_tol=tol)
            q = gl.quantum_lift(complete, colors_a, 7, ctx)
            contour = ss.residue_contour(q, ctx)
            rels.append(ss.residue_check(q, contour, ctx).rel_diff)
        assert rels[1] <= rels[0]
        assert rels[1] < 1e-8 * 100
