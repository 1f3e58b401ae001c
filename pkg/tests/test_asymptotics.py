import mpmath as mp
import pytest

from qhilab import asymptotics as asy
from qhilab import gluing as gl
from qhilab import statesum as ss
from qhilab.asymptotics import (ContourParams, Potential, PotentialKind,
                                Scenario)
from qhilab.errors import (ContourInvalid, DegenerateInput, IllConditioned)
from qhilab.precision import PrecisionContext

CTX = PrecisionContext(digits=30)
QCTX = PrecisionContext(digits=26, quad_rel_tol=1e-10)

PA_MINUS = Potential.case_a(PotentialKind.MINUS)
PA_PLUS = Potential.case_a(PotentialKind.PLUS)
PB_MINUS = Potential.case_b(PotentialKind.MINUS)
PB_PLUS = Potential.case_b(PotentialKind.PLUS)


class TestPotentials:
    def test_case_a_minus_on_axis_is_clausen(self):
        from qhilab.dilog import clausen2
        for t in ("0.7", "2.2", "5.1"):
            t = mp.mpf(t)
            val = asy.potential_eval(PA_MINUS, mp.mpc(0, t), CTX)
            assert abs(mp.im(val) - clausen2(t, CTX)) < CTX.eps(6)

    def test_saddle_values(self):
        z_am = asy.saddle_points(PA_MINUS, CTX)
        z_bp = asy.saddle_points(PB_PLUS, CTX)
        z_bm = asy.saddle_points(PB_MINUS, CTX)
        assert abs(z_am - 1j * mp.pi / 3) < mp.mpf("1e-12")
        assert abs(z_bp - mp.log((mp.sqrt(5) - 1) / 2)) < mp.mpf("1e-12")
        assert abs(z_bm - mp.log((mp.sqrt(5) + 1) / 2) - 1j * mp.pi) \
            < mp.mpf("1e-12")

    def test_case_a_plus_saddle(self):
        assert abs(asy.saddle_points(PA_PLUS, CTX) + 1j * mp.pi / 3) \
            < mp.mpf("1e-12")

    def test_saddles_zero_first_derivative(self):
        for pot in (PA_MINUS, PA_PLUS, PB_MINUS, PB_PLUS):
            z0 = asy.saddle_points(pot, CTX)
            assert abs(asy.potential_d1(pot, z0, CTX)) < CTX.eps(8)

    def test_potential_values_at_saddles(self):
        f_bp = asy.potential_eval(PB_PLUS, asy.saddle_points(PB_PLUS, CTX),
                                  CTX)
        f_bm = asy.potential_eval(PB_MINUS, asy.saddle_points(PB_MINUS, CTX),
                                  CTX)
        assert abs(f_bp - mp.pi ** 2 / 10) < mp.mpf("1e-12")
        assert abs(f_bm - 9 * mp.pi ** 2 / 10) < mp.mpf("1e-12")

    def test_second_derivatives(self):
        d_am = asy.second_derivative(PA_MINUS,
                                     asy.saddle_points(PA_MINUS, CTX), CTX)
        d_bp = asy.second_derivative(PB_PLUS,
                                     asy.saddle_points(PB_PLUS, CTX), CTX)
        d_bm = asy.second_derivative(PB_MINUS,
                                     asy.saddle_points(PB_MINUS, CTX), CTX)
        assert abs(d_am - (1 + mp.expjpi(mp.mpf(1) / 3))) < CTX.eps(8)
        assert abs(d_bp - (5 + mp.sqrt(5)) / 2) < mp.mpf("1e-12")
        assert abs(d_bm - (5 - mp.sqrt(5)) / 2) < mp.mpf("1e-12")

    def test_lemma_curve_recovery(self):
        # minus-saddle of the u data and plus-saddle of the v data land on
        # the gluing curve; symmetric datum plus perturbations keeping
        # -2 l0u - l1u - 2 l0v - l1v = 0 (mod 2 pi i)
        import random
        rng = random.Random(41)
        data = [(
            -2j * mp.pi, 1j * mp.pi, 2j * mp.pi, -1j * mp.pi)]
        for _ in range(5):
            d1 = mp.mpc(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2))
            d2 = mp.mpc(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2))
            d3 = mp.mpc(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2))
            d4 = -2 * d1 - d2 - 2 * d3
            data.append((-2j * mp.pi + d1, 1j * mp.pi + d2,
                         2j * mp.pi + d3, -1j * mp.pi + d4))
        for l0u, l1u, l0v, l1v in data:
            zu = asy.saddle_points(
                Potential(PotentialKind.MINUS, l0u, l1u), CTX)
            zv = asy.saddle_points(
                Potential(PotentialKind.PLUS, l0v, l1v), CTX)
            u0 = mp.exp(l0u + zu)
            v0 = mp.exp(l0v + zv)
            resid = abs(u0 ** 2 * v0 ** 2 - (1 - u0) * (1 - v0))
            assert resid < CTX.eps(8)


class TestContours:
    def test_rectangle_closed(self):
        c = asy.build_contour(Scenario.RECTANGLE, 15, QCTX)
        assert c.is_closed
        assert len(c.vertices) == 5

    def test_case_b_plus_has_saddle_vertical(self):
        c = asy.build_contour(Scenario.CASE_B_PLUS, 101, QCTX)
        a_pt = mp.log((mp.sqrt(5) - 1) / 2)
        assert any(abs(v - a_pt) < 1e-20 for v in c.vertices)

    def test_alpha_windows_enforced(self):
        with pytest.raises(ContourInvalid):
            asy.build_contour(Scenario.VERTICAL, 15, QCTX,
                              ContourParams(alpha_minus=1.2))
        with pytest.raises(ContourInvalid):
            asy.build_contour(Scenario.VERTICAL, 15, QCTX,
                              ContourParams(alpha_plus=2.5))

    def test_case_a_plus_x_guard(self):
        with pytest.raises(ContourInvalid):
            asy.build_contour(Scenario.CASE_A_PLUS, 15, QCTX,
                              ContourParams(x=-1.0))

    def test_sign_conditions_sampled(self):
        # building runs the Im f < 0 samples; these should all pass with
        # the default deformation parameters
        for scen in (Scenario.CASE_A_PLUS, Scenario.CASE_B_PLUS,
                     Scenario.CASE_B_MINUS):
            asy.build_contour(scen, 31, QCTX)


class TestClassicalIntegral:
    def test_contour_independence_case_a_plus(self):
        # vertical route (needs the cancellation digits) vs deformed route
        ctx_v = PrecisionContext(digits=45, quad_rel_tol=1e-10)
        ctx_d = PrecisionContext(digits=25, quad_rel_tol=1e-8)
        s_m, s_p = 0.3 * mp.pi / 51, 1.5 * mp.pi / 51
        a = asy.classical_integral(PA_PLUS, 51, s_m, s_p, ctx_v,
                                   route="vertical")
        b = asy.classical_integral(PA_PLUS, 51, s_m, s_p, ctx_d,
                                   route="deformed")
        assert abs(a - b) / abs(b) < 1e-7

    def test_auto_route_switches(self):
        # case (b) at large N must refuse the cancelling vertical route
        ctx = PrecisionContext(digits=25, quad_rel_tol=1e-8)
        val = asy.classical_integral(PB_PLUS, 601, 0.05 * mp.pi / 601,
                                     1.5 * mp.pi / 601, ctx, route="auto")
        pred = asy.spm_prediction(PB_PLUS, 601, ctx)
        assert abs(abs(val) - pred.amplitude) / pred.amplitude < 0.05

    def test_case_a_minus_growth(self, volume):
        ctx = PrecisionContext(digits=30, quad_rel_tol=1e-10)
        val = asy.classical_integral(PA_MINUS, 301, 0.3 * mp.pi / 301,
                                     1.5 * mp.pi / 301, ctx)
        growth = 2 * mp.pi / 301 * mp.log(abs(val))
        assert abs(growth - volume / 2) < 0.05

    def test_window_validation(self):
        with pytest.raises(ValueError):
            asy.classical_integral(PA_MINUS, 15, 0.5, 3 * mp.pi / 15, CTX)


class TestPredictions:
    def test_spm_constants(self):
        sp = asy.spm_prediction(PB_PLUS, 2001, CTX)
        sm = asy.spm_prediction(PB_MINUS, 2001, CTX)
        want_p = 2 * mp.pi / mp.sqrt((5 + mp.sqrt(5)) / 2)
        want_m = 2 * mp.pi / mp.sqrt((5 - mp.sqrt(5)) / 2)
        assert abs(sp.amplitude * mp.sqrt(2001) - want_p) < mp.mpf("1e-12")
        assert abs(sm.amplitude * mp.sqrt(2001) - want_m) < mp.mpf("1e-12")
        assert abs(float(want_p) - 3.303) < 5e-4
        assert abs(float(want_m) - 5.34) < 5e-3

    def test_spm_phase_slopes(self):
        sp = asy.spm_prediction(PB_PLUS, 101, CTX)
        sm = asy.spm_prediction(PB_MINUS, 101, CTX)
        assert abs(sp.phase_slope + mp.pi / 20) < mp.mpf("1e-12")
        assert abs(sm.phase_slope + 9 * mp.pi / 20) < mp.mpf("1e-12")

    def test_spm_case_a_growth_rate(self, volume):
        pred = asy.spm_prediction(PA_MINUS, 501, CTX)
        growth = 2 * mp.pi / 501 * mp.log(pred.amplitude)
        # amplitude carries exp((N/2 pi) Im f(z0)) = exp((N/2 pi) Vol/2)
        assert abs(growth - volume / 2) < 0.05

    def test_perron_toy_endpoint(self):
        # int_0^1 e^{-nz} dz = (1 - e^{-n})/n; endpoint rule with
        # f = -i z (max of Im f at the start z0 = 0), g = 1: prediction 1/n
        for n in (10, 100, 1000):
            exact = (1 - mp.exp(-n)) / n
            pred = asy.perron_prediction(1, -1j, 0, n)
            assert abs(pred - mp.mpf(1) / n) < mp.mpf("1e-25")
            assert abs(exact - pred) / abs(exact) < 2 * mp.exp(-n) + 1e-20

    def test_perron_zero_numerator(self):
        assert asy.perron_prediction(0, -1j, 0, 50) == 0

    def test_perron_degenerate(self):
        with pytest.raises(DegenerateInput):
            asy.perron_prediction(1, 0, 0, 50)

    def test_perron_tail_against_quadrature(self):
        # endpoint-dominated tail of the quantum-style integrand
        # rho(z) e^{n(-i) f_+}: the boundary terms rho/(i f' n) at the two
        # ends reproduce the quadrature within 10% at N = 401.  The upper
        # end carries the dominant term rho(i t)/(-i Log|2 sin(t/2)|)/n
        # (with a minus sign: the contour ends at the maximum of Im f).
        N = 401
        ctx = PrecisionContext(digits=30, quad_rel_tol=1e-12)
        p = gl.complete_point(ctx)
        colors = gl.colors_from_weights(4, 4j * mp.pi, 0, ctx)
        q = gl.quantum_lift(p, colors, N, ctx)
        from qhilab.asymptotics import _rho_factor
        n = mp.mpf(N) / (2 * mp.pi)

        def integrand(z):
            return _rho_factor(q, z, ctx) * mp.exp(
                n * (-1j) * asy.potential_eval(PB_PLUS, z, ctx))

        def pred_at(z0):
            return asy.perron_prediction(
                _rho_factor(q, z0, ctx), asy.potential_d1(PB_PLUS, z0, ctx),
                asy.potential_eval(PB_PLUS, z0, ctx), n)

        from qhilab.quadrature import integrate_polyline
        a, b = mp.mpc(0, "0.1"), mp.mpc(0, "0.55")
        quad = integrate_polyline(integrand, [a, b], ctx,
                                  panels=32, order=16)
        assert abs(quad - (pred_at(a) - pred_at(b))) / abs(quad) < 0.10
        # the upper boundary term dominates: f'(b) = -Log|2 sin(t/2)| + ...
        assert abs(quad + pred_at(b)) / abs(quad) < 0.10


class TestQuantumIntegral:
    def test_matches_state_sum_case_a(self):
        ctx = PrecisionContext(digits=30, quad_rel_tol=1e-10)
        p = gl.complete_point(ctx)
        colors = gl.colors_from_weights(4, 2j * mp.pi, 0, ctx)
        q = gl.quantum_lift(p, colors, 15, ctx)
        r = asy.quantum_integral(q, ctx)
        direct = ss.sigma_n(q.uq[0], q.uq[1], 15, ctx)
        assert abs(r.sigma - direct) / abs(direct) < 1e-8
        assert r.rho_samples

    def test_matches_state_sum_case_b(self):
        ctx = PrecisionContext(digits=30, quad_rel_tol=1e-9)
        p = gl.complete_point(ctx)
        colors = gl.colors_from_weights(4, 4j * mp.pi, 0, ctx)
        q = gl.quantum_lift(p, colors, 15, ctx)
        r = asy.quantum_integral(q, ctx)
        direct = ss.sigma_n(q.uq[0], q.uq[1], 15, ctx)
        assert abs(r.sigma - direct) / abs(direct) < 1e-6


class TestGrowthFits:
    def test_exact_model_recovery(self):
        pairs = []
        with mp.workdps(40):
            for n in range(11, 241, 6):
                growth = mp.mpf("2.03") + 5 * mp.log(n) / n - mp.mpf(1) / n
                value = mp.exp(growth * n / (2 * mp.pi))
                pairs.append((n, value))
        series = asy.GrowthSeries.from_values(pairs, CTX)
        fit = asy.growth_fit(series)
        assert abs(fit.c0 - 2.03) < 1e-10
        assert abs(fit.c1 - 5) < 1e-8
        assert abs(fit.c2 + 1) < 1e-8
        assert series.fit is fit

    def test_growth_column_validates(self):
        series = asy.GrowthSeries.from_values([(5, 10), (7, 11)], CTX)
        for row in series.rows:
            want = 2 * mp.pi / row.n * mp.log(abs(row.value))
            assert abs(row.growth - want) < mp.mpf("1e-25")

    def test_kashaev_extrapolation(self, volume):
        pairs = [(n, ss.kashaev(n, CTX)) for n in range(101, 502, 20)]
        series = asy.GrowthSeries.from_values(pairs, CTX)
        fit = asy.growth_fit(series)
        assert abs(fit.c0 - float(volume)) < 0.02

    def test_ill_conditioned(self):
        pairs = [(101, 2.0), (101, 2.0), (101, 2.0), (101, 2.0)]
        series = asy.GrowthSeries.from_values(pairs, CTX)
        with pytest.raises(IllConditioned):
            asy.growth_fit(series)

    def test_pm_algebra(self):
        # growth of f*g and f+g equals the growth of f when g has
        # polynomial modulus (fit tolerance)
        a = 1.37
        pairs_mul, pairs_add = [], []
        with mp.workdps(40):
            for n in range(51, 402, 14):
                f = mp.exp(mp.mpf(a) * n / (2 * mp.pi))
                g = 7 * mp.mpf(n) ** mp.mpf("1.3")
                pairs_mul.append((n, f * g))
                pairs_add.append((n, f + g))
        for pairs in (pairs_mul, pairs_add):
            fit = asy.growth_fit(asy.GrowthSeries.from_values(pairs, CTX))
            assert abs(fit.c0 - a) < 0.02


class TestPmCheck:
    def test_sqrt_n_is_pm(self):
        vals = [(n, mp.sqrt(n)) for n in range(11, 400, 8)]
        ok, beta, resid = asy.pm_check(vals, return_details=True)
        assert ok
        assert abs(beta - 0.5) < 1e-6

    def test_exponential_is_not_pm(self):
        vals = [(n, mp.exp(n)) for n in range(11, 200, 8)]
        assert not asy.pm_check(vals)

    def test_s_hat_at_l0_is_pm(self, complete, colors_a):
        # the quantum dilogarithm at the normalized log-parameter stays of
        # polynomial modulus along a case (a) family
        from qhilab.dilog import s_hat
        ctx = PrecisionContext(digits=25, quad_rel_tol=1e-8)
        vals = []
        for n in (21, 51, 101, 201, 401):
            q = gl.quantum_lift(complete, colors_a, n, ctx)
            vals.append((n, s_hat(q.l0u, n, ctx)))
        ok, beta, resid = asy.pm_check(vals, return_details=True)
        assert ok

    def test_small_segment_estimate(self):
        # s * exp((N/2 pi) Cl2(s)) at s = alpha pi/N stays below
        # Const / N^{1 - alpha/2} over a grid
        from qhilab.dilog import clausen2
        for alpha in (mp.mpf("0.25"), mp.mpf("0.5"), mp.mpf("0.75")):
            const = (alpha * mp.pi) ** (1 - alpha / 2) \
                * mp.exp(alpha / 2 * (mp.log(2) + 1))
            for n in (21, 101, 501, 2001):
                s = alpha * mp.pi / n
                val = s * mp.exp(n / (2 * mp.pi) * clausen2(s, CTX))
                assert val <= const / mp.mpf(n) ** (1 - alpha / 2)
