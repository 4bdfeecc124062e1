import math

import mpmath as mp
import numpy as np
import pytest

from casimir.numerics import (
    MatsubaraGrid,
    QuadratureResult,
    bessel_i_derivative,
    bessel_k_derivative,
    integrate_semiinfinite,
    log_bessel_i_all,
    log_bessel_k_all,
    log_det_one_minus,
    matsubara_sum,
    modified_spherical_bessel_i,
    modified_spherical_bessel_k,
)


def bessel_i_oracle(l, x, dps=60):
    """Extended-precision i_l(x) = sqrt(pi/2x) I_{l+1/2}(x)."""
    with mp.workdps(dps):
        return float(mp.sqrt(mp.pi / (2 * mp.mpf(x))) * mp.besseli(l + mp.mpf(1) / 2, x))


def bessel_k_oracle(l, x, dps=60):
    with mp.workdps(dps):
        return float(mp.sqrt(mp.pi / (2 * mp.mpf(x))) * mp.besselk(l + mp.mpf(1) / 2, x))


class TestBessel:
    def test_i0_closed_form(self):
        assert modified_spherical_bessel_i(0, 1.0) == pytest.approx(math.sinh(1.0), rel=1e-14)

    def test_i1_small_argument_series(self):
        # i_1(x) = x/3 + x^3/30 + ...; oracle value frozen from the 60-digit series
        assert modified_spherical_bessel_i(1, 0.01) == pytest.approx(
            bessel_i_oracle(1, 0.01), rel=1e-13
        )
        assert modified_spherical_bessel_i(1, 0.01) == pytest.approx(0.01 / 3, rel=1e-4)

    def test_i5_against_series_oracle(self):
        assert modified_spherical_bessel_i(5, 2.0) == pytest.approx(
            bessel_i_oracle(5, 2.0), rel=1e-12
        )

    def test_k0_closed_form(self):
        assert modified_spherical_bessel_k(0, 1.0) == pytest.approx(
            (math.pi / 2) * math.exp(-1.0), rel=1e-14
        )

    def test_k1_closed_form(self):
        # k_1(x) = (pi/2) e^{-x} (1/x + 1/x^2)
        assert modified_spherical_bessel_k(1, 1.0) == pytest.approx(
            (math.pi / 2) * math.exp(-1.0) * 2.0, rel=1e-14
        )

    def test_k4_against_oracle(self):
        assert modified_spherical_bessel_k(4, 3.0) == pytest.approx(
            bessel_k_oracle(4, 3.0), rel=1e-12
        )

    @pytest.mark.parametrize("l", [0, 1, 2, 5, 10, 20, 40, 60])
    def test_oracle_grid(self, l):
        for x in np.logspace(-3, 2, 9):
            assert modified_spherical_bessel_i(l, x) == pytest.approx(
                bessel_i_oracle(l, x), rel=1e-12
            )
            assert modified_spherical_bessel_k(l, x) == pytest.approx(
                bessel_k_oracle(l, x), rel=1e-12
            )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            modified_spherical_bessel_i(0, 0.0)
        with pytest.raises(ValueError):
            modified_spherical_bessel_k(2, -1.0)
        with pytest.raises(ValueError):
            modified_spherical_bessel_i(-1, 1.0)

    def test_overflow_signaled(self):
        with pytest.raises(OverflowError):
            modified_spherical_bessel_i(0, 710.0)

    def test_log_variants_match_plain(self):
        for x in (0.05, 2.2, 40.0, 300.0):
            logi = log_bessel_i_all(30, x)
            logk = log_bessel_k_all(30, x)
            for l in (0, 3, 17, 30):
                i_ref = bessel_i_oracle(l, x)
                k_ref = bessel_k_oracle(l, x)
                assert logi[l] == pytest.approx(math.log(i_ref), rel=1e-11, abs=1e-11)
                assert logk[l] == pytest.approx(math.log(k_ref), rel=1e-11, abs=1e-11)

    def test_log_variant_beyond_overflow(self):
        logi = log_bessel_i_all(5, 800.0)
        assert logi[0] == pytest.approx(800.0 - math.log(1600.0), rel=1e-12)

    def test_log_variant_deep_underflow(self):
        # i_40(1e-4) underflows ive; series branch must agree with mpmath
        val = log_bessel_i_all(40, 1e-4)[40]
        with mp.workdps(80):
            ref = mp.log(mp.sqrt(mp.pi / (2 * mp.mpf("1e-4")))
                         * mp.besseli(mp.mpf(81) / 2, mp.mpf("1e-4")))
        assert val == pytest.approx(float(ref), rel=1e-12)

    def test_wronskian_identity(self):
        # i_l k_l' - i_l' k_l = -(pi/2)/x^2 for the pi/2 convention
        for l in range(0, 41, 5):
            for x in (0.1, 0.9, 5.0, 21.0, 50.0):
                lhs = (modified_spherical_bessel_i(l, x) * bessel_k_derivative(l, x)
                       - bessel_i_derivative(l, x) * modified_spherical_bessel_k(l, x))
                assert lhs == pytest.approx(-(math.pi / 2) / x**2, rel=1e-10)


class TestIntegrateSemiinfinite:
    def test_exponential(self):
        res = integrate_semiinfinite(lambda k: math.exp(-2.0 * k), 1e-10)
        assert res.value == pytest.approx(0.5, rel=1e-10)
        assert res.converged

    def test_dipole_polynomial_kernel(self):
        # int (3 + 6u + 5u^2 + 2u^3 + u^4) e^{-2u} du = 23/4
        res = integrate_semiinfinite(
            lambda u: (3 + 6 * u + 5 * u**2 + 2 * u**3 + u**4) * math.exp(-2 * u), 1e-12
        )
        assert res.value == pytest.approx(5.75, rel=1e-12)

    def test_gamma_three(self):
        res = integrate_semiinfinite(lambda k: k * k * math.exp(-k), 1e-10)
        assert res.value == pytest.approx(2.0, rel=1e-10)

    def test_scale_hint_irrelevant_to_value(self):
        f = lambda k: math.exp(-k / 7.0)
        for scale in (0.1, 1.0, 30.0):
            assert integrate_semiinfinite(f, 1e-10, scale=scale).value == pytest.approx(7.0, rel=1e-9)

    def test_order_independence(self):
        # refining the tolerance moves the value by less than the looser error bar
        f = lambda k: math.cos(3 * k) * math.exp(-k)
        loose = integrate_semiinfinite(f, 1e-6)
        tight = integrate_semiinfinite(f, 1e-7)
        assert abs(loose.value - tight.value) <= max(loose.error_estimate, 1e-14)

    def test_error_estimate_and_counts(self):
        res = integrate_semiinfinite(lambda k: math.exp(-k), 1e-9)
        assert res.error_estimate >= 0
        assert res.evaluations > 10


class TestMatsubaraSum:
    def test_zero_function(self):
        res = matsubara_sum(lambda xi: 0.0, temperature=1.0)
        assert res.value == 0.0

    def test_geometric_series(self):
        # f = exp(-xi/xi_1) with xi_1 = 2 pi T: sum = T (1/2 + q/(1-q)), q = 1/e
        t = 0.37
        xi1 = 2 * math.pi * t
        res = matsubara_sum(lambda xi: math.exp(-xi / xi1), temperature=t, tail_tol=1e-12)
        q = math.exp(-1.0)
        assert res.value == pytest.approx(t * (0.5 + q / (1 - q)), rel=1e-10)

    def test_low_temperature_matches_integral(self):
        # plate-like smooth summand; the sum tends to (1/2 pi) * integral
        def g(xi):
            return math.exp(-xi) * (1.0 + xi)

        integral = integrate_semiinfinite(g, 1e-12).value / (2 * math.pi)
        err_t = []
        for t in (0.02, 0.01, 0.005):
            s = matsubara_sum(g, temperature=t, tail_tol=1e-12).value
            err_t.append(abs(s - integral))
        # O(T^2): halving T shrinks the defect ~4x
        assert err_t[1] < err_t[0] / 3.0
        assert err_t[2] < err_t[1] / 3.0
        assert err_t[0] < 1e-3 * abs(integral)

    def test_perfect_conductor_summand_small_at(self):
        # q-integrated ideal plate summand at small T reproduces the T=0 integral to 0.1%
        def summand(xi):
            res = integrate_semiinfinite(
                lambda s: (xi + s) * math.log1p(-math.exp(-2.0 * (xi + s))), 1e-10
            )
            return res.value

        t = 0.01
        thermal = matsubara_sum(summand, temperature=t, tail_tol=1e-10).value
        limit = integrate_semiinfinite(summand, 1e-10).value / (2 * math.pi)
        assert thermal == pytest.approx(limit, rel=1e-3)

    def test_nondecaying_flagged(self):
        with pytest.raises(ValueError, match="not decaying"):
            matsubara_sum(lambda xi: math.exp(xi / 10.0), temperature=1.0)

    def test_grid_type(self):
        grid = MatsubaraGrid(temperature=2.0, n_max=4)
        assert grid.frequencies[0] == 0.0
        assert np.all(np.diff(grid.frequencies) > 0)
        assert grid.weights[0] == 0.5
        assert np.all(grid.weights[1:] == 1.0)
        with pytest.raises(ValueError):
            MatsubaraGrid(temperature=0.0, n_max=3)


class TestLogDetOneMinus:
    def test_zero_matrix(self):
        assert log_det_one_minus(np.zeros((5, 5))) == 0.0

    def test_diagonal(self):
        val = log_det_one_minus(np.diag([0.5, 0.25]))
        assert val == pytest.approx(math.log(0.5) + math.log(0.75), rel=1e-14)

    def test_power_series_oracle(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((8, 8))
        a *= 0.3 / np.linalg.norm(a, 2)
        series = -sum(np.trace(np.linalg.matrix_power(a, j)) / j for j in range(1, 41))
        assert log_det_one_minus(a) == pytest.approx(series, rel=1e-10, abs=1e-12)

    def test_small_norm_branch(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((6, 6))
        a *= 1e-8 / np.linalg.norm(a, 2)
        expect = -np.trace(a) - 0.5 * np.trace(a @ a)
        assert log_det_one_minus(a) == pytest.approx(expect, rel=1e-10)

    def test_contraction_nonpositive(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            b = rng.standard_normal((6, 6))
            a = b @ b.T
            a *= 0.9 / np.linalg.norm(a, 2)  # PSD, eigenvalues in [0, 0.9]
            assert log_det_one_minus(a) <= 0.0

    def test_spectral_radius_error(self):
        with pytest.raises(ValueError, match="invalid"):
            log_det_one_minus(np.diag([1.5, 0.2]))

    def test_quadrature_result_validation(self):
        with pytest.raises(ValueError):
            QuadratureResult(value=1.0, error_estimate=-1.0, evaluations=3)
        with pytest.raises(ValueError):
            QuadratureResult(value=1.0, error_estimate=0.0, evaluations=0)
