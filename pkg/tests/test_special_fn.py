import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from core.errors import InputValidationError, PoleError, RegimeMismatchError
from schemas.bessel import BesselAvgConfig, BesselRegime
from services.special_fn import (
    bessel_avg_pair,
    bessel_avg_single,
    bessel_j,
    bessel_j_array,
    bessel_regime,
    bigx_profile,
    breakdown_scan,
    bump_weight,
    classify_pair,
    i_power,
    log_gamma,
    pair_bound_checks,
    single_average_residual,
    weight_integral,
    window_weights,
    window_y,
)


class TestElementary:
    def test_bump_weight(self):
        assert bump_weight(1.5) == pytest.approx(1.0)
        assert bump_weight(1.0) == 0.0
        assert bump_weight(2.5) == 0.0
        values = bump_weight(np.array([0.5, 1.25, 1.75]))
        assert values[0] == 0.0
        assert values[1] == pytest.approx(values[2])

    def test_weight_integral(self):
        oracle = mp.quad(lambda u: mp.exp(4 - 1 / (u - 1) - 1 / (2 - u)), [1, 1.5, 2])
        assert weight_integral() == pytest.approx(float(oracle), rel=1e-10)

    @pytest.mark.parametrize("k,expected", [(0, 1), (2, -1), (4, 1), (10, -1), (12, 1)])
    def test_i_power(self, k, expected):
        assert i_power(k) == expected

    def test_i_power_odd(self):
        with pytest.raises(InputValidationError):
            i_power(3)


class TestLogGamma:
    def test_known_values(self):
        assert log_gamma(1) == pytest.approx(0.0, abs=1e-15)
        assert log_gamma(0.5).real == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
        assert log_gamma(Fraction(25, 2)).real == pytest.approx(math.lgamma(12.5), rel=1e-13)

    def test_reflection(self):
        assert math.exp(log_gamma(-0.5).real) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-13)

    def test_complex_argument(self):
        s = complex(0.75, 14.0)
        assert log_gamma(s) == pytest.approx(complex(mp.loggamma(mp.mpc(0.75, 14.0))), rel=1e-13)

    @pytest.mark.parametrize("s", [0, -1, -3])
    def test_poles(self, s):
        with pytest.raises(PoleError):
            log_gamma(s)


class TestBessel:
    def test_j1_at_1(self):
        assert bessel_j(1, 1.0) == pytest.approx(0.4400505857449335, abs=1e-12)

    def test_small_argument(self):
        assert abs(bessel_j(19, 1.0)) <= math.exp(-19)
        assert bessel_j(7, 0.0) == 0.0

    def test_invalid_order(self):
        with pytest.raises(InputValidationError):
            bessel_j(0, 1.0)

    def test_regime_dispatch(self):
        assert bessel_regime(100, 5.0) == BesselRegime.SERIES
        assert bessel_regime(100, 101.0) == BesselRegime.QUADRATURE
        assert bessel_regime(100, 150.0) == BesselRegime.LANGER

    def test_langer_rejects_transition(self):
        with pytest.raises(RegimeMismatchError):
            bessel_j(50, 40.0, BesselRegime.LANGER)

    @pytest.mark.parametrize("ell", [50, 100, 200])
    def test_series_meets_quadrature(self, ell):
        x = math.sqrt(ell)
        series = bessel_j(ell, x, BesselRegime.SERIES)
        quadrature = bessel_j(ell, x, BesselRegime.QUADRATURE)
        assert series == pytest.approx(quadrature, abs=1e-10)

    @pytest.mark.parametrize("ell", [50, 100, 200])
    def test_langer_meets_quadrature(self, ell):
        tol = 10.0 * ell ** (-4.0 / 3.0)
        for x in np.linspace(ell * (1 + ell ** (-1.0 / 3.0)), 3 * ell, 25):
            langer = bessel_j(ell, x, BesselRegime.LANGER)
            precise = bessel_j(ell, x, BesselRegime.PRECISE)
            assert abs(langer - precise) <= tol

    @pytest.mark.parametrize("ell", [50, 100])
    def test_quadrature_against_scipy(self, ell):
        for x in np.linspace(ell / 2, 2 * ell, 15):
            assert bessel_j(ell, x, BesselRegime.QUADRATURE) == pytest.approx(
                float(bessel_j_array(ell, x)), abs=1e-10
            )

    @pytest.mark.parametrize("ell", [50, 100])
    def test_uniform_bound(self, ell):
        xs = np.linspace(ell / 10, 4 * ell, 400)
        values = np.abs(bessel_j_array(ell, xs))
        bound = np.minimum(ell ** (-1.0 / 3.0), np.abs(xs ** 2 - ell ** 2) ** -0.25) + 1e-8
        assert np.all(values <= bound)


class TestSingleAverage:
    def test_window_weights(self):
        assert list(window_weights(20, 4)) == [24, 28, 32, 36]
        assert list(window_weights(20, 2))[:3] == [22, 24, 26]

    def test_tiny_argument(self):
        cfg = BesselAvgConfig(K=60, parity=4)
        assert abs(bessel_avg_single(cfg, 0.1)) <= math.exp(-30)

    def test_far_argument(self):
        cfg = BesselAvgConfig(K=100, parity=4)
        y = 10 * cfg.K
        assert abs(bessel_avg_single(cfg, y)) <= 20 * (cfg.K ** -0.9 + y / cfg.K ** 2.9)

    def test_residual_decays(self):
        u = np.linspace(1.05, 1.95, 50)

        def sup_residual(K):
            cfg = BesselAvgConfig(K=K, parity=4)
            return max(abs(single_average_residual(cfg, t * K)) for t in u)

        at_100, at_200 = sup_residual(100), sup_residual(200)
        assert at_100 <= 20 * 100 ** -0.9
        assert at_100 / at_200 >= 1.7

    def test_rejects_nonpositive(self):
        with pytest.raises(InputValidationError):
            bessel_avg_single(BesselAvgConfig(K=60), 0.0)


class TestPairAverage:
    K = 60.0

    def test_exponential_regime(self):
        result = bessel_avg_pair(BesselAvgConfig(K=self.K), self.K / 10, self.K / 10)
        assert abs(result.value) <= math.exp(-self.K / 2)

    def test_amplitude_inside_window(self):
        cfg = BesselAvgConfig(K=self.K)
        for x in np.geomspace(self.K ** 1.1, self.K ** 1.3, 6):
            y = window_y(self.K, x)
            result = bessel_avg_pair(cfg, x, y)
            assert result.support_flag
            assert abs(result.phase_removed) <= 1.0

    def test_window_y_solves_window_equation(self):
        x = self.K ** 1.2
        y = window_y(self.K, x)
        assert 1 - y / (4 * x) == pytest.approx(self.K ** 2 / y ** 2, rel=1e-9)

    def test_classification(self):
        K = self.K
        assert classify_pair(K, K ** 1.5, K ** 1.5) == ["doublebound1", "doublebound2"]
        assert classify_pair(K, K ** 2.1, K) == ["bigx"]
        assert classify_pair(K, K ** 1.1, K ** 1.1) == ["doubleavg"]
        assert classify_pair(K, K ** 2.1, K ** 2.2) == []

    def test_doublebound(self):
        x = self.K ** 1.5
        checks = pair_bound_checks(BesselAvgConfig(K=self.K), x, x)
        assert [c.bound_name for c in checks] == ["doublebound1", "doublebound2"]
        assert checks[0].bound_value == pytest.approx(self.K / x)
        assert all(c.passed for c in checks)

    def test_bigx_bound(self):
        (check,) = pair_bound_checks(BesselAvgConfig(K=self.K), self.K ** 2.1, self.K)
        assert check.bound_name == "bigx"
        assert check.passed

    def test_no_lemma_applies(self):
        with pytest.raises(RegimeMismatchError):
            pair_bound_checks(BesselAvgConfig(K=self.K), self.K ** 2.1, self.K ** 2.2)

    def test_bigx_reconstruction(self):
        rows = bigx_profile(self.K, self.K ** 2.1)
        assert len(rows) == len(window_weights(self.K, 2))
        assert max(row["deviation"] for row in rows) <= self.K ** (-4.0 / 3.0)

    def test_breakdown_scan_rows(self):
        rows = breakdown_scan(self.K, [1.1, 1.2, 1.3])
        assert [row["exponent"] for row in rows] == [1.1, 1.2, 1.3]
        for row in rows:
            assert row["y"] < 4 * row["x"]
            assert row["main_term_size"] == pytest.approx(math.sqrt(row["x"]) / self.K)
