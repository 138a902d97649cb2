import math

import mpmath as mp
import numpy as np
import pytest

from core.errors import BudgetError, ConvergenceError, InputValidationError
from core.workers import map_ordered
from services.form_library import form_library
from services.geometry import (
    VOLUME,
    DomainGrid,
    NormalizedForm,
    check_volume,
    eval_F,
    inner_product,
    integrate,
    l2_normalize,
    lp_norm,
    norm_report,
    petersson_norm_oracle,
    series_length,
    spectral_check,
    triple_inner,
    watson_check,
)

DELTA_PETERSSON_NORM = 1.0353620568043209e-6
WATSON_WEIGHTS = [16, 18, 20, 22]


@pytest.fixture(scope="module")
def grid():
    return DomainGrid()


@pytest.fixture(scope="module")
def normalized_delta(delta_form, grid):
    return l2_normalize(delta_form, grid)


class TestDomainGrid:
    def test_volume(self, grid):
        assert grid.volume() == pytest.approx(VOLUME, abs=1e-8)
        assert check_volume(grid) == pytest.approx(math.pi / 3, abs=1e-8)

    def test_refined_grid_has_more_nodes(self, grid):
        finer = grid.refined()
        assert finer.x_panels == 2 * grid.x_panels
        assert finer.y_step == grid.y_step / 2
        assert finer.size > grid.size
        assert finer.volume() == pytest.approx(VOLUME, abs=1e-10)

    def test_coarse_grid_rejected(self):
        with pytest.raises(ConvergenceError):
            check_volume(DomainGrid(order=2))

    def test_integrate_cancelling(self, grid):
        # odd in x, so the integral vanishes
        value, diagnostics = integrate(lambda z: z.real * np.exp(-2 * math.pi * z.imag), grid)
        assert abs(value) <= 1e-14
        assert diagnostics.rel_change <= 1e-6

    def test_integrate_decaying(self, grid):
        # int_{|z| >= 1, |x| <= 1/2} e^{-2 pi y} dx dy / y^2, checked against mpmath
        value, diagnostics = integrate(lambda z: np.exp(-2 * math.pi * z.imag), grid)
        assert diagnostics.levels >= 2
        oracle = mp.quad(
            lambda x: mp.quad(lambda y: mp.exp(-2 * mp.pi * y) / y ** 2, [mp.sqrt(1 - x * x), 2, mp.inf]),
            [-0.5, 0, 0.5],
        )
        assert value.real == pytest.approx(float(oracle), rel=1e-9)


class TestEvaluation:
    def test_series_length(self):
        N, tail = series_length(12)
        assert N > 12 / (4 * math.pi * math.sqrt(3) / 2)
        assert tail < 1e-16

    def test_delta_at_i(self, delta_form):
        raw = NormalizedForm(base=delta_form)
        expected = mp.gamma(0.25) ** 24 / (2 ** 24 * mp.pi ** 18)
        value = eval_F(raw, 1j)
        assert value.real == pytest.approx(float(expected), rel=1e-10)
        assert abs(value.imag) <= 1e-15

    def test_periodicity(self, normalized_delta):
        z = complex(0.3, 0.95)
        assert eval_F(normalized_delta, z + 1) == pytest.approx(eval_F(normalized_delta, z), rel=1e-10)

    @pytest.mark.parametrize("z", [complex(0.2, 1.1), complex(-0.1, 1.05), complex(0.0, 1.0)])
    def test_inversion(self, normalized_delta, z):
        image = -1 / z
        assert abs(eval_F(normalized_delta, image)) == pytest.approx(abs(eval_F(normalized_delta, z)), rel=1e-9)

    def test_below_domain(self, normalized_delta):
        with pytest.raises(InputValidationError):
            eval_F(normalized_delta, complex(0.0, 0.5))

    def test_tail_budget(self, delta_form):
        scale = 1e-11 / NormalizedForm(base=delta_form).tail_bound
        with pytest.raises(BudgetError):
            eval_F(NormalizedForm(base=delta_form, scale=scale), 1j)

    def test_tail_within_budget(self, delta_form):
        scale = 1e-13 / NormalizedForm(base=delta_form).tail_bound
        assert math.isfinite(abs(eval_F(NormalizedForm(base=delta_form, scale=scale), 1j)))


class TestNorms:
    def test_unit_l2_norm(self, normalized_delta, grid):
        l2, power, _ = lp_norm(normalized_delta, 2, grid)
        assert l2 == pytest.approx(1.0, abs=1e-9)
        assert power == pytest.approx(1.0, abs=1e-9)

    def test_petersson_norm(self, delta_form, normalized_delta):
        norm = 1.0 / normalized_delta.scale ** 2
        assert norm == pytest.approx(DELTA_PETERSSON_NORM, rel=1e-6)
        assert norm == pytest.approx(petersson_norm_oracle(delta_form), rel=1e-4)

    def test_norm_report(self, delta_form, grid):
        report = norm_report(delta_form, grid)
        assert report.l2 == pytest.approx(1.0, abs=1e-9)
        assert report.conjecture_ratio >= 1.0
        assert report.conjecture_ratio == pytest.approx(VOLUME * report.l4 ** 4)
        assert report.diagnostics.rel_change <= 1e-6

    def test_unsupported_exponent(self, normalized_delta):
        with pytest.raises(InputValidationError):
            lp_norm(normalized_delta, 3)

    def test_orthogonality(self, weight24_forms, grid):
        first, second = (l2_normalize(g, grid) for g in weight24_forms)
        assert abs(inner_product(first, second, grid)) <= 1e-6
        assert inner_product(first, first, grid).real == pytest.approx(1.0, abs=1e-9)

    def test_normalization_shared_across_threads(self, delta_form):
        fresh = DomainGrid(y_max=9.0)
        results = map_ordered(lambda _: l2_normalize(delta_form, fresh), range(4), threads=4)
        assert all(nf is results[0] for nf in results)

    def test_weight_checks(self, normalized_delta):
        with pytest.raises(InputValidationError):
            triple_inner(normalized_delta, normalized_delta)


@pytest.mark.slow
class TestTripleProducts:
    def test_spectral_decomposition(self, delta_form, weight24_forms, grid):
        result = spectral_check(delta_form, weight24_forms, grid)
        assert len(result.triple_products) == 2
        assert result.rel_gap <= 1e-4

    def test_watson_formula(self, delta_form, weight24_forms, grid):
        for g in weight24_forms:
            result = watson_check(delta_form, g, grid)
            assert result.rhs >= 0
            assert result.rel_gap <= 1e-3

    @pytest.mark.parametrize("k", WATSON_WEIGHTS)
    def test_watson_formula_higher_weights(self, k, grid):
        f = form_library.eigenform(k, 0)
        for g in form_library.eigenforms(2 * k):
            assert watson_check(f, g, grid).rel_gap <= 1e-3

    @pytest.mark.parametrize("k", WATSON_WEIGHTS)
    def test_spectral_decomposition_higher_weights(self, k, grid):
        partners = form_library.eigenforms(2 * k)
        result = spectral_check(form_library.eigenform(k, 0), partners, grid)
        assert len(result.triple_products) == len(partners)
        assert result.rel_gap <= 1e-4
