import math
from fractions import Fraction

import mpmath as mp
import pytest
from sympy import eye

from core.errors import BudgetError, InputValidationError, TruncationError
from services.arith_sums import tau
from services.form_library import form_library
from services.hecke_core import (
    QSeries,
    cusp_dimension,
    default_budget,
    delta,
    eigenforms,
    eisenstein,
    eta_power,
    gl3_coeff,
    hecke_matrix,
    victor_miller_basis,
)

ALL_WEIGHTS = [k for k in range(12, 41, 2) if cusp_dimension(k)]


class TestQSeries:
    def test_ramanujan_tau(self):
        d = delta(12)
        assert [int(d[n]) for n in range(1, 7)] == [1, -24, 252, -1472, 4830, -6048]

    def test_eisenstein_series(self):
        e4, e6 = eisenstein(4, 5), eisenstein(6, 5)
        assert [e4[n] for n in range(3)] == [1, 240, 2160]
        assert [e6[n] for n in range(2)] == [1, -504]

    def test_delta_from_eisenstein(self):
        e4, e6 = eisenstein(4, 20), eisenstein(6, 20)
        combination = (e4 ** 3 - e6 * e6).scale(Fraction(1, 1728))
        assert combination.integers() == delta(20).integers()

    def test_eta_power_matches_product(self):
        assert eta_power(1, 8) == [1, -1, -1, 0, 0, 1, 0, 1, 0]
        assert eta_power(3, 10)[:7] == [1, -3, 0, 5, 0, 0, -7]

    def test_multiplication_truncates_to_shorter(self):
        a = QSeries.from_values(4, [1, 2, 3])
        b = QSeries.from_values(6, [1, 1, 1, 1, 1])
        product = a * b
        assert product.truncation == 2
        assert product.weight == 10
        assert [product[n] for n in range(3)] == [1, 3, 6]

    def test_index_beyond_truncation(self):
        with pytest.raises(TruncationError):
            delta(5)[6]


class TestSpaces:
    @pytest.mark.parametrize("k,d", [(12, 1), (14, 0), (16, 1), (24, 2), (26, 1), (36, 3), (38, 2), (40, 3)])
    def test_dimension(self, k, d):
        assert cusp_dimension(k) == d

    def test_victor_miller_shape(self):
        space = victor_miller_basis(36, 20)
        assert space.dimension == 3
        for i, row in enumerate(space.rows):
            assert row[0] == 0
            assert [row[j] for j in range(1, 4)] == [1 if j == i + 1 else 0 for j in range(1, 4)]

    def test_invalid_weight(self):
        with pytest.raises(InputValidationError):
            victor_miller_basis(13, 10)

    def test_truncation_too_small(self):
        with pytest.raises(TruncationError):
            victor_miller_basis(24, 2)

    def test_t2_trace_weight_24(self):
        t2 = hecke_matrix(victor_miller_basis(24, 10), 2)
        assert t2.trace() == 1080

    @pytest.mark.parametrize("k", ALL_WEIGHTS)
    def test_hecke_algebra(self, k):
        space = victor_miller_basis(k, 6 * cusp_dimension(k) + 1)
        t2, t3, t4, t6 = (hecke_matrix(space, n) for n in (2, 3, 4, 6))
        assert t2 * t3 == t6
        assert t3 * t2 == t6
        assert t2 * t2 == t4 + 2 ** (k - 1) * eye(space.dimension)

    def test_default_budget(self):
        assert default_budget(12) == 5000
        assert default_budget(40) == 6400
        assert default_budget(76) == default_budget(38)


class TestEigenforms:
    def test_delta_normalization(self, delta_form):
        assert delta_form.coefficient(1) == pytest.approx(1.0)
        assert delta_form.coefficient(2) == pytest.approx(-24 / 2 ** 5.5, abs=1e-12)
        assert delta_form.coefficient(2) == pytest.approx(-0.5303300859, abs=1e-9)

    def test_hecke_relations(self, delta_form):
        a = delta_form.coefficient
        for n in range(1, 51):
            for m in range(1, 51):
                g = math.gcd(n, m)
                rhs = sum(a(n * m // (d * d)) for d in range(1, g + 1) if g % d == 0)
                assert a(n) * a(m) == pytest.approx(rhs, abs=1e-12)

    def test_deligne_bound(self, delta_form, weight24_forms):
        for f in [delta_form, *weight24_forms]:
            for n in range(1, 2001):
                assert abs(f.coefficient(n)) <= tau(n) + 1e-12

    def test_weight24_ordering(self, weight24_forms):
        assert len(weight24_forms) == 2
        first, second = weight24_forms
        assert first.lambda2 < second.lambda2
        assert float(first.lambda2 + second.lambda2) == pytest.approx(1080.0, rel=1e-14)
        assert float(first.lambda2 * second.lambda2) == pytest.approx(540.0 ** 2 - 144.0 * 144169.0, rel=1e-12)

    def test_coefficients_match_q_expansion(self, delta_form):
        d = delta(30)
        for n in range(1, 31):
            assert delta_form.coefficient(n) * n ** 5.5 == pytest.approx(int(d[n]), rel=1e-12)

    def test_multiplicative_extension(self):
        (f,) = eigenforms(victor_miller_basis(12, 60), budget=50)
        assert f.budget == 50
        assert f.coefficient(49 * 2) == pytest.approx(f.coefficient(49) * f.coefficient(2), abs=1e-12)
        with pytest.raises(BudgetError):
            f.coefficient(53)

    def test_symmetric_square_coefficients(self, delta_form):
        assert gl3_coeff(delta_form, 1, 1) == pytest.approx(1.0)
        assert gl3_coeff(delta_form, 2, 1) == pytest.approx(-0.71875, abs=1e-12)
        assert gl3_coeff(delta_form, 2, 1) == pytest.approx(gl3_coeff(delta_form, 1, 2))
        table = delta_form.sym2_table(12)
        assert table[4] == pytest.approx(delta_form.coefficient(16) + 1.0, abs=1e-12)


@pytest.mark.slow
class TestEigenformSweep:
    @pytest.mark.parametrize("k", ALL_WEIGHTS)
    def test_hecke_relations(self, k):
        for f in form_library.eigenforms(k):
            a = f.coefficient_mp
            with mp.workdps(40):
                for n in range(1, 51):
                    for m in range(1, 51):
                        g = math.gcd(n, m)
                        rhs = mp.fsum(a(n * m // (d * d)) for d in range(1, g + 1) if g % d == 0)
                        assert abs(a(n) * a(m) - rhs) <= 1e-15

    @pytest.mark.parametrize("k", ALL_WEIGHTS)
    def test_deligne_bound(self, k):
        for f in form_library.eigenforms(k):
            for n in range(1, 2001):
                assert abs(f.coefficient(n)) <= tau(n) + 1e-12

