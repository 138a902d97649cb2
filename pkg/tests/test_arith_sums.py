import math

import numpy as np
import pytest

from core.errors import InputValidationError
from services.arith_sums import (
    divisor_count_table,
    euler_phi,
    factorization,
    kloosterman,
    kloosterman_complex,
    kloosterman_matrix,
    kloosterman_split,
    moebius,
    moebius_table,
    poisson_compare,
    ramanujan_sum,
    run_poisson_cases,
    s1_closed_form,
    s1_sum,
    s2_closed_form,
    s2_sum,
    s2_table,
    s3_bound,
    s3_sum,
    scan_s1,
    scan_s2,
    scan_s3,
    tau,
    weil_average,
    weil_bound,
    weil_check,
)
from services.special_fn import bump_weight


class TestArithmetic:
    @pytest.mark.parametrize("n,expected", [(1, 1), (12, 6), (36, 9), (97, 2)])
    def test_tau(self, n, expected):
        assert tau(n) == expected

    def test_tables_match_pointwise(self):
        mu = moebius_table(200)
        d = divisor_count_table(200)
        for n in range(1, 201):
            assert mu[n] == moebius(n)
            assert d[n] == tau(n)

    @pytest.mark.parametrize("c,m,expected", [(1, 5, 1), (6, 1, 1), (4, 2, -2), (9, 3, -3), (5, 10, 4)])
    def test_ramanujan_sum(self, c, m, expected):
        assert ramanujan_sum(c, m) == expected


class TestKloosterman:
    @pytest.mark.parametrize("n,m,c,expected", [(1, 1, 1, 1.0), (1, 1, 2, 1.0), (1, 1, 3, -1.0), (0, 0, 5, 4.0)])
    def test_small_values(self, n, m, c, expected):
        assert kloosterman(n, m, c) == pytest.approx(expected, abs=1e-12)

    def test_symmetry_and_real(self):
        for c in range(1, 40):
            for n, m in [(1, 2), (3, 7), (5, 5)]:
                assert kloosterman(n, m, c) == pytest.approx(kloosterman(m, n, c), abs=1e-9)
                assert abs(kloosterman_complex(n, m, c).imag) <= 1e-9

    def test_ramanujan_specialization(self):
        for c in range(1, 30):
            assert kloosterman(0, 6, c) == pytest.approx(ramanujan_sum(c, 6), abs=1e-9)

    def test_weil_bound_at_primes(self):
        assert weil_bound(1, 1, 101) == pytest.approx(2 * math.sqrt(101))
        assert euler_phi(36) == 12

    def test_weil_bound_holds(self):
        for c in range(1, 120):
            for n in (1, 2, 3, 6):
                assert weil_check(n, 1, c)

    def test_twisted_multiplicativity(self):
        for c1, c2 in [(3, 4), (5, 7), (8, 9)]:
            first, second = kloosterman_split(2, 3, c1, c2)
            assert first * second == pytest.approx(kloosterman(2, 3, c1 * c2), abs=1e-8)

    def test_split_rejects_common_factor(self):
        with pytest.raises(InputValidationError):
            kloosterman_split(1, 1, 4, 6)

    def test_matrix_agrees_with_scalar(self):
        ns, ms = np.arange(1, 6), np.arange(1, 4)
        matrix = kloosterman_matrix(ns, ms, 12)
        for i, n in enumerate(ns):
            for j, m in enumerate(ms):
                assert matrix[i, j] == pytest.approx(kloosterman(int(n), int(m), 12), abs=1e-10)

    def test_weil_average(self):
        summary = weil_average(1, 11, 200)
        assert summary["sum"] <= summary["bound"]

    def test_invalid_modulus(self):
        with pytest.raises(InputValidationError):
            kloosterman(1, 1, 0)


class TestExponentialSums:
    def test_s1_values(self):
        assert s1_sum(4, 1, 1).real == pytest.approx(0.5, abs=1e-12)
        assert abs(s1_sum(9, 2, 1)) == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert abs(s1_sum(2, 1, 1)) <= 1e-12

    def test_s1_closed_form(self):
        for c in range(1, 80):
            for r1 in (1, 2, 5):
                if math.gcd(c, 7) == 1:
                    assert s1_sum(c, r1, 7).real == pytest.approx(s1_closed_form(c), abs=1e-9)

    def test_s2_values(self):
        assert s2_sum(2, 2, 1) == pytest.approx(-0.5, abs=1e-12)
        assert s2_sum(3, 1, 1) == pytest.approx(0.0, abs=1e-12)
        for c in range(1, 40):
            assert s2_sum(c, 6, 4) == pytest.approx(s2_closed_form(c, 6, 4), abs=1e-10)

    def test_s3_prime_case(self):
        assert s3_sum(2, 2, 1, 1, 1, 1, 1).real == pytest.approx(2 ** -1.5, abs=1e-12)

    def test_s3_rejects_mismatched_primes(self):
        with pytest.raises(InputValidationError):
            s3_sum(2, 3, 1, 1, 1, 1, 1)

    def test_factorization_is_admissible(self):
        split = factorization(12, 18)
        assert (split.b1, split.b2, split.c1_prime, split.c2_prime) == (12, 18, 1, 1)
        split = factorization(20, 6)
        assert (split.c1, split.c2) == (20, 6)
        assert split.b1 == 4 and split.b2 == 2

    def test_scans_pass(self):
        rows = scan_s1(60)
        assert len(rows) == 5 * sum(euler_phi(c) for c in range(1, 61))
        assert all(row.passes_bound for row in rows)
        assert all(row.passes_bound for row in scan_s1(30, b2_values=(1, 7)))
        assert all(row.passes_bound for row in scan_s2(40, max_t=12, max_m=6))
        assert all(row.passes_bound for row in scan_s3(max_prime=30, max_param=3))

    def test_s3_bound_shape(self):
        assert s3_bound(3, 3, 1) > s3_bound(3, 3, 1, constant=1.0)

    @pytest.mark.parametrize("c", [8, 45, 49])
    def test_s1_ignores_shift(self, c):
        units = [b for b in range(1, c) if math.gcd(b, c) == 1]
        for r1 in range(1, 6):
            for b2 in units:
                assert s1_sum(c, r1, b2) == pytest.approx(s1_closed_form(c), abs=1e-10)

    def test_s2_table_matches_pointwise(self):
        for c in range(1, 16):
            table = s2_table(c, 6, 4)
            for t in range(1, 7):
                for m in range(1, 5):
                    assert table[t - 1, m - 1] == pytest.approx(s2_sum(c, t, m), abs=1e-12)

    @pytest.mark.slow
    def test_s1_scan_to_300(self):
        rows = scan_s1(300)
        assert {row.modulus for row in rows} == set(range(1, 301))
        assert all(row.passes_bound for row in rows)

    @pytest.mark.slow
    def test_s2_scan_to_300(self):
        rows = scan_s2(300)
        assert len(rows) == 300 * 20 * 20
        assert all(row.passes_bound for row in rows)


class TestPoisson:
    @pytest.mark.parametrize("case", ["constant", "character", "kloosterman"])
    def test_named_cases(self, case):
        (result,) = run_poisson_cases(case)
        assert result.error <= 1e-9

    def test_constant_main_term(self):
        result = poisson_compare(lambda n: np.ones(len(n)), bump_weight, 1000, 1)
        assert result.main_re == pytest.approx(result.direct_re, abs=1e-9)
        assert result.main_re > 0

    def test_unknown_case(self):
        with pytest.raises(InputValidationError):
            run_poisson_cases("nope")
