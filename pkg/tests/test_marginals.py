import itertools
import math
from fractions import Fraction as F

import pytest

from edaq.marginals import (marginal_l_series, partition_distinct,
                            partition_table, pochhammer_eval,
                            pochhammer_expand, pochhammer_tail_bound)
from edaq.polys import PolyZ
from edaq.solver import build_tables


def brute_distinct(l, j):
    return sum(1 for s in itertools.combinations(range(1, l + 1), j) if sum(s) == l)


def test_partition_examples():
    assert partition_distinct(6, 3) == 1
    assert partition_distinct(5, 2) == 2
    assert partition_distinct(0, 0) == 1
    assert partition_distinct(4, 0) == 0


def test_partition_zero_below_triangular_threshold():
    for j in range(1, 8):
        for k in range(j * (j + 1) // 2):
            assert partition_distinct(k, j) == 0


def test_partitions_match_enumeration():
    for l in range(21):
        for j in range(l + 1):
            assert partition_distinct(l, j) == brute_distinct(l, j), (l, j)


def test_table_recurrence():
    D = partition_table(20)
    for k in range(1, 21):
        for j in range(1, k + 1):
            left = D[k - j][j - 1] if j - 1 <= k - j else 0
            right = D[k - j][j] if j <= k - j else 0
            assert D[k][j] == left + right


def test_generating_function_identity():
    # coefficient of t^l in prod_{m>=1} (1 + x t^m), as a polynomial in x
    L = 12
    coeffs = [[0] * (L + 1) for _ in range(L + 1)]  # coeffs[l][j]
    coeffs[0][0] = 1
    for m in range(1, L + 1):
        for l in range(L, m - 1, -1):
            for j in range(L, 0, -1):
                coeffs[l][j] += coeffs[l - m][j - 1]
    for l in range(L + 1):
        assert [partition_distinct(l, j) for j in range(L + 1)] == coeffs[l]


def test_series_examples():
    rho = F(2, 5)
    shift = PolyZ.of(-rho, rho)
    m = marginal_l_series(rho, 3)
    assert m[0] == PolyZ.const(1)
    assert m[1] == shift
    assert m[2] == shift
    assert m[3] == shift + shift * shift


def test_product_examples():
    rho = F(2, 5)
    shift = PolyZ.of(-rho, rho)
    p = pochhammer_expand(rho, 4)
    assert p[1] == shift
    assert p[3] == shift + shift * shift
    assert [c(1) for c in p] == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("rho", [F(1, 4), F(1, 2), F(9, 10)], ids=str)
def test_three_way_agreement(rho):
    N = 10
    t = build_tables(rho, N)
    part, prod = marginal_l_series(rho, N), pochhammer_expand(rho, N)
    assert part == prod
    assert [P.at_z(1) for P in t.P] == part


def test_marginal_from_auxiliary_functions():
    # P^(k)(1, y) = sum_j (y-1)^j/j! (j rho a[k-j][j-1](1) + a[k-j][j](1))
    rho = F(1, 3)
    t = build_tables(rho, 8)
    for k in range(9):
        acc = PolyZ()
        for j in range(k + 1):
            c = j * rho * t.a_at(k - j, j - 1)(1) + t.a_at(k - j, j)(1)
            acc = acc + PolyZ.of(-1, 1) ** j * (c / math.factorial(j))
        assert acc == t.P[k].at_z(1)


def test_a_at_one_counts_partitions():
    rho = F(2, 7)
    t = build_tables(rho, 8)
    for l in range(9):
        for j in range(l + 1):
            assert t.a[l][j](1) == math.factorial(j) * rho ** j * partition_distinct(l, j)


def test_printed_normalization_with_factorial_is_inconsistent():
    # Reading the partition expansion with an extra 1/j! breaks agreement at k = 3.
    rho = F(1, 2)
    shift = PolyZ.of(-rho, rho)
    with_fact = PolyZ.const(partition_distinct(3, 0)) + shift * partition_distinct(3, 1) \
        + shift * shift * F(partition_distinct(3, 2), 2)
    assert with_fact != pochhammer_expand(rho, 3)[3]


def test_pochhammer_eval_trivial_cases():
    assert pochhammer_eval(0.7, 0.4, 1.0, 50) == 1.0
    assert pochhammer_eval(0.0, 0.4, 0.3, 50) == 1.0
    assert pochhammer_eval(0.7, 0.0, 0.3, 50) == 1.0


def test_pochhammer_eval_matches_series():
    rho, q, y = F(1, 2), F(1, 5), F(1, 3)
    N = 30
    series = sum(float(c(y)) * float(q) ** k for k, c in enumerate(pochhammer_expand(rho, N)))
    assert pochhammer_eval(0.5, 0.2, 1 / 3, 40) == pytest.approx(series, abs=1e-15)


def test_pochhammer_eval_tail():
    for y in (-1.0, 0.0, 3.0):
        full = pochhammer_eval(0.6, 0.5, y, 200)
        for terms in (1, 3, 5, 10):
            part = pochhammer_eval(0.6, 0.5, y, terms)
            assert abs(part / full - 1) <= pochhammer_tail_bound(0.6, 0.5, y, terms)


def test_pochhammer_eval_domain():
    with pytest.raises(ValueError):
        pochhammer_eval(0.5, 1.0, 0.0, 5)
    with pytest.raises(ValueError):
        pochhammer_eval(0.5, 0.5, 0.0, 0)
