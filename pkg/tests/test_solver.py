import statistics
from fractions import Fraction as F

import pytest

from edaq.polys import BiPoly, PolyZ
from edaq.simulator import ModelParamsFloat, run
from edaq.solver import (ModelParamsExact, build_tables,
                         build_tables_via_a_recursion, check_boundary_identities,
                         check_functional_equation, first_orders_by_y_degree,
                         mean_queue_length, queue_pmf, sparsity_profile,
                         support_size)

from . import closed_forms as cf

RHOS = [F(1, 4), F(1, 3), F(1, 2), F(3, 4), F(9, 10)]


@pytest.fixture(scope="module", params=RHOS, ids=str)
def tables(request):
    return build_tables(request.param, 10)


def test_order_zero():
    t = build_tables(F(2, 7), 0)
    assert t.P[0] == BiPoly.from_z(PolyZ.of(F(5, 7), F(2, 7)))
    assert t.a[0] == (PolyZ.const(1),)


@pytest.mark.parametrize("rho", [F(1, 4), F(1, 2), F(3, 4), F(1, 7)], ids=str)
def test_closed_forms(rho):
    t = build_tables(rho, 4)
    assert t.P[1] == cf.to_bipoly(cf.P1, rho)
    assert t.P[2] == cf.to_bipoly(cf.P2, rho)
    assert t.P[3] == cf.to_bipoly(cf.P3, rho)


def test_first_order_at_half_by_hand():
    # (y - z)/2 + (z^2 - 1)/2
    expected = BiPoly.from_dict({(0, 1): F(1, 2), (1, 0): F(-1, 2), (2, 0): F(1, 2), (0, 0): F(-1, 2)})
    assert build_tables(F(1, 2), 1).P[1] == expected


@pytest.mark.parametrize("rho", [F(1, 4), F(2, 3)], ids=str)
def test_published_auxiliary_functions(rho):
    t = build_tables(rho, 5)
    assert t.a[1][1] == PolyZ.const(rho)
    assert t.a[1][0] == cf.to_polyz(cf.a01, rho)
    assert t.a[2][0] == cf.to_polyz(cf.a02, rho)
    assert t.a[2][1] == PolyZ.const(rho)
    assert t.a[3][0] == cf.to_polyz(cf.a03, rho)
    assert t.a[3][1] == cf.to_polyz(cf.a13, rho)
    assert t.a[3][2] == PolyZ.const(2 * rho ** 2)
    assert t.A[2][1] == cf.to_polyz(cf.A12, rho)
    assert t.A[3][1] == cf.to_polyz(cf.A13, rho)
    assert t.A[3][2] == PolyZ.const(2 * rho ** 2)
    assert t.A[4][1] == cf.to_polyz(cf.A14, rho)
    assert t.A[4][2] == PolyZ.const(2 * rho ** 2)


def test_rho_domain():
    for bad in (0, 1, F(3, 2), -F(1, 2)):
        with pytest.raises(ValueError):
            build_tables(bad, 2)
        with pytest.raises(ValueError):
            ModelParamsExact(bad)
    with pytest.raises(ValueError):
        ModelParamsExact(F(1, 2), 1)
    assert ModelParamsExact(F(1, 2), "1/10").p == F(9, 10)


def test_params_object_accepted():
    assert build_tables(ModelParamsExact(F(1, 3), F(1, 5)), 3).P == build_tables(F(1, 3), 3).P


@pytest.mark.parametrize("rho", [F(1, 3), F(1, 2), F(4, 5)], ids=str)
def test_route_equivalence(rho):
    a = build_tables(rho, 8)
    b = build_tables_via_a_recursion(rho, 8)
    assert a.a == b.a
    assert a.A == b.A
    assert a.P == b.P


def test_recursion_base_case():
    t = build_tables_via_a_recursion(F(1, 3), 0)
    assert t.a == ((PolyZ.const(1),),)
    assert build_tables_via_a_recursion(F(1, 3), 3).a[3][2] == PolyZ.const(2 * F(1, 3) ** 2)


def test_zero_a_row_identity(tables):
    rho = tables.rho
    for k in range(tables.order + 1):
        assert tables.a[k][0] * (1 - rho) == tables.P[k].at_z(0)


def test_sparse_A_entries(tables):
    for k in range(2, tables.order + 1):
        assert not tables.A[k][k]
    for j in range(3, tables.order - 1):
        assert not tables.A_at(j + 1, j)
        assert not tables.A_at(j + 2, j)


def test_out_of_triangle_reads_zero(tables):
    assert tables.a_at(2, 3) == PolyZ()
    assert tables.a_at(2, -1) == PolyZ()


def test_degree_bounds(tables):
    for k, Pk in enumerate(tables.P):
        assert Pk.deg_z <= k + 1
        m = 0
        while (m + 1) * (m + 2) // 2 <= k:
            m += 1
        assert Pk.deg_y == m
        for poly in tables.a[k]:
            assert poly.degree <= k


def test_functional_equation_small():
    assert not check_functional_equation(build_tables(F(2, 5), 0))
    assert not check_functional_equation(build_tables(F(1, 3), 3))
    assert not check_functional_equation(build_tables(F(1, 2), 6))


def test_functional_equation_detects_corruption():
    t = build_tables(F(1, 3), 4)
    bad = t.P[:3] + (t.P[3] + BiPoly.y() * F(1, 100),) + t.P[4:]
    broken = type(t)(t.rho, t.order, bad, t.A, t.a)
    res = check_functional_equation(broken)
    assert res.terms[3] or res.terms[4]


def test_boundary_identities(tables):
    checks = check_boundary_identities(tables)
    assert all(c.passed for c in checks)
    names = {(c.name, c.k) for c in checks}
    assert ("P(0,1)=1-rho", 0) in names
    assert ("P(1,1)=0", 1) in names
    assert ("P(0,1)=0", 2) in names


def test_boundary_identities_report_failures():
    t = build_tables(F(1, 3), 2)
    bad = (t.P[0], t.P[1] + BiPoly.const(1), t.P[2])
    checks = check_boundary_identities(type(t)(t.rho, t.order, bad, t.A, t.a))
    failed = {(c.name, c.k) for c in checks if not c.passed}
    assert ("P(0,1)=0", 1) in failed and ("P(1,1)=0", 1) in failed


def test_sparsity_law():
    first = first_orders_by_y_degree(build_tables(F(1, 2), 10))
    assert first[1] == 1 and first[2] == 3 and first[3] == 6 and first[4] == 10
    assert sparsity_profile(build_tables(F(1, 2), 3)) == [(0, 0), (1, 1), (2, 1), (3, 2)]


def test_pmf_at_q_zero():
    rho = F(3, 8)
    pmf = queue_pmf(build_tables(rho, 6), 0, 4)
    assert pmf == [1 - rho, rho, 0, 0, 0]


@pytest.mark.parametrize("N", [0, 1, 4, 8])
def test_pmf_empty_queue_and_normalization(N):
    rho, q = F(1, 2), F(1, 10)
    t = build_tables(rho, N)
    pmf = queue_pmf(t, q, support_size(t) + 2)
    assert pmf[0] == 1 - rho
    assert sum(pmf) == 1


def test_pmf_nonnegative_inside_radius():
    t = build_tables(F(1, 2), 8)
    pmf = queue_pmf(t, F(1, 10), support_size(t))
    assert all(p >= 0 for p in pmf)


def test_mean_queue_length_q_zero():
    for rho in (F(1, 5), F(1, 2), F(1, 1000)):
        assert mean_queue_length(build_tables(rho, 5), 0) == rho


def test_mean_queue_length_first_order():
    # d/dz P^(1)(z, 1) at z = 1 is rho / (1 - rho) - rho = rho^2 / (1 - rho)
    rho, q = F(1, 3), F(1, 7)
    assert mean_queue_length(build_tables(rho, 1), q) == rho + q * rho ** 2 / (1 - rho)


def test_mean_queue_length_against_simulation():
    # pinned from the order-3 series (truncation error O(q^4)); oracle: 10 replicas of 10^6 steps
    value = mean_queue_length(build_tables(F(1, 2), 3), F(1, 10))
    assert value == F(1083, 2000)
    means = []
    for seed in range(10):
        d = run(ModelParamsFloat(0.5, 0.1), 10 ** 6, 10 ** 4, 500 + seed)
        means.append(sum(n * c for (n, _), c in d.counts.items()) / d.total)
    se = statistics.stdev(means) / len(means) ** 0.5
    assert abs(float(value) - statistics.fmean(means)) <= 4 * se + 0.1 ** 4
