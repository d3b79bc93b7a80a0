"""Marginal law of the number of late customers.

P(1, y) = prod_{k>=0} [1 + rho q^{k+1} (y - 1)], whose q^k coefficient is
sum_j D(k, j) (rho (y - 1))^j with D(k, j) the number of partitions of k
into j distinct parts.  Both expansions are computed exactly here.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .polys import BiPoly, PolyZ, QSeriesPoly
from .solver import ModelParamsExact, as_fraction


@lru_cache(maxsize=None)
def partition_distinct(l: int, j: int) -> int:
    """Number of ways to write l as a sum of j distinct positive integers."""
    if l < 0 or j < 0:
        return 0
    if j == 0:
        return 1 if l == 0 else 0
    if j * (j + 1) // 2 > l:
        return 0
    # remove one from every part; a part equal to 1 disappears
    return partition_distinct(l - j, j - 1) + partition_distinct(l - j, j)


def partition_table(l_max: int) -> list:
    """Rows ``D[l][j]`` for l <= l_max, j <= l."""
    return [[partition_distinct(l, j) for j in range(l + 1)] for l in range(l_max + 1)]


def _rho(params) -> Fraction:
    if isinstance(params, ModelParamsExact):
        return params.rho
    return as_fraction(params)


def marginal_l_series(params, N: int) -> list:
    """[P^(k)(1, y) for k = 0..N] from the distinct-parts expansion."""
    rho = _rho(params)
    x = PolyZ.of(-rho, rho)  # rho (y - 1)
    out = []
    for k in range(N + 1):
        poly = PolyZ()
        power = PolyZ.const(1)
        for j in range(k + 1):
            d = partition_distinct(k, j)
            if d:
                poly = poly + power * d
            power = power * x
        out.append(poly)
    return out


def pochhammer_expand(params, N: int) -> list:
    """Same coefficients, by multiplying out the first N factors of the product."""
    rho = _rho(params)
    one = BiPoly.const(1)
    factor_shift = BiPoly.from_y(PolyZ.of(-rho, rho))
    prod = QSeriesPoly.constant(one, N)
    for k in range(N):
        terms = [one] + [BiPoly()] * k + [factor_shift]
        prod = prod * QSeriesPoly(N, tuple(terms))
    return [t.at_z(0) for t in prod.terms]


def pochhammer_eval(rho: float, q: float, y: float, terms: int) -> float:
    """Partial product prod_{k<terms} [1 + rho q^{k+1} (y - 1)]."""
    if abs(q) >= 1:
        raise ValueError(f"|q| must be < 1, got {q}")
    if terms < 1:
        raise ValueError("terms must be positive")
    shift = rho * (y - 1)
    out = 1.0
    qk = q
    for _ in range(terms):
        out *= 1 + shift * qk
        qk *= q
        if qk == 0:
            break
    return out


def pochhammer_tail_bound(rho: float, q: float, y: float, terms: int) -> float:
    """Bound on |partial / full - 1| for the product truncated after ``terms`` factors."""
    first = abs(rho * (y - 1)) * abs(q) ** (terms + 1)
    if first >= 1:
        return math.inf
    # |log(1 + t)| <= |t| / (1 - |t|) for |t| < 1
    log_bound = first / (1 - abs(q)) / (1 - first)
    return math.expm1(log_bound)
