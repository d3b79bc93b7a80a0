"""Order-by-order power-series solution of the stationary generating function.

The stationary law P_{n,l} of the (queue length, late customers) chain has
generating function P(z, y) = sum_k q^k P^(k)(z, y).  Each P^(k) is a
polynomial in (z, y) with rational coefficients, obtained from the lower
orders through two auxiliary triangular families:

  a[k][j](z)  j-th y-derivative, on the diagonal y = z, of
              P^(k)(0, y) + (P^(k)(z, y) - P^(k)(0, y)) / z
  A[k][j](z)  j rho a[k-j][j-1](z) + (1 + rho (z - 1)) a[k-j][j](z)

Both are stored row-major by order k, ``a[k][j]`` for 0 <= j <= k, and read
as zero outside that triangle.

Two independent constructions are offered.  :func:`build_tables` obtains
``a`` by differentiating the assembled P^(k); :func:`build_tables_via_a_recursion`
runs a closed recursion on ``a`` alone and only assembles P^(k) at the end.
They must agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .polys import BiPoly, PolyZ, QSeriesPoly, deflate_z, subst_y

DEFAULT_ORDER = 8


def as_fraction(x) -> Fraction:
    """Exact conversion; floats go through their decimal repr ("0.1" -> 1/10)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class ModelParamsExact:
    rho: Fraction
    q: Fraction = Fraction(0)

    def __post_init__(self):
        rho, q = as_fraction(self.rho), as_fraction(self.q)
        if not 0 < rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {rho}")
        if not 0 <= q < 1:
            raise ValueError(f"q must lie in [0, 1), got {q}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "q", q)

    @property
    def p(self) -> Fraction:
        return 1 - self.q


@dataclass(frozen=True)
class CoeffTables:
    rho: Fraction
    order: int
    P: tuple
    A: tuple
    a: tuple = field(repr=False)

    def a_at(self, k: int, j: int) -> PolyZ:
        """a[k][j] with the zero convention outside 0 <= j <= k."""
        if k < 0 or j < 0 or j > k:
            return PolyZ()
        return self.a[k][j]

    def A_at(self, k: int, j: int) -> PolyZ:
        if k < 0 or j < 0 or j > k:
            return PolyZ()
        return self.A[k][j]

    def series(self) -> QSeriesPoly:
        """The truncated expansion sum_{k<=N} q^k P^(k)(z, y)."""
        return QSeriesPoly(self.order, self.P)


def _check_rho(rho) -> Fraction:
    rho = as_fraction(rho)
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    return rho


def _rho_of(params) -> Fraction:
    if isinstance(params, ModelParamsExact):
        return params.rho
    return _check_rho(params)


def _load(rho: Fraction) -> PolyZ:
    """1 + rho (z - 1)."""
    return PolyZ.of(1 - rho, rho)


def _A_row(rho: Fraction, k: int, a_at) -> list:
    if k == 0:
        return [_load(rho)]
    load = _load(rho)
    row = [PolyZ()]
    for j in range(1, k + 1):
        row.append(a_at(k - j, j - 1) * (j * rho) + load * a_at(k - j, j))
    return row


def _boundary_poly(A_row: list, k: int) -> PolyZ:
    """P^(k)(0, z) = sum_j (z^j - 1)/j! A_j^k(0)."""
    out = PolyZ()
    for j in range(1, k + 1):
        c = A_row[j].coeff(0)
        if c:
            out = out + (PolyZ.monomial(j) - 1) * (c / factorial(j))
    return out


def _assemble(rho: Fraction, k: int, A_row: list) -> BiPoly:
    load = _load(rho)
    if k == 0:
        return BiPoly.from_z(load)
    y_minus_z = BiPoly.y() - BiPoly.z()
    out = BiPoly.from_z(load * _boundary_poly(A_row, k) * (1 / (1 - rho)))
    power = BiPoly.const(1)
    for j in range(1, k + 1):
        power = power * y_minus_z
        if A_row[j]:
            out = out + power * BiPoly.from_z(A_row[j] * Fraction(1, factorial(j)))
    return out


def _a_row_from_P(Pk: BiPoly, k: int) -> list:
    g = BiPoly.from_y(Pk.at_z(0)) + deflate_z(Pk)
    return [g.diff_y(j).diagonal() for j in range(k + 1)]


def build_tables(params, N: int = DEFAULT_ORDER) -> CoeffTables:
    """Coefficient tables up to order N, with ``a`` read off each P^(k).

    ``params`` may be a :class:`ModelParamsExact` or just the rational rho.
    """
    if N < 0:
        raise ValueError("order must be non-negative")
    rho = _rho_of(params)
    P, A, a = [], [], []

    def a_at(k, j):
        return a[k][j] if 0 <= j <= k else PolyZ()

    for k in range(N + 1):
        A_row = _A_row(rho, k, a_at)
        Pk = _assemble(rho, k, A_row)
        A.append(tuple(A_row))
        P.append(Pk)
        a.append(tuple(_a_row_from_P(Pk, k)))
    return CoeffTables(rho, N, tuple(P), tuple(A), tuple(a))


def _inner(f: PolyZ) -> PolyZ:
    """f(0) + (f(z) - f(0)) / z."""
    return f.deflate() + f.coeff(0)


def build_tables_via_a_recursion(params, N: int = DEFAULT_ORDER) -> CoeffTables:
    """Same tables, but ``a`` comes from a self-contained recursion in k.

    For l >= 1, with B_j = j rho a[k-j][j-1](0) + (1 - rho) a[k-j][j](0):

      a[k][l] = sum_{j=l+1}^{k} z^{j-l-1} (z - 1) / (j - l)! B_j
                + l rho inner(a[k-l][l-1]) + rho a[k-l][l]
                + (1 - rho) inner(a[k-l][l])

    where inner(f) = f(0) + (f(z) - f(0))/z, and

      a[k][0] = sum_{j=1}^{k} (z^j - 1) / (j! (1 - rho)) B_j.
    """
    if N < 0:
        raise ValueError("order must be non-negative")
    rho = _rho_of(params)
    a = [(PolyZ.const(1),)]

    def a_at(k, j):
        return a[k][j] if 0 <= j <= k else PolyZ()

    for k in range(1, N + 1):
        B = [Fraction(0)] * (k + 1)
        for j in range(1, k + 1):
            B[j] = j * rho * a_at(k - j, j - 1).coeff(0) + (1 - rho) * a_at(k - j, j).coeff(0)
        row = [PolyZ()] * (k + 1)
        zero_term = PolyZ()
        for j in range(1, k + 1):
            if B[j]:
                zero_term = zero_term + (PolyZ.monomial(j) - 1) * (B[j] / (factorial(j) * (1 - rho)))
        row[0] = zero_term
        for l in range(1, k + 1):
            acc = PolyZ()
            for j in range(l + 1, k + 1):
                if B[j]:
                    acc = acc + PolyZ.monomial(j - l - 1) * PolyZ.of(-1, 1) * (B[j] / factorial(j - l))
            acc = acc + _inner(a_at(k - l, l - 1)) * (l * rho)
            acc = acc + a_at(k - l, l) * rho
            acc = acc + _inner(a_at(k - l, l)) * (1 - rho)
            row[l] = acc
        a.append(tuple(row))

    A, P = [], []
    for k in range(N + 1):
        A_row = _A_row(rho, k, a_at)
        A.append(tuple(A_row))
        P.append(_assemble(rho, k, A_row))
    return CoeffTables(rho, N, tuple(P), tuple(A), tuple(a))


# --------------------------------------------------------------------------
# read-outs
# --------------------------------------------------------------------------


def queue_pmf(tables: CoeffTables, q, n_max: int) -> list:
    """P_n = sum_k q^k [z^n] P^(k)(z, 1) for n = 0..n_max, exact."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    q = as_fraction(q)
    out = [Fraction(0)] * (n_max + 1)
    qk = Fraction(1)
    for Pk in tables.P:
        marg = Pk.at_y(1)
        for n in range(min(n_max, marg.degree) + 1):
            out[n] += qk * marg.coeff(n)
        qk *= q
    return out


def support_size(tables: CoeffTables) -> int:
    """Number of queue-length states carrying mass in the truncated series."""
    return max(Pk.deg_z for Pk in tables.P) + 1


def mean_queue_length(tables: CoeffTables, q) -> Fraction:
    q = as_fraction(q)
    total = Fraction(0)
    qk = Fraction(1)
    for Pk in tables.P:
        total += qk * Pk.at_y(1).derivative()(Fraction(1))
        qk *= q
    return total


def check_functional_equation(tables: CoeffTables, N: int | None = None) -> QSeriesPoly:
    """Residual of z P(z,y) = (1 - rho + rho v)[(z - 1) P(0, v) + P(z, v)], v = qy + (1-q)z.

    The bracket vanishes at z = 0, so the right-hand side is divided by z
    exactly; the returned series is P - RHS truncated at order N.
    """
    N = tables.order if N is None else N
    if N > tables.order:
        raise ValueError(f"tables only reach order {tables.order}")
    rho = tables.rho
    P = QSeriesPoly(N, tables.P[: N + 1])
    P_at_v = subst_y(P)
    P0 = P.map(lambda t: BiPoly.from_y(t.at_z(0)))
    P0_at_v = subst_y(P0)

    z_minus_1 = BiPoly.from_z(PolyZ.of(-1, 1))
    bracket = P0_at_v * z_minus_1 + P_at_v
    # 1 - rho + rho v = (1 - rho + rho z) + q rho (y - z)
    factor_terms = [BiPoly.from_z(_load(rho))]
    if N >= 1:
        factor_terms.append((BiPoly.y() - BiPoly.z()) * rho)
    numerator = QSeriesPoly(N, tuple(factor_terms)) * bracket

    for k, t in enumerate(numerator.terms):
        if t.rows and any(t.rows[0]):
            raise ArithmeticError(f"right-hand side not divisible by z at q-order {k}")
    return P - deflate_z(numerator)


@dataclass
class IdentityCheck:
    name: str
    k: int
    passed: bool


def check_boundary_identities(tables: CoeffTables) -> list:
    """Exact boundary identities, one record per (identity, order)."""
    rho = tables.rho
    load = _load(rho)
    out = []
    for k, Pk in enumerate(tables.P):
        at01 = Pk(0, 1)
        if k == 0:
            out.append(IdentityCheck("P(0,1)=1-rho", 0, at01 == 1 - rho))
            out.append(IdentityCheck("P(1,1)=1", 0, Pk(1, 1) == 1))
        else:
            out.append(IdentityCheck("P(0,1)=0", k, at01 == 0))
            out.append(IdentityCheck("P(1,1)=0", k, Pk(1, 1) == 0))
        diag = Pk.diagonal() * (1 - rho)
        out.append(IdentityCheck("P(z,z)(1-rho)=P(0,z)(1+rho(z-1))", k, diag == Pk.at_z(0) * load))
    return out


def sparsity_profile(tables: CoeffTables) -> list:
    """``[(k, deg_y P^(k))]`` for every stored order."""
    return [(k, max(Pk.deg_y, 0)) for k, Pk in enumerate(tables.P)]


def first_orders_by_y_degree(tables: CoeffTables) -> dict:
    """Smallest k at which each y-degree m first appears."""
    first = {}
    for k, m in sparsity_profile(tables):
        first.setdefault(m, k)
    return first
