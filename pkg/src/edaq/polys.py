"""Exact dense polynomials over the rationals.

Three containers are provided:

  PolyZ        univariate, ``coeffs[i]`` is the coefficient of the i-th power
  BiPoly       bivariate in (z, y), ``rows[i][j]`` is the coefficient of z^i y^j
  QSeriesPoly  a power series in q truncated at a fixed order, whose
               coefficients are BiPoly

Every value is immutable and kept in canonical form (no trailing zeros), so
structural equality is polynomial equality.  The zero polynomial has an empty
representation.

PolyZ is also used for polynomials in y alone (for instance f(0, y)); the
variable name is a matter of context.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"exact coefficient expected, got {type(x).__name__}")


def _trim(seq: Iterable) -> tuple:
    out = [_frac(c) for c in seq]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _horner(coeffs: Sequence, x):
    acc = 0 if isinstance(x, (int, Fraction)) else 0.0
    if not isinstance(x, (int, Fraction)):
        coeffs = [float(c) if isinstance(c, Fraction) else c for c in coeffs]
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


# --------------------------------------------------------------------------
# univariate
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyZ:
    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def of(cls, *coeffs: Scalar) -> PolyZ:
        return cls(tuple(coeffs))

    @classmethod
    def const(cls, c: Scalar) -> PolyZ:
        return cls((c,))

    @classmethod
    def monomial(cls, power: int, c: Scalar = 1) -> PolyZ:
        return cls((0,) * power + (c,))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __add__(self, other):
        if _is_scalar(other):
            other = PolyZ.const(other)
        if not isinstance(other, PolyZ):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return PolyZ(tuple(x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)))

    __radd__ = __add__

    def __neg__(self) -> PolyZ:
        return PolyZ(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if _is_scalar(other):
            other = PolyZ.const(other)
        if not isinstance(other, PolyZ):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return PolyZ(tuple(c * other for c in self.coeffs))
        if not isinstance(other, PolyZ):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return PolyZ()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return PolyZ(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> PolyZ:
        out = PolyZ.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, x):
        return _horner(self.coeffs, x)

    def deflate(self) -> PolyZ:
        """(f(x) - f(0)) / x."""
        return PolyZ(self.coeffs[1:])

    def derivative(self, times: int = 1) -> PolyZ:
        c = list(self.coeffs)
        for _ in range(times):
            c = [i * c[i] for i in range(1, len(c))]
        return PolyZ(tuple(c))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "PolyZ(0)"
        return "PolyZ(" + ", ".join(str(c) for c in self.coeffs) + ")"


# --------------------------------------------------------------------------
# bivariate
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BiPoly:
    rows: tuple = ()

    def __post_init__(self):
        rows = [_trim(r) for r in self.rows]
        while rows and not rows[-1]:
            rows.pop()
        object.__setattr__(self, "rows", tuple(rows))

    @classmethod
    def from_dict(cls, terms: dict) -> BiPoly:
        """Build from ``{(i, j): coeff}`` meaning coeff * z^i * y^j."""
        if not terms:
            return cls()
        dz = max(i for i, _ in terms) + 1
        dy = max(j for _, j in terms) + 1
        grid = [[Fraction(0)] * dy for _ in range(dz)]
        for (i, j), c in terms.items():
            grid[i][j] += _frac(c)
        return cls(tuple(tuple(r) for r in grid))

    @classmethod
    def const(cls, c: Scalar) -> BiPoly:
        return cls(((c,),))

    @classmethod
    def z(cls) -> BiPoly:
        return cls(((), (1,)))

    @classmethod
    def y(cls) -> BiPoly:
        return cls(((0, 1),))

    @classmethod
    def from_z(cls, p: PolyZ) -> BiPoly:
        return cls(tuple((c,) for c in p.coeffs))

    @classmethod
    def from_y(cls, p: PolyZ) -> BiPoly:
        return cls((p.coeffs,))

    def __bool__(self) -> bool:
        return bool(self.rows)

    @property
    def deg_z(self) -> int:
        return len(self.rows) - 1

    @property
    def deg_y(self) -> int:
        return max((len(r) for r in self.rows), default=0) - 1

    def coeff(self, i: int, j: int) -> Fraction:
        if 0 <= i < len(self.rows) and 0 <= j < len(self.rows[i]):
            return self.rows[i][j]
        return Fraction(0)

    def terms(self):
        """Yield ``((i, j), coeff)`` for every non-zero coefficient."""
        for i, row in enumerate(self.rows):
            for j, c in enumerate(row):
                if c:
                    yield (i, j), c

    def __add__(self, other):
        if _is_scalar(other):
            other = BiPoly.const(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        n = max(len(self.rows), len(other.rows))
        rows = []
        for i in range(n):
            a = self.rows[i] if i < len(self.rows) else ()
            b = other.rows[i] if i < len(other.rows) else ()
            if len(a) < len(b):
                a, b = b, a
            rows.append(tuple(x + (b[j] if j < len(b) else 0) for j, x in enumerate(a)))
        return BiPoly(tuple(rows))

    __radd__ = __add__

    def __neg__(self) -> BiPoly:
        return BiPoly(tuple(tuple(-c for c in r) for r in self.rows))

    def __sub__(self, other):
        if _is_scalar(other):
            other = BiPoly.const(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return BiPoly(tuple(tuple(c * other for c in r) for r in self.rows))
        if not isinstance(other, BiPoly):
            return NotImplemented
        if not self.rows or not other.rows:
            return BiPoly()
        dz = len(self.rows) + len(other.rows) - 1
        dy = self.deg_y + other.deg_y + 1
        grid = [[Fraction(0)] * dy for _ in range(dz)]
        for (i1, j1), c1 in self.terms():
            for (i2, j2), c2 in other.terms():
                grid[i1 + i2][j1 + j2] += c1 * c2
        return BiPoly(tuple(tuple(r) for r in grid))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> BiPoly:
        out = BiPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, z, y):
        return _horner([_horner(r, y) for r in self.rows], z)

    def at_z(self, z0) -> PolyZ:
        """The polynomial in y obtained by fixing z = z0 (exact for rational z0)."""
        dy = self.deg_y + 1
        return PolyZ(tuple(_horner([self.coeff(i, j) for i in range(len(self.rows))], z0)
                           for j in range(dy)))

    def at_y(self, y0) -> PolyZ:
        """The polynomial in z obtained by fixing y = y0."""
        return PolyZ(tuple(_horner(r, y0) for r in self.rows))

    def diagonal(self) -> PolyZ:
        """f(z, z) as a polynomial in z."""
        out = [Fraction(0)] * max(self.deg_z + self.deg_y + 1, 0)
        for (i, j), c in self.terms():
            out[i + j] += c
        return PolyZ(tuple(out))

    def deflate_z(self) -> BiPoly:
        return BiPoly(self.rows[1:])

    def diff_y(self, j: int = 1) -> BiPoly:
        if j < 0:
            raise ValueError("derivative order must be non-negative")
        rows = []
        for r in self.rows:
            rows.append(tuple(c * _falling(m + j, j) for m, c in enumerate(r[j:])))
        return BiPoly(tuple(rows))

    def __repr__(self) -> str:
        if not self.rows:
            return "BiPoly(0)"
        parts = [f"{c}*z^{i}*y^{j}" for (i, j), c in self.terms()]
        return "BiPoly(" + " + ".join(parts) + ")"


def _falling(n: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= n - t
    return out


# --------------------------------------------------------------------------
# truncated q-series
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QSeriesPoly:
    """sum_{k <= order} q^k terms[k](z, y), all products truncated at ``order``."""

    order: int
    terms: tuple = ()

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("q-order must be non-negative")
        terms = list(self.terms)
        if len(terms) > self.order + 1:
            raise ValueError(f"{len(terms)} terms exceed q-order {self.order}")
        for t in terms:
            if not isinstance(t, BiPoly):
                raise TypeError("QSeriesPoly terms must be BiPoly")
        terms += [BiPoly()] * (self.order + 1 - len(terms))
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def constant(cls, f: BiPoly, order: int) -> QSeriesPoly:
        return cls(order, (f,))

    @classmethod
    def q(cls, order: int) -> QSeriesPoly:
        """The formal variable q itself (zero when order is 0)."""
        if order == 0:
            return cls(0)
        return cls(order, (BiPoly(), BiPoly.const(1)))

    def __bool__(self) -> bool:
        return any(self.terms)

    def _check(self, other: QSeriesPoly):
        if other.order != self.order:
            raise ValueError(f"q-order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, QSeriesPoly):
            return NotImplemented
        self._check(other)
        return QSeriesPoly(self.order, tuple(a + b for a, b in zip(self.terms, other.terms)))

    def __neg__(self) -> QSeriesPoly:
        return QSeriesPoly(self.order, tuple(-t for t in self.terms))

    def __sub__(self, other):
        if not isinstance(other, QSeriesPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if _is_scalar(other) or isinstance(other, BiPoly):
            return QSeriesPoly(self.order, tuple(t * other for t in self.terms))
        if not isinstance(other, QSeriesPoly):
            return NotImplemented
        self._check(other)
        out = [BiPoly()] * (self.order + 1)
        for i, a in enumerate(self.terms):
            if not a:
                continue
            for j in range(self.order + 1 - i):
                b = other.terms[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return QSeriesPoly(self.order, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> QSeriesPoly:
        out = QSeriesPoly.constant(BiPoly.const(1), self.order)
        for _ in range(n):
            out = out * self
        return out

    def map(self, fn) -> QSeriesPoly:
        """Apply a linear map to every coefficient."""
        return QSeriesPoly(self.order, tuple(fn(t) for t in self.terms))

    def __call__(self, z, y, q):
        return _horner([t(z, y) for t in self.terms], q)

    def __repr__(self) -> str:
        return f"QSeriesPoly(order={self.order}, terms={list(self.terms)!r})"


# --------------------------------------------------------------------------
# functional API
# --------------------------------------------------------------------------

Poly = Union[PolyZ, BiPoly, QSeriesPoly]


def _same_kind(a, b):
    if type(a) is not type(b):
        raise TypeError(f"cannot combine {type(a).__name__} with {type(b).__name__}")


def poly_add(a: Poly, b: Poly) -> Poly:
    _same_kind(a, b)
    return a + b


def poly_mul(a: Poly, b: Poly) -> Poly:
    _same_kind(a, b)
    return a * b


def deflate_z(f):
    """(f - f|_{z=0}) / z, always exact."""
    if isinstance(f, PolyZ):
        return f.deflate()
    if isinstance(f, BiPoly):
        return f.deflate_z()
    if isinstance(f, QSeriesPoly):
        return f.map(BiPoly.deflate_z)
    raise TypeError(type(f).__name__)


def diff_y(f, j: int = 1):
    """j-th partial derivative in y; ``j == 0`` returns f unchanged."""
    if isinstance(f, BiPoly):
        return f.diff_y(j)
    if isinstance(f, QSeriesPoly):
        return f.map(lambda t: t.diff_y(j))
    raise TypeError(type(f).__name__)


def affine_arg(order: int) -> QSeriesPoly:
    """z + q (y - z), i.e. q y + (1 - q) z, as a truncated q-series."""
    y_minus_z = BiPoly.y() - BiPoly.z()
    terms = (BiPoly.z(), y_minus_z) if order >= 1 else (BiPoly.z(),)
    return QSeriesPoly(order, terms)


def subst_y(f) -> QSeriesPoly:
    """Compose f(z, y) with y -> q y + (1 - q) z, truncating at f's q-order.

    A bare BiPoly is treated as a q-series of order 0.
    """
    if isinstance(f, BiPoly):
        f = QSeriesPoly.constant(f, 0)
    order = f.order
    arg = affine_arg(order)
    deg = max((t.deg_y for t in f.terms), default=-1)
    powers = [QSeriesPoly.constant(BiPoly.const(1), order)]
    for _ in range(deg):
        powers.append(powers[-1] * arg)

    out = [BiPoly()] * (order + 1)
    for k, t in enumerate(f.terms):
        if not t:
            continue
        for j in range(t.deg_y + 1):
            cz = BiPoly(tuple((t.coeff(i, j),) for i in range(t.deg_z + 1)))
            if not cz:
                continue
            pw = powers[j]
            for m in range(order + 1 - k):
                if pw.terms[m]:
                    out[k + m] = out[k + m] + cz * pw.terms[m]
    return QSeriesPoly(order, tuple(out))


def evaluate(f: Poly, *point):
    """Evaluate at a point; exact for int/Fraction inputs, float otherwise."""
    arity = {PolyZ: 1, BiPoly: 2, QSeriesPoly: 3}[type(f)]
    if len(point) != arity:
        raise ValueError(f"{type(f).__name__} takes {arity} arguments, got {len(point)}")
    return f(*point)

