"""Exact arithmetic in the rational span of 1, A, ..., G.

The eight generators are

    X0 = 1
    X1 = A = sqrt(2)                = 2 cos(pi/4)
    X2 = B = sqrt(2 + sqrt(2))      = 2 cos(pi/8)
    X3 = C = sqrt(2 - sqrt(2))      = 2 sin(pi/8)
    X4 = D = sqrt(2 + B)            = 2 cos(pi/16)
    X5 = E = sqrt(2 + C)            = 2 cos(3 pi/16)
    X6 = F = sqrt(2 - B)            = 2 sin(pi/16)
    X7 = G = sqrt(2 - C)            = 2 sin(3 pi/16)

Their rational span is the real field Q(cos(pi/16)) of degree 8, closed under the
product table below.  Elements are immutable and hashable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import mpmath

__all__ = [
    "GENERATORS",
    "PRODUCT_TABLE",
    "FieldElement",
    "SingularElementError",
    "mul",
    "inverse",
    "evaluate",
    "from_trig",
    "generator",
    "generator_values",
]

GENERATORS = ("1", "A", "B", "C", "D", "E", "F", "G")
_INDEX = {name: i for i, name in enumerate(GENERATORS)}

# Upper triangle of the generator product table; each entry maps generator -> integer.
PRODUCT_TABLE: dict[tuple[str, str], dict[str, int]] = {
    ("A", "A"): {"1": 2},
    ("A", "B"): {"B": 1, "C": 1},
    ("A", "C"): {"B": 1, "C": -1},
    ("A", "D"): {"E": 1, "G": 1},
    ("A", "E"): {"D": 1, "F": 1},
    ("A", "F"): {"E": 1, "G": -1},
    ("A", "G"): {"D": 1, "F": -1},
    ("B", "B"): {"1": 2, "A": 1},
    ("B", "C"): {"A": 1},
    ("B", "D"): {"D": 1, "E": 1},
    ("B", "E"): {"D": 1, "G": 1},
    ("B", "F"): {"F": -1, "G": 1},
    ("B", "G"): {"E": 1, "F": 1},
    ("C", "C"): {"1": 2, "A": -1},
    ("C", "D"): {"F": 1, "G": 1},
    ("C", "E"): {"E": 1, "F": -1},
    ("C", "F"): {"D": 1, "E": -1},
    ("C", "G"): {"D": 1, "G": -1},
    ("D", "D"): {"1": 2, "B": 1},
    ("D", "E"): {"A": 1, "B": 1},
    ("D", "F"): {"C": 1},
    ("D", "G"): {"A": 1, "C": 1},
    ("E", "E"): {"1": 2, "C": 1},
    ("E", "F"): {"A": 1, "C": -1},
    ("E", "G"): {"B": 1},
    ("F", "F"): {"1": 2, "B": -1},
    ("F", "G"): {"A": -1, "B": 1},
    ("G", "G"): {"1": 2, "C": -1},
}

Number = Union[int, Fraction]


class SingularElementError(ArithmeticError):
    """Raised when inverting an element that is zero in the field."""


def _build_structure() -> tuple[tuple[tuple[int, ...], ...], ...]:
    tensor = [[[0] * 8 for _ in range(8)] for _ in range(8)]
    for i in range(8):
        tensor[0][i][i] = 1
        tensor[i][0][i] = 1
    for (u, v), entry in PRODUCT_TABLE.items():
        i, j = _INDEX[u], _INDEX[v]
        for name, c in entry.items():
            tensor[i][j][_INDEX[name]] = c
            tensor[j][i][_INDEX[name]] = c
    return tuple(tuple(tuple(row) for row in plane) for plane in tensor)


# STRUCTURE[i][j][k]: coefficient of X_k in X_i * X_j
STRUCTURE = _build_structure()


def generator_values() -> tuple[float, ...]:
    """Machine-precision values of X0..X7 from nested square roots."""
    a = math.sqrt(2.0)
    b = math.sqrt(2.0 + a)
    c = math.sqrt(2.0 - a)
    return (1.0, a, b, c,
            math.sqrt(2.0 + b), math.sqrt(2.0 + c),
            math.sqrt(2.0 - b), math.sqrt(2.0 - c))


@lru_cache(maxsize=8)
def _mp_generator_values(dps: int) -> tuple:
    with mpmath.workdps(dps):
        two = mpmath.mpf(2)
        a = mpmath.sqrt(two)
        b = mpmath.sqrt(two + a)
        c = mpmath.sqrt(two - a)
        return (mpmath.mpf(1), a, b, c,
                mpmath.sqrt(two + b), mpmath.sqrt(two + c),
                mpmath.sqrt(two - b), mpmath.sqrt(two - c))


_FLOAT_VALUES = generator_values()


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        if not x.is_integer():
            raise TypeError(f"refusing to convert inexact float {x!r} to a rational coefficient")
        return Fraction(int(x))
    raise TypeError(f"cannot use {type(x).__name__} as a rational coefficient")


class FieldElement:
    """Element sum_q coeffs[q] * X_q with rational coefficients."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Iterable = (0,) * 8):
        values = tuple(_as_fraction(c) for c in coeffs)
        if len(values) != 8:
            raise ValueError(f"expected 8 coefficients, got {len(values)}")
        self._coeffs = values
        self._hash = None

    @classmethod
    def rational(cls, value: Number) -> "FieldElement":
        return cls((value, 0, 0, 0, 0, 0, 0, 0))

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    def __getitem__(self, q: int) -> Fraction:
        return self._coeffs[q]

    # arithmetic

    def _coerce(self, other) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement.rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(a + b for a, b in zip(self._coeffs, o._coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(a - b for a, b in zip(self._coeffs, o._coeffs))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return FieldElement(-a for a in self._coeffs)

    def __pos__(self):
        return self

    def scale(self, factor: Number) -> "FieldElement":
        f = _as_fraction(factor)
        return FieldElement(a * f for a in self._coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, FieldElement):
            return mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / _as_fraction(other))
        if isinstance(other, FieldElement):
            return mul(self, inverse(other))
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return mul(o, inverse(self))

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return inverse(self) ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = mul(result, base)
            base = mul(base, base)
            k >>= 1
        return result

    # comparison / hashing

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._coeffs == o._coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._coeffs)
        return self._hash

    def __bool__(self):
        return any(self._coeffs)

    def is_zero(self) -> bool:
        return not any(self._coeffs)

    def is_rational(self) -> bool:
        return not any(self._coeffs[1:])

    def in_span(self, indices: Sequence[int]) -> bool:
        """True when only generators with the given indices carry nonzero coefficients."""
        allowed = set(indices)
        return all(c == 0 for q, c in enumerate(self._coeffs) if q not in allowed)

    def denominator_lcm(self) -> int:
        return math.lcm(*(c.denominator for c in self._coeffs))

    # numeric views

    def __float__(self) -> float:
        return evaluate(self)

    def to_mpf(self, dps: int = 50):
        values = _mp_generator_values(dps)
        with mpmath.workdps(dps):
            total = mpmath.mpf(0)
            for c, x in zip(self._coeffs, values):
                if c:
                    total += mpmath.mpf(c.numerator) / c.denominator * x
            return total

    def sign(self) -> int:
        """Sign of the real value, decided at increasing precision."""
        if self.is_zero():
            return 0
        for dps in (30, 60, 120, 240):
            v = self.to_mpf(dps)
            if abs(v) > mpmath.mpf(10) ** (-(dps - 10)):
                return 1 if v > 0 else -1
        raise ArithmeticError("nonzero element indistinguishable from zero")  # pragma: no cover

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # serialization

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self._coeffs]

    @classmethod
    def from_json(cls, items: Sequence[str]) -> "FieldElement":
        return cls(Fraction(s) for s in items)

    def __repr__(self):
        return f"FieldElement({', '.join(str(c) for c in self._coeffs)})"

    def __str__(self):
        parts = []
        for name, c in zip(GENERATORS, self._coeffs):
            if not c:
                continue
            if name == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(name)
            elif c == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"{c}*{name}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def generator(q: int | str) -> FieldElement:
    """The generator X_q, by index or by letter."""
    i = _INDEX[q] if isinstance(q, str) else int(q)
    coeffs = [0] * 8
    coeffs[i] = 1
    return FieldElement(coeffs)


ZERO = FieldElement()
ONE = generator(0)
A, B, C, D, E, F, G = (generator(q) for q in range(1, 8))


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Product by bilinear extension of the generator table."""
    out = [Fraction(0)] * 8
    ac, bc = a.coeffs, b.coeffs
    for i in range(8):
        ai = ac[i]
        if not ai:
            continue
        row = STRUCTURE[i]
        for j in range(8):
            bj = bc[j]
            if not bj:
                continue
            w = ai * bj
            for k, t in enumerate(row[j]):
                if t:
                    out[k] += w * t
    return FieldElement(out)


def multiplication_matrix(a: FieldElement) -> list[list[Fraction]]:
    """Matrix M with M @ coeffs(x) == coeffs(a * x)."""
    m = [[Fraction(0)] * 8 for _ in range(8)]
    for i, ai in enumerate(a.coeffs):
        if not ai:
            continue
        for j in range(8):
            for k, t in enumerate(STRUCTURE[i][j]):
                if t:
                    m[k][j] += ai * t
    return m


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rhs)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularElementError("multiplication matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def inverse(a: FieldElement) -> FieldElement:
    """Exact reciprocal by solving a * x = 1 over the rationals."""
    if a.is_zero():
        raise SingularElementError("zero has no inverse")
    if a.is_rational():
        return ONE.scale(Fraction(1) / a.coeffs[0])
    x = _solve(multiplication_matrix(a), [Fraction(1)] + [Fraction(0)] * 7)
    return FieldElement(x)


def evaluate(a: FieldElement) -> float:
    """sum_q coeffs[q] * X_q at machine precision."""
    return math.fsum(float(c) * x for c, x in zip(a.coeffs, _FLOAT_VALUES) if c)


# cos(k pi/16) for k = 0..8
_COS16 = (ONE, D.scale(Fraction(1, 2)), B.scale(Fraction(1, 2)), E.scale(Fraction(1, 2)),
          A.scale(Fraction(1, 2)), G.scale(Fraction(1, 2)), C.scale(Fraction(1, 2)),
          F.scale(Fraction(1, 2)), ZERO)


def _cos16(k: int) -> FieldElement:
    k %= 32
    if k > 16:
        k = 32 - k
    if k <= 8:
        return _COS16[k]
    return -_COS16[16 - k]


def from_trig(kind: str, numerator: int) -> FieldElement:
    """cos or sin of numerator * pi/16 as an exact field element."""
    if isinstance(numerator, bool) or not isinstance(numerator, int):
        raise ValueError(f"angle must be an integer multiple of pi/16, got {numerator!r}")
    if kind in ("cos", "cosine"):
        return _cos16(numerator)
    if kind in ("sin", "sine"):
        return _cos16(8 - numerator)
    raise ValueError(f"unknown trigonometric function {kind!r}")
