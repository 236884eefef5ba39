import logging
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from fatlab.exceptions import DimensionMismatchError, NotOnCircleError

__all__ = (
    "Rational",
    "to_rational",
    "CirclePoint",
    "circle_compose",
    "MatQ",
    "fraction_free_echelon",
    "rank",
    "kernel",
    "solve",
    "inverse",
    "PolyMat",
    "PolyRankReport",
    "Locus",
    "generic_rank",
    "degenerate_loci",
)

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction, str]


def to_rational(value: object) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"Cannot convert {value!r} of type {type(value).__name__} to an exact rational")


def _height(value: Fraction) -> int:
    return max(abs(value.numerator), value.denominator)


@dataclass(frozen=True)
class CirclePoint:
    """Exact point (c, s) of the unit circle standing for the rotation R(θ) = [[c, -s], [s, c]]."""

    c: Fraction
    s: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", to_rational(self.c))
        object.__setattr__(self, "s", to_rational(self.s))
        if self.c * self.c + self.s * self.s != 1:
            raise NotOnCircleError(f"({self.c}, {self.s}) does not lie on the unit circle")

    def __str__(self):
        return f"CirclePoint({self.c}, {self.s})"

    @classmethod
    def identity(cls) -> "CirclePoint":
        return cls(Fraction(1), Fraction(0))

    @classmethod
    def from_pythagorean(cls, m: int, n: int) -> "CirclePoint":
        assert (m, n) != (0, 0), "m and n must not both vanish"
        denominator = m * m + n * n
        return cls(Fraction(m * m - n * n, denominator), Fraction(2 * m * n, denominator))

    @classmethod
    def random(cls, rng: np.random.Generator, bound: int = 9) -> "CirclePoint":
        while 1:
            m, n = (int(value) for value in rng.integers(-bound, bound + 1, size=2))
            if (m, n) != (0, 0):
                return cls.from_pythagorean(m, n)

    def compose(self, other: "CirclePoint") -> "CirclePoint":
        return circle_compose(self, other)

    def inverse(self) -> "CirclePoint":
        return CirclePoint(self.c, -self.s)

    def opposite(self) -> "CirclePoint":
        # rotation by an extra half turn
        return CirclePoint(-self.c, -self.s)

    def power(self, exponent: int) -> "CirclePoint":
        base = self if exponent >= 0 else self.inverse()
        result = CirclePoint.identity()
        remaining = abs(exponent)
        while remaining:
            if remaining & 1:
                result = result.compose(base)
            base = base.compose(base)
            remaining >>= 1
        return result

    def is_identity(self) -> bool:
        return self.c == 1 and self.s == 0

    def rotation(self) -> List[List[Fraction]]:
        return [[self.c, -self.s], [self.s, self.c]]

    def angle(self) -> float:
        return math.atan2(self.s, self.c)


def circle_compose(a: CirclePoint, b: CirclePoint) -> CirclePoint:
    return CirclePoint(a.c * b.c - a.s * b.s, a.c * b.s + a.s * b.c)


class MatQ:
    """Dense matrix of exact rationals backed by an immutable numpy object array."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[Iterable[object]]) -> None:
        rows = [[to_rational(value) for value in row] for row in entries]
        if not rows or not rows[0] or any(len(row) != len(rows[0]) for row in rows):
            raise DimensionMismatchError("Matrix rows must be non-empty and of equal length")
        array = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                array[i, j] = value
        array.setflags(write=False)
        self._entries = array

    @classmethod
    def _wrap(cls, array: np.ndarray) -> "MatQ":
        matrix = cls.__new__(cls)
        array = np.array(array, dtype=object)
        array.setflags(write=False)
        matrix._entries = array
        return matrix

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "MatQ":
        array = np.empty((rows, cols), dtype=object)
        array.fill(Fraction(0))
        return cls._wrap(array)

    @classmethod
    def identity(cls, size: int) -> "MatQ":
        array = np.empty((size, size), dtype=object)
        array.fill(Fraction(0))
        for i in range(size):
            array[i, i] = Fraction(1)
        return cls._wrap(array)

    @classmethod
    def unit(cls, size: int, i: int, j: int) -> "MatQ":
        array = np.empty((size, size), dtype=object)
        array.fill(Fraction(0))
        array[i, j] = Fraction(1)
        return cls._wrap(array)

    @classmethod
    def block_diagonal(cls, *blocks: "MatQ") -> "MatQ":
        size_rows = sum(block.rows for block in blocks)
        size_cols = sum(block.cols for block in blocks)
        array = np.empty((size_rows, size_cols), dtype=object)
        array.fill(Fraction(0))
        row = col = 0
        for block in blocks:
            array[row:row + block.rows, col:col + block.cols] = block.entries
            row += block.rows
            col += block.cols
        return cls._wrap(array)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[object]]) -> "MatQ":
        return cls(list(zip(*columns)))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def shape(self) -> Tuple[int, int]:
        return self._entries.shape

    @property
    def rows(self) -> int:
        return self._entries.shape[0]

    @property
    def cols(self) -> int:
        return self._entries.shape[1]

    @property
    def T(self) -> "MatQ":
        return MatQ._wrap(self._entries.T)

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        return self._entries[index]

    def __repr__(self):
        return str(self)

    def __str__(self):
        rows = "; ".join(" ".join(str(value) for value in row) for row in self.tolist())
        return f"MatQ[{rows}]"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatQ):
            return NotImplemented
        return self.shape == other.shape and bool((self._entries == other._entries).all())

    def __hash__(self) -> int:
        return hash((self.shape, tuple(self._entries.flat)))

    def _check_shape(self, other: "MatQ") -> None:
        if self.shape != other.shape:
            raise DimensionMismatchError(f"Shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: "MatQ") -> "MatQ":
        self._check_shape(other)
        return MatQ._wrap(self._entries + other._entries)

    def __sub__(self, other: "MatQ") -> "MatQ":
        self._check_shape(other)
        return MatQ._wrap(self._entries - other._entries)

    def __neg__(self) -> "MatQ":
        return MatQ._wrap(-self._entries)

    def __mul__(self, scalar: object) -> "MatQ":
        return MatQ._wrap(self._entries * to_rational(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "MatQ") -> "MatQ":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"Cannot multiply {self.shape} by {other.shape}")
        return MatQ._wrap(self._entries @ other._entries)

    def tolist(self) -> List[List[Fraction]]:
        return [list(row) for row in self._entries]

    def column(self, index: int) -> Tuple[Fraction, ...]:
        return tuple(self._entries[:, index])

    def block(self, offset: int, size: int) -> "MatQ":
        return MatQ._wrap(self._entries[offset:offset + size, offset:offset + size])

    def apply(self, vector: Sequence[object]) -> Tuple[Fraction, ...]:
        if len(vector) != self.cols:
            raise DimensionMismatchError(f"Vector of length {len(vector)} does not fit {self.shape}")
        column = np.array([to_rational(value) for value in vector], dtype=object)
        return tuple(to_rational(value) for value in self._entries @ column)

    def trace(self) -> Fraction:
        return to_rational(sum(self._entries[i, i] for i in range(min(self.shape))))

    def is_zero(self) -> bool:
        return not any(value != 0 for value in self._entries.flat)

    def is_skew(self) -> bool:
        return self.rows == self.cols and bool((self._entries == -self._entries.T).all())

    def skew_coords(self) -> Tuple[Fraction, ...]:
        size = self.rows
        return tuple(self._entries[i, j] for i in range(size) for j in range(i + 1, size))

    def to_float(self) -> np.ndarray:
        return self._entries.astype(float)


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    result = []
    for row in rows:
        scale = reduce(math.lcm, (value.denominator for value in row), 1)
        result.append([int(value * scale) for value in row])
    return result


def fraction_free_echelon(rows: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[int]]:
    """Bareiss elimination over the integers.

    The pivot in each column is the nonzero entry of smallest absolute value,
    ties broken by the first row. Returns the echelon rows and pivot columns.
    """
    matrix = [list(row) for row in rows]
    n_rows = len(matrix)
    n_cols = len(matrix[0]) if matrix else 0
    previous = 1
    pivots: List[int] = []
    for col in range(n_cols):
        rank = len(pivots)
        if rank == n_rows:
            break
        candidates = [i for i in range(rank, n_rows) if matrix[i][col] != 0]
        if not candidates:
            continue
        pivot_row = min(candidates, key=lambda i: (abs(matrix[i][col]), i))
        matrix[rank], matrix[pivot_row] = matrix[pivot_row], matrix[rank]
        pivot = matrix[rank][col]
        for i in range(rank + 1, n_rows):
            factor = matrix[i][col]
            row = matrix[i]
            for j in range(col + 1, n_cols):
                row[j] = (pivot * row[j] - factor * matrix[rank][j]) // previous
            row[col] = 0
        previous = pivot
        pivots.append(col)
    return matrix, pivots


def _back_substitute(
    echelon: Sequence[Sequence[int]],
    pivots: Sequence[int],
    values: List[Fraction],
    augmented: bool = False,
) -> List[Fraction]:
    n_cols = len(values)
    for position in reversed(range(len(pivots))):
        col = pivots[position]
        row = echelon[position]
        total = Fraction(row[-1]) if augmented else Fraction(0)
        for j in range(col + 1, n_cols):
            if row[j]:
                total -= row[j] * values[j]
        values[col] = total / row[col]
    return values


def _primitive(vector: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    scale = reduce(math.lcm, (value.denominator for value in vector), 1)
    integers = [int(value * scale) for value in vector]
    divisor = reduce(math.gcd, integers, 0) or 1
    leading = next(value for value in integers if value != 0)
    if leading < 0:
        divisor = -divisor
    return tuple(Fraction(value, divisor) for value in integers)


def rank(matrix: MatQ) -> int:
    _, pivots = fraction_free_echelon(_integer_rows(matrix.tolist()))
    return len(pivots)


def kernel(matrix: MatQ) -> List[Tuple[Fraction, ...]]:
    echelon, pivots = fraction_free_echelon(_integer_rows(matrix.tolist()))
    pivot_set = set(pivots)
    basis = []
    for free in range(matrix.cols):
        if free in pivot_set:
            continue
        values = [Fraction(0)] * matrix.cols
        values[free] = Fraction(1)
        basis.append(_primitive(_back_substitute(echelon, pivots, values)))
    return basis


def solve(matrix: MatQ, rhs: Sequence[object]) -> Optional[Tuple[Fraction, ...]]:
    """One exact solution of matrix·x = rhs with free variables set to zero, or None."""
    if len(rhs) != matrix.rows:
        raise DimensionMismatchError(f"Right-hand side of length {len(rhs)} does not fit {matrix.shape}")
    augmented = [row + [to_rational(value)] for row, value in zip(matrix.tolist(), rhs)]
    echelon, pivots = fraction_free_echelon(_integer_rows(augmented))
    if pivots and pivots[-1] == matrix.cols:
        return None
    values = [Fraction(0)] * matrix.cols
    return tuple(_back_substitute(echelon, pivots, values, augmented=True))


def inverse(matrix: MatQ) -> MatQ:
    size = matrix.rows
    if size != matrix.cols:
        raise DimensionMismatchError(f"Only square matrices can be inverted, {matrix.shape} given")
    work = [
        row + [Fraction(int(i == j)) for j in range(size)]
        for i, row in enumerate(matrix.tolist())
    ]
    for col in range(size):
        candidates = [i for i in range(col, size) if work[i][col] != 0]
        if not candidates:
            raise ZeroDivisionError("Matrix is singular")
        pivot_row = min(candidates, key=lambda i: (_height(work[i][col]), i))
        work[col], work[pivot_row] = work[pivot_row], work[col]
        pivot = work[col][col]
        work[col] = [value / pivot for value in work[col]]
        for i in range(size):
            factor = work[i][col]
            if i != col and factor != 0:
                work[i] = [a - factor * b for a, b in zip(work[i], work[col])]
    return MatQ([row[size:] for row in work])


def _to_sympy(value: object) -> sympy.Expr:
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, numbers.Integral):
        return sympy.Integer(int(value))
    return sympy.sympify(value)


class PolyMat:
    """Matrix whose entries are polynomials over Q in a fixed set of named variables."""

    def __init__(self, entries: Sequence[Sequence[object]], variables: Sequence[str]) -> None:
        assert variables, "a polynomial matrix needs at least one variable"
        self.variables = tuple(variables)
        self.generators = tuple(sympy.Symbol(name) for name in self.variables)
        rows = [
            [sympy.Poly(_to_sympy(entry), *self.generators, domain=sympy.QQ) for entry in row]
            for row in entries
        ]
        if not rows or any(len(row) != len(rows[0]) for row in rows):
            raise DimensionMismatchError("Polynomial matrix rows must be non-empty and of equal length")
        self.entries: Tuple[Tuple[sympy.Poly, ...], ...] = tuple(tuple(row) for row in rows)

    @classmethod
    def from_linear(cls, constant: Optional[MatQ], terms: Dict[str, MatQ]) -> "PolyMat":
        shapes = {matrix.shape for matrix in terms.values()}
        if constant is not None:
            shapes.add(constant.shape)
        if len(shapes) != 1:
            raise DimensionMismatchError(f"Linear terms have different shapes {shapes}")
        n_rows, n_cols = shapes.pop()
        symbols = {name: sympy.Symbol(name) for name in terms}
        entries = []
        for i in range(n_rows):
            row = []
            for j in range(n_cols):
                expression = _to_sympy(constant[i, j]) if constant is not None else sympy.Integer(0)
                for name, matrix in terms.items():
                    expression += symbols[name] * _to_sympy(matrix[i, j])
                row.append(expression)
            entries.append(row)
        return cls(entries, list(terms))

    def __repr__(self):
        return f"PolyMat({self.shape}, variables={self.variables})"

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def substitute(self, values: Dict[str, object]) -> Union["PolyMat", MatQ]:
        replacements = {
            sympy.Symbol(name): _to_sympy(to_rational(value)) for name, value in values.items()
        }
        remaining = [name for name in self.variables if name not in values]
        expressions = [[entry.as_expr().subs(replacements) for entry in row] for row in self.entries]
        if not remaining:
            return MatQ(expressions)
        return PolyMat(expressions, remaining)


@dataclass(frozen=True)
class PolyRankReport:
    rank: int
    cols: int
    pivots: Tuple[sympy.Poly, ...]
    determinant: Optional[sympy.Expr]

    @property
    def nullity(self) -> int:
        return self.cols - self.rank


@dataclass(frozen=True)
class Locus:
    """Irreducible factor of the generic minor and how its zero set is handled."""

    factor: sympy.Expr
    kind: str
    variables: Tuple[str, ...]


def _poly_height(poly: sympy.Poly) -> Tuple[int, int, object]:
    return (poly.total_degree(), len(poly.terms()), max(abs(coeff) for coeff in poly.coeffs()))


def generic_rank(matrix: PolyMat) -> PolyRankReport:
    """Rank over the rational function field by fraction-free elimination.

    The last recorded pivot is a nonzero maximal minor, so the rank can only drop
    on its zero set.
    """
    work = [list(row) for row in matrix.entries]
    n_rows, n_cols = matrix.shape
    zero = sympy.Poly(0, *matrix.generators, domain=sympy.QQ)
    previous = sympy.Poly(1, *matrix.generators, domain=sympy.QQ)
    sign = 1
    pivots: List[sympy.Poly] = []
    for col in range(n_cols):
        current = len(pivots)
        if current == n_rows:
            break
        candidates = [i for i in range(current, n_rows) if not work[i][col].is_zero]
        if not candidates:
            continue
        pivot_row = min(candidates, key=lambda i: (_poly_height(work[i][col]), i))
        if pivot_row != current:
            work[current], work[pivot_row] = work[pivot_row], work[current]
            sign = -sign
        pivot = work[current][col]
        for i in range(current + 1, n_rows):
            factor = work[i][col]
            for j in range(col + 1, n_cols):
                work[i][j] = (pivot * work[i][j] - factor * work[current][j]).exquo(previous)
            work[i][col] = zero
        previous = pivot
        pivots.append(pivot)
    determinant = None
    if n_rows == n_cols and len(pivots) == n_cols:
        determinant = sympy.expand(sign * pivots[-1].as_expr())
    logger.debug(f"generic rank {len(pivots)} of {matrix}")
    return PolyRankReport(rank=len(pivots), cols=n_cols, pivots=tuple(pivots), determinant=determinant)


def _classify_factor(factor: sympy.Poly, names: Sequence[str]) -> Locus:
    present = tuple(name for name, degree in zip(names, factor.degree_list()) if degree > 0)
    monomials = factor.monoms()
    coefficients = factor.coeffs()
    if len(present) == 1 and factor.total_degree() == 1 and len(monomials) == 1:
        kind = "case"
    elif all(exponent % 2 == 0 for monomial in monomials for exponent in monomial) and (
        all(coeff > 0 for coeff in coefficients) or all(coeff < 0 for coeff in coefficients)
    ):
        kind = "never" if any(sum(monomial) == 0 for monomial in monomials) else "origin"
    elif len(present) == 1 and sympy.Poly(factor.as_expr(), sympy.Symbol(present[0])).count_roots() == 0:
        kind = "never"
    else:
        kind = "unresolved"
    return Locus(factor=factor.as_expr(), kind=kind, variables=present)


def degenerate_loci(report: PolyRankReport, variables: Sequence[str]) -> List[Locus]:
    if not report.pivots:
        return []
    _, factors = report.pivots[-1].factor_list()
    loci = []
    for factor, _multiplicity in factors:
        if factor.is_ground:
            continue
        loci.append(_classify_factor(factor, variables))
    return loci
