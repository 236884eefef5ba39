"""Exact octonions in the basis {1, i, j, k, l, il, jl, kl}.

Products follow the (row)(column) order of the multiplication table:

>>> from fatlab.octonion import basis, oct_mul
>>> oct_mul(basis("i"), basis("j")) == basis("k")
True
>>> oct_mul(basis("jl"), basis("kl")) == -basis("i")
True
>>> oct_mul(basis("i"), basis("l")) == basis("il")
True
>>> oct_mul(basis("l"), basis("i")) == -basis("il")
True
>>> oct_mul(basis("j"), basis("l")) == basis("jl")
True
>>> oct_mul(basis("kl"), basis("k")) == basis("l")
True
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from fatlab.exactnum import CirclePoint, MatQ, to_rational
from fatlab.exceptions import TableTranscriptionError

__all__ = (
    "BASIS_LABELS",
    "Octonion",
    "basis",
    "label_index",
    "as_octonion",
    "oct_mul",
    "basis_product",
    "conj",
    "norm2",
    "left_mult_matrix",
    "right_mult_matrix",
    "conjugation_map",
    "check_moufang",
    "check_alternative",
)

BASIS_LABELS = ("1", "i", "j", "k", "l", "il", "jl", "kl")
_LABEL_ALIASES = {"ℓ": "l", "iℓ": "il", "jℓ": "jl", "kℓ": "kl", "e0": "1"}

# (sign, index) of row·column for the imaginary units i, j, k, l, il, jl, kl; index 0 is the unit
IMAGINARY_TABLE: Tuple[Tuple[Tuple[int, int], ...], ...] = (
    ((-1, 0), (1, 3), (-1, 2), (1, 5), (-1, 4), (-1, 7), (1, 6)),
    ((-1, 3), (-1, 0), (1, 1), (1, 6), (1, 7), (-1, 4), (-1, 5)),
    ((1, 2), (-1, 1), (-1, 0), (1, 7), (-1, 6), (1, 5), (-1, 4)),
    ((-1, 5), (-1, 6), (-1, 7), (-1, 0), (1, 1), (1, 2), (1, 3)),
    ((1, 4), (-1, 7), (1, 6), (-1, 1), (-1, 0), (-1, 3), (1, 2)),
    ((1, 7), (1, 4), (-1, 5), (-1, 2), (1, 3), (-1, 0), (-1, 1)),
    ((-1, 6), (1, 5), (1, 4), (-1, 3), (-1, 2), (1, 1), (-1, 0)),
)

# cyclically ordered quaternionic lines a·b = c
QUATERNION_LINES = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))


def _full_table() -> List[List[Tuple[int, int]]]:
    table = [[(1, q) for q in range(8)]]
    for p in range(1, 8):
        table.append([(1, p)] + list(IMAGINARY_TABLE[p - 1]))
    return table


_PRODUCT = _full_table()


def _self_test() -> None:
    for p in range(1, 8):
        if _PRODUCT[p][p] != (-1, 0):
            raise TableTranscriptionError(f"Square of {BASIS_LABELS[p]} is {_PRODUCT[p][p]}, expected -1")
        for q in range(p + 1, 8):
            sign, index = _PRODUCT[p][q]
            if _PRODUCT[q][p] != (-sign, index) or index in (0, p, q):
                raise TableTranscriptionError(
                    f"Products of {BASIS_LABELS[p]} and {BASIS_LABELS[q]} are not anti-commuting units"
                )
    for a, b, c in QUATERNION_LINES:
        for left, right, product in ((a, b, c), (b, c, a), (c, a, b)):
            if _PRODUCT[left][right] != (1, product):
                raise TableTranscriptionError(
                    f"{BASIS_LABELS[left]}·{BASIS_LABELS[right]} should be {BASIS_LABELS[product]}"
                )


_self_test()


@dataclass(frozen=True)
class Octonion:
    coords: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        coords = tuple(to_rational(value) for value in self.coords)
        assert len(coords) == 8, f"Octonion needs 8 coordinates, {len(coords)} given"
        object.__setattr__(self, "coords", coords)

    def __str__(self):
        terms = [
            f"{value}" if index == 0 else f"{value}{BASIS_LABELS[index]}"
            for index, value in enumerate(self.coords)
            if value != 0
        ]
        return " + ".join(terms) or "0"

    @classmethod
    def zero(cls) -> "Octonion":
        return cls((0,) * 8)

    @classmethod
    def from_circle(cls, point: CirclePoint, label: str = "i") -> "Octonion":
        """The unit octonion c + s·u for an imaginary basis unit u."""
        index = label_index(label)
        assert index != 0, "the circle direction must be imaginary"
        coords = [Fraction(0)] * 8
        coords[0] = point.c
        coords[index] = point.s
        return cls(tuple(coords))

    def __add__(self, other: "Octonion") -> "Octonion":
        return Octonion(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Octonion") -> "Octonion":
        return Octonion(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Octonion":
        return Octonion(tuple(-a for a in self.coords))

    def __mul__(self, other: object) -> "Octonion":
        if isinstance(other, Octonion):
            return oct_mul(self, other)
        scalar = to_rational(other)
        return Octonion(tuple(scalar * a for a in self.coords))

    def __rmul__(self, scalar: object) -> "Octonion":
        factor = to_rational(scalar)
        return Octonion(tuple(factor * a for a in self.coords))

    @property
    def real(self) -> Fraction:
        return self.coords[0]

    def is_imaginary(self) -> bool:
        return self.coords[0] == 0


def label_index(label: str) -> int:
    name = _LABEL_ALIASES.get(label.strip(), label.strip())
    if name not in BASIS_LABELS:
        raise ValueError(f"Unknown octonion basis label {label!r}")
    return BASIS_LABELS.index(name)


def basis(label) -> Octonion:
    index = label if isinstance(label, int) else label_index(label)
    coords = [0] * 8
    coords[index] = 1
    return Octonion(tuple(coords))


def basis_product(p: int, q: int) -> Tuple[int, int]:
    """(sign, index) with e_p·e_q = sign·e_index."""
    return _PRODUCT[p][q]


def oct_mul(a: Octonion, b: Octonion) -> Octonion:
    result = [Fraction(0)] * 8
    for p, left in enumerate(a.coords):
        if not left:
            continue
        for q, right in enumerate(b.coords):
            if not right:
                continue
            sign, index = _PRODUCT[p][q]
            result[index] += sign * left * right
    return Octonion(tuple(result))


def conj(a: Octonion) -> Octonion:
    return Octonion((a.coords[0],) + tuple(-value for value in a.coords[1:]))


def norm2(a: Octonion) -> Fraction:
    return sum((value * value for value in a.coords), Fraction(0))


def _columns_to_matrix(columns: Sequence[Octonion]) -> MatQ:
    return MatQ.from_columns([column.coords for column in columns])


def left_mult_matrix(u: Octonion) -> MatQ:
    return _columns_to_matrix([oct_mul(u, basis(index)) for index in range(8)])


def right_mult_matrix(u: Octonion) -> MatQ:
    return _columns_to_matrix([oct_mul(basis(index), u) for index in range(8)])


def conjugation_map(u: Octonion) -> MatQ:
    """x ↦ u(x ū); for an imaginary unit u it fixes 1 and u and negates their complement."""
    return left_mult_matrix(u) @ right_mult_matrix(conj(u))


def as_octonion(vector: Sequence[object]) -> Octonion:
    return Octonion(tuple(vector))


def check_moufang(a: Octonion, b: Octonion, c: Octonion) -> bool:
    first = oct_mul(oct_mul(a, b), oct_mul(c, a)) == oct_mul(oct_mul(a, oct_mul(b, c)), a)
    second = oct_mul(oct_mul(oct_mul(a, b), a), c) == oct_mul(a, oct_mul(b, oct_mul(a, c)))
    third = oct_mul(oct_mul(oct_mul(a, b), c), b) == oct_mul(a, oct_mul(b, oct_mul(c, b)))
    return first and second and third


def check_alternative(a: Octonion, b: Octonion) -> bool:
    return (
        oct_mul(a, oct_mul(a, b)) == oct_mul(oct_mul(a, a), b)
        and oct_mul(oct_mul(b, a), a) == oct_mul(b, oct_mul(a, a))
    )
