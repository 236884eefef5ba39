"""Spin(8) as pairs (A, B) of SO(8) satisfying A(x)B(y) = C(xy), and its circle and SU(2) subgroups."""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy.utilities.iterables import partitions

from fatlab.exactnum import CirclePoint, MatQ
from fatlab.exceptions import (
    DimensionMismatchError,
    InvalidOrderError,
    InvalidPartitionError,
    InvalidPatternError,
    NoExactHalfError,
    TrialityError,
)
from fatlab.octonion import as_octonion, basis_product, left_mult_matrix, oct_mul
from fatlab.utils import parse_integers

__all__ = (
    "SIGMA",
    "TABLE_ORDER",
    "SpinElement",
    "CirclePattern",
    "EnumeratedCircle",
    "Su2Rep",
    "induced_C",
    "triality_check",
    "torus_element",
    "speeds",
    "speed_square_sum",
    "diagonal_rotation",
    "lift_coefficients",
    "lift_C_diagonal",
    "is_free_weights",
    "freeness_witness",
    "is_free_circle",
    "brute_force_free",
    "primitive_patterns",
    "enumerate_free_circles",
    "enumerate_sphere6_circles",
    "torus_weights",
    "su2_table",
    "su2_rows",
    "finite_action_free",
    "is_spin7_member",
    "is_g2_member",
)

logger = logging.getLogger(__name__)

SIGMA = MatQ([[(-1) ** i if i == j else 0 for j in range(8)] for i in range(8)])

# row order of the SU(2) subgroup table
TABLE_ORDER = (
    (5, 1, 1, 1),
    (4, 4),
    (3, 2, 2, 1),
    (3, 1, 1, 1, 1, 1),
    (2, 2, 2, 2),
    (2, 2, 1, 1, 1, 1),
    (7, 1),
    (5, 3),
    (3, 3, 1, 1),
)

BRUTE_FORCE_LIMIT = 1000


def induced_C(A: MatQ, B: MatQ) -> MatQ:
    """Candidate C with C(y) = A(1)·B(y), from setting x = 1 in the triality relation."""
    return left_mult_matrix(as_octonion(A.column(0))) @ B


def triality_check(A: MatQ, B: MatQ, C: MatQ) -> bool:
    """A(e_i)·B(e_j) = C(e_i·e_j) on all 64 basis pairs."""
    for matrix in (A, B, C):
        if matrix.shape != (8, 8):
            raise DimensionMismatchError(f"Triality needs 8×8 matrices, {matrix.shape} given")
    images_a = [as_octonion(A.column(i)) for i in range(8)]
    images_b = [as_octonion(B.column(j)) for j in range(8)]
    for i, x in enumerate(images_a):
        for j, y in enumerate(images_b):
            sign, index = basis_product(i, j)
            expected = tuple(sign * value for value in C.column(index))
            if oct_mul(x, y).coords != expected:
                return False
    return True


def _is_orthogonal(matrix: MatQ) -> bool:
    return matrix @ matrix.T == MatQ.identity(matrix.rows)


@dataclass(frozen=True)
class SpinElement:
    A: MatQ
    B: MatQ

    def __post_init__(self) -> None:
        if self.A.shape != (8, 8) or self.B.shape != (8, 8):
            raise DimensionMismatchError("Spin(8) elements are pairs of 8×8 matrices")
        if not (_is_orthogonal(self.A) and _is_orthogonal(self.B)):
            raise TrialityError("A and B must be orthogonal")
        if not triality_check(self.A, self.B, self.C):
            raise TrialityError("(A, B) has no compatible C")

    @cached_property
    def C(self) -> MatQ:
        return induced_C(self.A, self.B)

    def __neg__(self) -> "SpinElement":
        return SpinElement(-self.A, -self.B)

    def __matmul__(self, other: "SpinElement") -> "SpinElement":
        return SpinElement(self.A @ other.A, self.B @ other.B)

    @classmethod
    def identity(cls) -> "SpinElement":
        return cls(MatQ.identity(8), MatQ.identity(8))


def is_spin7_member(element: SpinElement) -> bool:
    return element.B == element.C


def is_g2_member(element: SpinElement) -> bool:
    return element.A == element.B == element.C


def _rotation_blocks(points: Sequence[CirclePoint]) -> MatQ:
    return MatQ.block_diagonal(*(MatQ(point.rotation()) for point in points))


def torus_element(alpha: Sequence[CirclePoint]) -> SpinElement:
    """Maximal torus point; its C is diag(R(α1+α3), R(α1+α4), R(α2-α4), R(α2+α3))."""
    assert len(alpha) == 4, f"A torus point has 4 angles, {len(alpha)} given"
    a1, a2, a3, a4 = alpha
    A = _rotation_blocks((
        a1,
        a1.compose(a3).compose(a4),
        a2.compose(a3).compose(a4.inverse()),
        a2,
    ))
    B = _rotation_blocks((
        a3,
        a4,
        a1.inverse().compose(a2).compose(a4.inverse()),
        a1.compose(a2).compose(a3),
    ))
    return SpinElement(A, B)


def _torus_angles(c: Sequence[int]) -> Tuple[Fraction, ...]:
    c1, c2, c3, c4 = (Fraction(value) for value in c)
    return (
        (-c1 + c2 + c3 - c4) / 2,
        (c1 + c2 + c3 + c4) / 2,
        (-c1 - c2 - c3 + c4) / 2,
        (c1 + c2 - c3 + c4) / 2,
    )


def speeds(n: Sequence[object]) -> Tuple[Tuple[object, ...], Tuple[object, ...]]:
    """Rotation speeds (ℓ, r) of A and B on the torus point with angles n; works on ints, arrays and symbols."""
    n1, n2, n3, n4 = n
    ell = (n1, n1 + n3 + n4, n2 + n3 - n4, n2)
    r = (n3, n4, -n1 + n2 - n4, n1 + n2 + n3)
    return ell, r


def speed_square_sum(n: Sequence[object]) -> object:
    ell, r = speeds(n)
    return sum(value * value for value in ell + r)


def diagonal_rotation(c: Sequence[int], theta: CirclePoint) -> MatQ:
    """diag(R(-c1 θ), R(c2 θ), R(c3 θ), R(c4 θ)); the first block turns backwards."""
    return _rotation_blocks([theta.power(-c[0])] + [theta.power(value) for value in c[1:]])


def lift_coefficients(c: Sequence[int]) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
    """Rotation speeds of A and B in the lift of diag(R(-c1 θ), R(c2 θ), R(c3 θ), R(c4 θ)); halves when sum(c) is odd."""
    assert len(c) == 4, f"Four rotation coefficients needed, {len(c)} given"
    return speeds(_torus_angles(c))


def lift_C_diagonal(
    c: Sequence[int],
    theta: CirclePoint,
    half: Optional[CirclePoint] = None,
    negate: bool = False,
) -> SpinElement:
    """The lift of diagonal_rotation(c, θ) connected to the identity, or its negative when negate is set."""
    angles = _torus_angles(c)
    if all(angle.denominator == 1 for angle in angles):
        alpha = [theta.power(int(angle)) for angle in angles]
    else:
        if half is None or half.compose(half) != theta:
            raise NoExactHalfError(f"c={tuple(c)} has an odd sum and needs φ with φ² = θ")
        alpha = [half.power(int(2 * angle)) for angle in angles]
    element = torus_element(alpha)
    return -element if negate else element


@dataclass(frozen=True)
class CirclePattern:
    n: Tuple[int, int, int, int]

    def __post_init__(self) -> None:
        n = tuple(int(value) for value in self.n)
        if len(n) != 4:
            raise InvalidPatternError(f"A circle pattern has 4 integers, {len(n)} given")
        if reduce(math.gcd, n) != 1:
            raise InvalidPatternError(f"Pattern {n} is not primitive")
        object.__setattr__(self, "n", n)

    def __str__(self):
        return ",".join(str(value) for value in self.n)

    @classmethod
    def parse(cls, text: str) -> "CirclePattern":
        return cls(parse_integers(text, count=4))

    @property
    def ell(self) -> Tuple[int, ...]:
        return speeds(self.n)[0]

    @property
    def r(self) -> Tuple[int, ...]:
        return speeds(self.n)[1]

    @property
    def square_sum(self) -> int:
        return speed_square_sum(self.n)

    def element(self, theta: CirclePoint) -> SpinElement:
        return torus_element([theta.power(value) for value in self.n])


def freeness_witness(ell: Sequence[int], r: Sequence[int]) -> Optional[Tuple[int, int, Optional[int]]]:
    """First 1-based (i, j) with gcd(ℓ_i, r_j) ≠ 1 and that gcd, None for the undefined gcd(0, 0)."""
    for i, a in enumerate(ell, 1):
        for j, b in enumerate(r, 1):
            if a == 0 and b == 0:
                return i, j, None
            value = math.gcd(a, b)
            if value != 1:
                return i, j, value
    return None


def is_free_weights(ell: Sequence[int], r: Sequence[int]) -> bool:
    return freeness_witness(ell, r) is None


def is_free_circle(pattern: CirclePattern) -> bool:
    return is_free_weights(pattern.ell, pattern.r)


def brute_force_free(ell: Sequence[int], r: Sequence[int], limit: int = BRUTE_FORCE_LIMIT) -> bool:
    """Search the elements 2π/N, N ≤ limit, for a common fixed point on both factors."""
    orders = np.arange(2, limit + 1)
    fixed_first = (np.abs(np.array(ell))[:, None] % orders == 0).any(axis=0)
    fixed_second = (np.abs(np.array(r))[:, None] % orders == 0).any(axis=0)
    return not bool((fixed_first & fixed_second).any())


@dataclass(frozen=True)
class EnumeratedCircle:
    pattern: CirclePattern
    free: bool
    p1: Optional[int]

    @property
    def signature(self) -> Tuple[Tuple[int, ...], Tuple[int, ...], Optional[int]]:
        return (
            tuple(sorted(abs(value) for value in self.pattern.ell)),
            tuple(sorted(abs(value) for value in self.pattern.r)),
            self.p1,
        )

    def row(self) -> List[object]:
        return list(self.pattern.n) + list(self.pattern.ell) + list(self.pattern.r) + [self.free, self.p1]


def primitive_patterns(bound: int) -> np.ndarray:
    axis = np.arange(-bound, bound + 1)
    grid = np.stack(np.meshgrid(axis, axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 4)
    return grid[np.gcd.reduce(grid, axis=1) == 1]


def _lattice_free(grid: np.ndarray) -> np.ndarray:
    ell, r = (np.stack(columns, axis=1) for columns in speeds(grid.T))
    return (np.gcd(ell[:, :, None], r[:, None, :]) == 1).all(axis=(1, 2))


def enumerate_free_circles(bound: int, include_nonfree: bool = False) -> List[EnumeratedCircle]:
    """Primitive patterns with max |n_i| ≤ bound, deduplicated by (|ℓ| multiset, |r| multiset, p1)."""
    from fatlab.topology import p1_circle

    assert bound >= 1, f"Bound must be positive, {bound} given"
    grid = primitive_patterns(bound)
    free = _lattice_free(grid)
    logger.debug(f"bound {bound}: {len(grid)} primitive patterns, {int(free.sum())} free")
    seen = set()
    result = []
    for n, is_free in zip(grid.tolist(), free.tolist()):
        if not is_free and not include_nonfree:
            continue
        pattern = CirclePattern(tuple(n))
        circle = EnumeratedCircle(pattern, is_free, p1_circle(pattern) if is_free else None)
        key = (circle.signature, is_free)
        if key not in seen:
            seen.add(key)
            result.append(circle)
    return result


def enumerate_sphere6_circles(bound: int = 2) -> List[CirclePattern]:
    """Free circles of Spin(7) on S⁶ × S⁷: n1 = 0 fixes e1, so every |r_j| must be 1; one pattern per ± pair."""
    result = []
    for n in primitive_patterns(bound).tolist():
        if n[0] != 0 or next(value for value in n if value) < 0:
            continue
        pattern = CirclePattern(tuple(n))
        if all(abs(value) == 1 for value in pattern.r):
            result.append(pattern)
    return result


@dataclass(frozen=True)
class Su2Rep:
    partition: Tuple[int, ...]
    torus_weights: Tuple[int, int, int, int]
    lift_A: Tuple[Fraction, ...]
    lift_B: Tuple[Fraction, ...]
    free: bool
    witness: Optional[Tuple[int, int, Optional[int]]] = field(default=None, compare=False)

    @property
    def label(self) -> str:
        return "+".join(str(part) for part in self.partition)

    def to_dict(self) -> Dict[str, object]:
        return {
            "partition": self.label,
            "c": list(self.torus_weights),
            "A": [str(value) for value in self.lift_A],
            "B": [str(value) for value in self.lift_B],
            "witness": None if self.witness is None else list(self.witness),
            "free": self.free,
        }


def _check_partition(partition: Sequence[int]) -> Tuple[int, ...]:
    parts = tuple(sorted((int(part) for part in partition), reverse=True))
    if sum(parts) != 8 or any(part < 1 for part in parts):
        raise InvalidPartitionError(f"{partition} is not a partition of 8")
    for part in set(parts):
        if part % 2 == 0 and parts.count(part) % 2:
            raise InvalidPartitionError(f"Even part {part} of {partition} must appear an even number of times")
    if parts == (1,) * 8:
        raise InvalidPartitionError("The trivial representation gives no subgroup")
    return parts


def torus_weights(partition: Sequence[int]) -> Tuple[int, int, int, int]:
    """Rotation speeds of the maximal circle of SU(2) on R⁸, largest first."""
    parts = _check_partition(partition)
    blocks: List[int] = []
    zeros = 0
    for part in sorted(set(parts), reverse=True):
        count = parts.count(part)
        if part % 2:
            for _ in range(count):
                blocks.extend(range(part - 1, 0, -2))
                zeros += 1
        else:
            for _ in range(count // 2):
                weights = list(range(part - 1, 0, -2))
                blocks.extend(weights + weights)
    blocks.extend([0] * (zeros // 2))
    assert len(blocks) == 4, f"{parts} produced {len(blocks)} rotation blocks"
    return tuple(sorted(blocks, reverse=True))


def su2_table(partition: Sequence[int]) -> Su2Rep:
    parts = _check_partition(partition)
    c = torus_weights(parts)
    lift_a, lift_b = lift_coefficients(c)
    witness = None
    free = False
    if all(value.denominator == 1 for value in lift_a + lift_b):
        ell = [int(value) for value in lift_a]
        r = [int(value) for value in lift_b]
        witness = freeness_witness(ell, r)
        free = witness is None
    return Su2Rep(parts, c, lift_a, lift_b, free, witness)


def su2_rows() -> List[Su2Rep]:
    """Every admissible partition of 8, in table order."""
    admissible = []
    for counts in partitions(8):
        parts = tuple(sorted((part for part, count in counts.items() for _ in range(count)), reverse=True))
        try:
            admissible.append(_check_partition(parts))
        except InvalidPartitionError:
            continue
    assert set(admissible) == set(TABLE_ORDER), f"Unexpected admissible partitions {sorted(admissible)}"
    return [su2_table(parts) for parts in TABLE_ORDER]


def finite_action_free(pattern: CirclePattern, d: int, minus_on_first: bool = True, sphere6: bool = False) -> bool:
    """Freeness of Z_2 × Z_d on S⁷ × S⁷ (or S⁶ × S⁷), Z_d the subgroup θ = 2πk/d of the circle.

    ε·R(ℓ_i θ) has eigenvalue 1 iff 2ℓ_i k ≡ (d if ε = -1 else 0) mod 2d.
    """
    if d <= 0:
        raise InvalidOrderError(f"Group order must be positive, {d} given")
    if sphere6 and pattern.ell[0] != 0:
        raise InvalidPatternError(f"Pattern {pattern} moves the unit 1 and does not preserve S⁶")
    signs = (1, -1) if minus_on_first else (1,)
    for epsilon in signs:
        target = d if epsilon == -1 else 0
        for k in range(d):
            if epsilon == 1 and k == 0:
                continue
            first = any((2 * value * k - target) % (2 * d) == 0 for value in pattern.ell)
            second = any((value * k) % d == 0 for value in pattern.r)
            if first and second:
                logger.debug(f"({epsilon}, {k}) of Z2 × Z{d} has a fixed point for {pattern}")
                return False
    return True
