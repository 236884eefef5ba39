import logging
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from fatlab.exactnum import (
    MatQ,
    PolyMat,
    degenerate_loci,
    generic_rank,
    kernel,
    rank,
    solve,
    to_rational,
)
from fatlab.exceptions import (
    DegenerateTripleError,
    DependentVectorsError,
    DimensionMismatchError,
    NotInSubspaceError,
    NotSubalgebraError,
    ZeroVectorError,
)

__all__ = (
    "so_basis",
    "so_unit",
    "M_vector",
    "M_basis",
    "g2_in_so7",
    "g2_basis",
    "A_perp",
    "A_perp_basis",
    "su3_element",
    "su3_in_g2",
    "C_perp",
    "C_perp_basis",
    "so3_max_in_so5",
    "direct_sum",
    "bracket",
    "AlgebraPresentation",
    "Subspace",
    "PairPresentation",
    "TriplePresentation",
    "DimensionTriple",
    "SliceSpec",
    "WitnessHint",
    "InvariantReport",
    "DimensionVerdict",
    "centralizer_dim",
    "centralizer_basis",
    "compute_b",
    "compute_f",
    "dimension_obstruction",
    "simple_dim",
    "check_f_vs_b",
    "jacobi_holds",
)

logger = logging.getLogger(__name__)

SAMPLE_BOUND = 9
SAMPLE_CHUNK = 2048
HINT_KINDS = ("explicit_vector", "transitivity_claim", "slice", "intermediate_subalgebra")
MAX_CASE_VARIABLES = 2


def _skew_from_upper(size: int, upper: Dict[Tuple[int, int], object]) -> MatQ:
    rows = [[Fraction(0)] * size for _ in range(size)]
    for (i, j), value in upper.items():
        rows[i][j] = to_rational(value)
        rows[j][i] = -to_rational(value)
    return MatQ(rows)


def _units(length: int) -> List[Tuple[int, ...]]:
    return [tuple(int(i == j) for j in range(length)) for i in range(length)]


def so_unit(n: int, i: int, j: int) -> MatQ:
    """E_ij - E_ji in so(n) with 1-based indices."""
    assert 1 <= i <= n and 1 <= j <= n and i != j, f"Invalid so({n}) unit ({i}, {j})"
    return MatQ.unit(n, i - 1, j - 1) - MatQ.unit(n, j - 1, i - 1)


def so_basis(n: int) -> List[MatQ]:
    assert n >= 2, f"so({n}) has no basis"
    return [so_unit(n, i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def M_vector(z: Sequence[object]) -> MatQ:
    """Skew matrix with last column z and last row -z."""
    size = len(z) + 1
    return _skew_from_upper(size, {(i, size - 1): value for i, value in enumerate(z)})


def M_basis(n: int) -> List[MatQ]:
    return [M_vector(unit) for unit in _units(n)]


def g2_in_so7(params: Sequence[object]) -> MatQ:
    """Element of g2 ⊂ so7 from parameters (x1..x6, y1..y6, z1, z2)."""
    if len(params) != 14:
        raise DimensionMismatchError(f"g2 needs 14 parameters, {len(params)} given")
    x1, x2, x3, x4, x5, x6, y1, y2, y3, y4, y5, y6, z1, z2 = (to_rational(p) for p in params)
    return _skew_from_upper(7, {
        (0, 1): x1 + x2, (0, 2): y1 + y2, (0, 3): x3 + x4, (0, 4): y3 + y4, (0, 5): x5 + x6, (0, 6): y5 + y6,
        (1, 2): z1, (1, 3): -y5, (1, 4): x5, (1, 5): -y3, (1, 6): x3,
        (2, 3): x6, (2, 4): y6, (2, 5): -x4, (2, 6): -y4,
        (3, 4): z2, (3, 5): y1, (3, 6): -x1,
        (4, 5): x2, (4, 6): y2,
        (5, 6): z1 + z2,
    })


def g2_basis() -> List[MatQ]:
    return [g2_in_so7(unit) for unit in _units(14)]


def A_perp(v: Sequence[object]) -> MatQ:
    """Element A(v) of the orthogonal complement of g2 in so7."""
    if len(v) != 7:
        raise DimensionMismatchError(f"A(v) needs 7 parameters, {len(v)} given")
    v1, v2, v3, v4, v5, v6, v7 = (to_rational(value) for value in v)
    return _skew_from_upper(7, {
        (0, 1): v1, (0, 2): v2, (0, 3): v3, (0, 4): v4, (0, 5): v5, (0, 6): v6,
        (1, 2): v7, (1, 3): v6, (1, 4): -v5, (1, 5): v4, (1, 6): -v3,
        (2, 3): -v5, (2, 4): -v6, (2, 5): v3, (2, 6): v4,
        (3, 4): v7, (3, 5): -v2, (3, 6): v1,
        (4, 5): -v1, (4, 6): -v2,
        (5, 6): -v7,
    })


def A_perp_basis() -> List[MatQ]:
    return [A_perp(unit) for unit in _units(7)]


def su3_element(params: Sequence[object]) -> MatQ:
    """Element of su3 ⊂ g2 from parameters (x1, x3, x5, y1, y3, y5, z1, z2)."""
    if len(params) != 8:
        raise DimensionMismatchError(f"su3 needs 8 parameters, {len(params)} given")
    x1, x3, x5, y1, y3, y5, z1, z2 = (to_rational(p) for p in params)
    return g2_in_so7((x1, -x1, x3, -x3, x5, -x5, y1, -y1, y3, -y3, y5, -y5, z1, z2))


def su3_in_g2() -> List[MatQ]:
    return [su3_element(unit) for unit in _units(8)]


def C_perp(z: Sequence[object]) -> MatQ:
    """Element C(z) of the orthogonal complement of su3 in g2."""
    if len(z) != 6:
        raise DimensionMismatchError(f"C(z) needs 6 parameters, {len(z)} given")
    z1, z2, z3, z4, z5, z6 = (to_rational(value) for value in z)
    doubled = _skew_from_upper(7, {
        (0, 1): 2 * z1, (0, 2): 2 * z2, (0, 3): 2 * z3, (0, 4): 2 * z4, (0, 5): 2 * z5, (0, 6): 2 * z6,
        (1, 3): -z6, (1, 4): z5, (1, 5): -z4, (1, 6): z3,
        (2, 3): z5, (2, 4): z6, (2, 5): -z3, (2, 6): -z4,
        (3, 5): z2, (3, 6): -z1,
        (4, 5): z1, (4, 6): z2,
    })
    return doubled * Fraction(1, 2)


def C_perp_basis() -> List[MatQ]:
    return [C_perp(unit) for unit in _units(6)]


def _traceless_symmetric_basis() -> List[MatQ]:
    u1 = MatQ.unit(3, 0, 1) + MatQ.unit(3, 1, 0)
    u2 = MatQ.unit(3, 0, 2) + MatQ.unit(3, 2, 0)
    u3 = MatQ.unit(3, 1, 2) + MatQ.unit(3, 2, 1)
    u4 = MatQ.unit(3, 0, 0) - MatQ.unit(3, 1, 1)
    # mutually orthogonal, each of squared norm 6 under tr(ST)
    return [
        u1 + u2 + u3,
        -u1 + u2 - u4,
        -u1 + u3 + u4,
        u2 - u3 + u4,
        MatQ.unit(3, 0, 0) + MatQ.unit(3, 1, 1) - MatQ.unit(3, 2, 2) * 2,
    ]


def so3_max_in_so5() -> List[MatQ]:
    """so3 acting irreducibly on the 5-dimensional space of traceless symmetric 3×3 matrices."""
    frame = _traceless_symmetric_basis()
    images = []
    for generator in so_basis(3):
        rows = [
            [(f_a @ bracket(generator, f_b)).trace() / 6 for f_b in frame]
            for f_a in frame
        ]
        images.append(MatQ(rows))
    return images


def direct_sum(*matrices: MatQ) -> MatQ:
    return MatQ.block_diagonal(*matrices)


def bracket(x: MatQ, y: MatQ) -> MatQ:
    if x.shape != y.shape:
        raise DimensionMismatchError(f"Cannot bracket {x.shape} with {y.shape}")
    return x @ y - y @ x


def jacobi_holds(elements: Sequence[MatQ]) -> bool:
    for a, x in enumerate(elements):
        for b in range(a + 1, len(elements)):
            y = elements[b]
            for z in elements[b + 1:]:
                residual = (
                    bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))
                )
                if not residual.is_zero():
                    return False
    return True


def _spans_brackets(coordinates: MatQ, bracket_columns: List[Tuple[Fraction, ...]], dim: int) -> bool:
    if not bracket_columns:
        return True
    columns = [coordinates.column(index) for index in range(dim)] + bracket_columns
    return rank(MatQ.from_columns(columns)) == dim


@dataclass(frozen=True)
class AlgebraPresentation:
    """Compact Lie algebra of skew matrices, block diagonal along its ideal blocks.

    The inner product is sum over blocks of scale · (-tr(X_b Y_b)).
    """

    name: str
    ambient_dim: int
    basis: Tuple[MatQ, ...]
    ideal_blocks: Tuple[Tuple[int, int], ...] = ()
    metric_scales: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", tuple(self.basis))
        if not self.ideal_blocks:
            object.__setattr__(self, "ideal_blocks", ((0, self.ambient_dim),))
        object.__setattr__(self, "ideal_blocks", tuple(tuple(block) for block in self.ideal_blocks))
        if not self.metric_scales:
            object.__setattr__(self, "metric_scales", (Fraction(1),) * len(self.ideal_blocks))
        object.__setattr__(self, "metric_scales", tuple(to_rational(s) for s in self.metric_scales))
        self._validate()

    def __str__(self):
        return f"AlgebraPresentation({self.name}, dim={self.dim})"

    def _validate(self) -> None:
        if len(self.metric_scales) != len(self.ideal_blocks):
            raise DimensionMismatchError(
                f"{self.name}: {len(self.metric_scales)} scales for {len(self.ideal_blocks)} ideal blocks"
            )
        assert all(scale > 0 for scale in self.metric_scales), f"{self.name}: metric scales must be positive"
        position = 0
        for offset, size in self.ideal_blocks:
            assert offset == position and size >= 1, f"{self.name}: ideal blocks must tile the diagonal"
            position += size
        assert position == self.ambient_dim, f"{self.name}: ideal blocks cover {position} of {self.ambient_dim}"
        for element in self.basis:
            if element.shape != (self.ambient_dim, self.ambient_dim) or not element.is_skew():
                raise DimensionMismatchError(f"{self.name}: basis elements must be skew of size {self.ambient_dim}")
            if not self.is_block_supported(element):
                raise DimensionMismatchError(f"{self.name}: basis element {element} leaves the ideal blocks")
        if rank(self.coordinate_matrix) != len(self.basis):
            raise DependentVectorsError(f"{self.name}: basis is linearly dependent")
        brackets = [
            self.coords(bracket(x, y))
            for a, x in enumerate(self.basis)
            for y in self.basis[a + 1:]
        ]
        if not _spans_brackets(self.coordinate_matrix, brackets, self.dim):
            raise NotSubalgebraError(f"{self.name}: basis is not closed under the bracket")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def _coordinate_slots(self) -> Tuple[Tuple[Tuple[int, int], ...], Tuple[Fraction, ...]]:
        slots = []
        weights = []
        for (offset, size), scale in zip(self.ideal_blocks, self.metric_scales):
            for i in range(offset, offset + size):
                for j in range(i + 1, offset + size):
                    slots.append((i, j))
                    weights.append(2 * scale)
        return tuple(slots), tuple(weights)

    @property
    def coordinate_dim(self) -> int:
        return len(self._coordinate_slots[0])

    def is_block_supported(self, element: MatQ) -> bool:
        inside = set(self._coordinate_slots[0])
        size = self.ambient_dim
        return all(
            element[i, j] == 0
            for i in range(size)
            for j in range(i + 1, size)
            if (i, j) not in inside
        )

    def coords(self, element: MatQ) -> Tuple[Fraction, ...]:
        return tuple(element[i, j] for i, j in self._coordinate_slots[0])

    def coords_float(self, element: MatQ) -> np.ndarray:
        return np.array([float(value) for value in self.coords(element)], dtype=float)

    @cached_property
    def float_weights(self) -> np.ndarray:
        return np.array([float(weight) for weight in self._coordinate_slots[1]], dtype=float)

    def coords_float_batch(self, matrices: np.ndarray) -> np.ndarray:
        """Coordinates of a stack of float matrices shaped (..., n, n)."""
        rows = [i for i, _ in self._coordinate_slots[0]]
        cols = [j for _, j in self._coordinate_slots[0]]
        return matrices[..., rows, cols]

    @cached_property
    def coordinate_matrix(self) -> MatQ:
        return MatQ.from_columns([self.coords(element) for element in self.basis])

    def inner(self, x: MatQ, y: MatQ) -> Fraction:
        weights = self._coordinate_slots[1]
        return sum(
            (w * a * b for w, a, b in zip(weights, self.coords(x), self.coords(y)) if a and b),
            Fraction(0),
        )

    def norm2(self, x: MatQ) -> Fraction:
        return self.inner(x, x)

    @cached_property
    def full(self) -> "Subspace":
        return Subspace(self, self.basis, name=self.name, check=False)

    def with_scales(self, scales: Sequence[object]) -> "AlgebraPresentation":
        return replace(self, metric_scales=tuple(to_rational(s) for s in scales))

    def is_ad_invariant(self) -> bool:
        for x in self.basis:
            for y in self.basis:
                xy = bracket(x, y)
                for z in self.basis:
                    if self.inner(xy, z) + self.inner(y, bracket(x, z)) != 0:
                        return False
        return True


class Subspace:
    """Linear subspace of an algebra given by an exact basis of matrices."""

    def __init__(
        self,
        algebra: AlgebraPresentation,
        basis: Sequence[MatQ],
        name: str = "",
        check: bool = True,
    ) -> None:
        self.algebra = algebra
        self.basis = tuple(basis)
        self.name = name
        if check and self.basis and rank(self.coordinate_matrix) != len(self.basis):
            raise DependentVectorsError(f"Basis of {name or 'subspace'} is linearly dependent")

    def __repr__(self):
        return f"Subspace({self.name!r}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def coordinate_matrix(self) -> MatQ:
        return MatQ.from_columns([self.algebra.coords(element) for element in self.basis])

    @cached_property
    def gram(self) -> MatQ:
        return MatQ([[self.algebra.inner(a, b) for b in self.basis] for a in self.basis])

    @cached_property
    def float_coordinates(self) -> np.ndarray:
        return np.array([self.algebra.coords_float(element) for element in self.basis])

    def zero(self) -> MatQ:
        return MatQ.zeros(self.algebra.ambient_dim, self.algebra.ambient_dim)

    def combination(self, coefficients: Sequence[object]) -> MatQ:
        assert len(coefficients) == self.dim, f"{len(coefficients)} coefficients for dimension {self.dim}"
        result = self.zero()
        for coefficient, element in zip(coefficients, self.basis):
            if coefficient:
                result = result + element * coefficient
        return result

    def pairings(self, x: MatQ) -> Tuple[Fraction, ...]:
        return tuple(self.algebra.inner(x, element) for element in self.basis)

    def is_orthogonal_to(self, x: MatQ) -> bool:
        return not any(self.pairings(x))

    def project(self, x: MatQ) -> MatQ:
        if not self.dim:
            return self.zero()
        coefficients = solve(self.gram, self.pairings(x))
        return self.combination(coefficients)

    def coordinates(self, x: MatQ) -> Tuple[Fraction, ...]:
        if not self.dim:
            if x.is_zero():
                return ()
            raise NotInSubspaceError(f"{x} is not in the zero subspace {self.name}")
        coefficients = solve(self.coordinate_matrix, self.algebra.coords(x))
        if coefficients is None or self.combination(coefficients) != x:
            raise NotInSubspaceError(f"{x} is not in {self.name or 'the subspace'}")
        return coefficients

    def contains(self, x: MatQ) -> bool:
        try:
            self.coordinates(x)
        except NotInSubspaceError:
            return False
        return True

    def complement_in(self, other: "Subspace", name: str = "") -> "Subspace":
        if not self.dim:
            return Subspace(other.algebra, other.basis, name=name, check=False)
        pairing = MatQ([[self.algebra.inner(a, b) for b in other.basis] for a in self.basis])
        return Subspace(
            other.algebra,
            [other.combination(vector) for vector in kernel(pairing)],
            name=name,
            check=False,
        )

    def is_subalgebra(self) -> bool:
        brackets = [
            self.algebra.coords(bracket(x, y))
            for a, x in enumerate(self.basis)
            for y in self.basis[a + 1:]
        ]
        return _spans_brackets(self.coordinate_matrix, brackets, self.dim) if self.dim else True

    def random_coefficients(self, rng: np.random.Generator, count: int, bound: int = SAMPLE_BOUND) -> np.ndarray:
        coefficients = rng.integers(-bound, bound + 1, size=(count, self.dim))
        while 1:
            zero_rows = ~coefficients.any(axis=1)
            if not zero_rows.any():
                return coefficients
            coefficients[zero_rows] = rng.integers(-bound, bound + 1, size=(int(zero_rows.sum()), self.dim))

    def random_element(self, rng: np.random.Generator, bound: int = SAMPLE_BOUND) -> MatQ:
        return self.combination([int(c) for c in self.random_coefficients(rng, 1, bound)[0]])


def _check_inclusion(lower: Subspace, upper: Subspace) -> None:
    for element in lower.basis:
        if not upper.contains(element):
            raise NotSubalgebraError(f"{lower.name} is not contained in {upper.name}")


class PairPresentation:
    """Pair of subalgebras lower ⊂ upper inside one algebra, with the complement of lower."""

    def __init__(
        self,
        name: str,
        lower: Subspace,
        upper: Optional[Subspace] = None,
        property_p: Optional[bool] = None,
        table_type: Optional[int] = None,
        check: bool = True,
    ) -> None:
        self.name = name
        self.algebra = lower.algebra
        self.lower = lower
        self.upper = upper if upper is not None else self.algebra.full
        self.property_p = property_p
        self.table_type = table_type
        if check:
            _check_inclusion(self.lower, self.upper)
            for subspace in (self.lower, self.upper):
                if not subspace.is_subalgebra():
                    raise NotSubalgebraError(f"{subspace.name} is not closed under the bracket")
        if self.lower.dim >= self.upper.dim:
            raise NotSubalgebraError(f"{name}: {self.lower.name} is not a proper subalgebra")

    def __repr__(self):
        return f"PairPresentation({self.name!r})"

    @cached_property
    def complement(self) -> Subspace:
        return self.lower.complement_in(self.upper, name=f"{self.lower.name}⊥")


class TriplePresentation:
    """Nested subalgebras h ⊂ k ⊂ g with m = h⊥ ∩ k and p = k⊥."""

    def __init__(
        self,
        name: str,
        algebra: AlgebraPresentation,
        k_basis: Sequence[MatQ],
        h_basis: Sequence[MatQ],
        property_p: Optional[bool] = None,
        label: str = "",
    ) -> None:
        self.name = name
        self.label = label or name
        self.algebra = algebra
        self.property_p = property_p
        self.g = algebra.full
        self.k = Subspace(algebra, k_basis, name="k")
        self.h = Subspace(algebra, h_basis, name="h")
        _check_inclusion(self.k, self.g)
        _check_inclusion(self.h, self.k)
        for subspace in (self.k, self.h):
            if not subspace.is_subalgebra():
                raise NotSubalgebraError(f"{name}: {subspace.name} is not closed under the bracket")
        if self.h.dim == self.k.dim:
            raise DegenerateTripleError(f"{name}: h equals k")
        if self.k.dim == self.g.dim:
            raise DegenerateTripleError(f"{name}: k equals g")

    def __repr__(self):
        return f"TriplePresentation({self.name!r})"

    @cached_property
    def m(self) -> Subspace:
        return self.h.complement_in(self.k, name="m")

    @cached_property
    def p(self) -> Subspace:
        return self.k.complement_in(self.g, name="p")

    @property
    def dim_m(self) -> int:
        return self.k.dim - self.h.dim

    @property
    def dim_p(self) -> int:
        return self.g.dim - self.k.dim

    @cached_property
    def base_pair(self) -> PairPresentation:
        return PairPresentation(f"{self.name}:base", self.k, self.g, self.property_p, check=False)

    @cached_property
    def fiber_pair(self) -> PairPresentation:
        return PairPresentation(f"{self.name}:fiber", self.h, self.k, check=False)

    @cached_property
    def total_pair(self) -> PairPresentation:
        return PairPresentation(f"{self.name}:total", self.h, self.g, check=False)

    def check_reductive(self) -> bool:
        for x in self.k.basis:
            for y in self.p.basis:
                if not self.k.is_orthogonal_to(bracket(x, y)):
                    return False
        return True

    def component(self, x: MatQ, part: str) -> MatQ:
        """Orthogonal projection of x onto one of h, m, k, p."""
        return getattr(self, part).project(x)


_SIMPLE_PATTERN = re.compile(r"^(spin|so|su|sp|u)(\d+)\+?$")


def simple_dim(label: str) -> int:
    """Dimension of a sum of classical algebras written like 'sp1+u1' or 'spin7+'."""
    total = 0
    for part in re.split(r"\s*(?:\+|⊕)\s*(?=[a-z0Δ])", label.strip()):
        part = part.lstrip("Δ")
        if part in ("0", ""):
            continue
        if part == "g2":
            total += 14
            continue
        if part == "f4":
            total += 52
            continue
        match = _SIMPLE_PATTERN.match(part)
        if not match:
            raise ValueError(f"Unknown algebra label {part!r} in {label!r}")
        family, n = match.group(1), int(match.group(2))
        if family in ("so", "spin"):
            total += n * (n - 1) // 2
        elif family == "su":
            total += n * n - 1
        elif family == "u":
            total += n * n
        else:
            total += n * (2 * n + 1)
    return total


@dataclass(frozen=True)
class DimensionTriple:
    """Triple known only through the dimensions of its algebras."""

    name: str
    h: str
    k: str
    g: str

    @property
    def label(self) -> str:
        return f"{self.h} ⊂ {self.k} ⊂ {self.g}"

    @property
    def dim_m(self) -> int:
        return simple_dim(self.k) - simple_dim(self.h)

    @property
    def dim_p(self) -> int:
        return simple_dim(self.g) - simple_dim(self.k)


@dataclass(frozen=True)
class DimensionVerdict:
    dim_m: int
    dim_p: int
    f0_allowed: bool
    f1_allowed: bool

    @property
    def min_f(self) -> int:
        if self.f0_allowed:
            return 0
        if self.f1_allowed:
            return 1
        return 2


def dimension_obstruction(triple: Union[TriplePresentation, DimensionTriple]) -> DimensionVerdict:
    dim_m, dim_p = triple.dim_m, triple.dim_p
    return DimensionVerdict(
        dim_m=dim_m,
        dim_p=dim_p,
        f0_allowed=dim_p % 2 == 0 and dim_m <= dim_p - 1,
        f1_allowed=dim_p % 2 == 1 and dim_m <= dim_p,
    )


def centralizer_basis(x: MatQ, subspace: Subspace) -> List[MatQ]:
    if x.is_zero():
        raise ZeroVectorError("Centralizer of the zero vector is not bounded")
    if not subspace.dim:
        return []
    columns = [subspace.algebra.coords(bracket(x, y)) for y in subspace.basis]
    return [subspace.combination(vector) for vector in kernel(MatQ.from_columns(columns))]


def centralizer_dim(x: MatQ, subspace: Subspace) -> int:
    """dim of {y in subspace : [x, y] = 0}."""
    if x.is_zero():
        raise ZeroVectorError("Centralizer of the zero vector is not bounded")
    if not subspace.dim:
        return 0
    columns = [subspace.algebra.coords(bracket(x, y)) for y in subspace.basis]
    return subspace.dim - rank(MatQ.from_columns(columns))


@dataclass(frozen=True)
class SliceSpec:
    """Linear family sum(name · matrix) meeting every orbit, with variables allowed to be split on."""

    terms: Tuple[Tuple[str, MatQ], ...]
    case_variables: Tuple[str, ...] = ()


@dataclass(frozen=True)
class WitnessHint:
    kind: str
    direction: str = "b"
    vectors: Tuple[MatQ, ...] = ()
    slice: Optional[SliceSpec] = None
    value: Optional[int] = None
    intermediate: Optional[Union[TriplePresentation, DimensionTriple]] = field(default=None, compare=False)
    provenance: str = ""

    def __post_init__(self) -> None:
        assert self.kind in HINT_KINDS, f"Unknown hint kind {self.kind}"
        assert self.direction in ("b", "p", "m"), f"Unknown hint direction {self.direction}"


@dataclass(frozen=True)
class _HintOutcome:
    lower: int
    upper: Optional[int]
    note: str


@dataclass(frozen=True)
class InvariantReport:
    invariant: str
    subject: str
    certified_lower: int
    sampled_max: int
    claimed: Optional[int]
    upper_bound: int
    status: str
    detail: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def value(self) -> int:
        return self.claimed if self.status == "certified" else self.certified_lower

    def to_dict(self) -> Dict[str, Any]:
        return {
            "invariant": self.invariant,
            "subject": self.subject,
            "certified_lower": self.certified_lower,
            "sampled_max": self.sampled_max,
            "claimed": self.claimed,
            "upper_bound": self.upper_bound,
            "status": self.status,
            "detail": self.detail,
        }


def _slice_cases(
    terms: Dict[str, MatQ],
    case_variables: Sequence[str],
    target: Subspace,
    cased: Tuple[str, ...],
) -> Tuple[Optional[int], bool]:
    if not terms:
        # only the origin is left
        return None, True
    algebra = target.algebra
    linear = {
        name: MatQ.from_columns([algebra.coords(bracket(matrix, y)) for y in target.basis])
        for name, matrix in terms.items()
    }
    report = generic_rank(PolyMat.from_linear(None, linear))
    best = report.nullity
    resolved = True
    for locus in degenerate_loci(report, list(terms)):
        if locus.kind == "never":
            continue
        if locus.kind == "case":
            variable = locus.variables[0]
            if variable not in case_variables or len(cased) >= MAX_CASE_VARIABLES:
                logger.warning(f"slice locus {locus.factor} = 0 is not an allowed case split")
                resolved = False
                continue
            logger.debug(f"slice case {variable} = 0 after {cased}")
            remaining = {name: matrix for name, matrix in terms.items() if name != variable}
            value, ok = _slice_cases(remaining, case_variables, target, cased + (variable,))
        elif locus.kind == "origin":
            remaining = {name: matrix for name, matrix in terms.items() if name not in locus.variables}
            value, ok = _slice_cases(remaining, case_variables, target, cased)
        else:
            logger.warning(f"slice locus {locus.factor} = 0 cannot be resolved")
            resolved = False
            continue
        resolved = resolved and ok
        if value is not None:
            best = max(best, value)
    return best, resolved


def _evaluate_hint(hint: WitnessHint, domain: Subspace, target: Subspace) -> _HintOutcome:
    if hint.kind == "intermediate_subalgebra":
        assert hint.intermediate is not None, "intermediate_subalgebra hint needs an intermediate triple"
        verdict = dimension_obstruction(hint.intermediate)
        return _HintOutcome(verdict.min_f + 1, None, f"intermediate dims {verdict.dim_m}/{verdict.dim_p}")
    if hint.kind == "slice":
        assert hint.slice is not None, "slice hint needs a slice"
        terms = dict(hint.slice.terms)
        for name, matrix in terms.items():
            if not domain.contains(matrix):
                raise NotInSubspaceError(f"slice term {name} is outside {domain.name}")
        value, resolved = _slice_cases(terms, hint.slice.case_variables, target, ())
        value = value or 0
        return _HintOutcome(value, value if resolved else None, f"slice resolved={resolved}")
    lower = 0
    for vector in hint.vectors:
        if not domain.contains(vector):
            raise NotInSubspaceError(f"hint vector {vector} is outside {domain.name}")
        lower = max(lower, centralizer_dim(vector, target))
    if hint.kind == "explicit_vector":
        return _HintOutcome(lower, None, "explicit")
    upper = hint.value if hint.value is not None else (lower if hint.vectors else None)
    return _HintOutcome(lower, upper, "transitivity")


def _float_tensor(domain: Subspace, target: Subspace) -> np.ndarray:
    algebra = domain.algebra
    return np.array([
        [algebra.coords_float(bracket(x, y)) for y in target.basis]
        for x in domain.basis
    ])


def _sample_max(domain: Subspace, target: Subspace, samples: int, rng: np.random.Generator) -> int:
    """Float screen of random integer vectors, the best one confirmed exactly."""
    if samples <= 0 or not domain.dim or not target.dim:
        return 0
    tensor = _float_tensor(domain, target)
    best = -1
    best_coefficients = None
    for start in range(0, samples, SAMPLE_CHUNK):
        count = min(SAMPLE_CHUNK, samples - start)
        coefficients = domain.random_coefficients(rng, count)
        maps = np.einsum("sa,abn->snb", coefficients.astype(float), tensor)
        nullities = target.dim - np.linalg.matrix_rank(maps)
        index = int(np.argmax(nullities))
        if nullities[index] > best:
            best, best_coefficients = int(nullities[index]), coefficients[index]
    exact = centralizer_dim(domain.combination([int(c) for c in best_coefficients]), target)
    if exact != best:
        logger.warning(f"float screen gave {best}, exact confirmation gave {exact}")
    logger.debug(f"sampled {samples} vectors of {domain.name}, max centralizer {exact}")
    return exact


def _direction(
    domain: Subspace,
    target: Subspace,
    hints: Sequence[WitnessHint],
    samples: int,
    rng: np.random.Generator,
) -> Dict[str, Any]:
    outcomes = [_evaluate_hint(hint, domain, target) for hint in hints]
    sampled = _sample_max(domain, target, samples, rng)
    trivial = target.dim
    lower = max([sampled] + [outcome.lower for outcome in outcomes])
    hinted = [outcome.upper for outcome in outcomes if outcome.upper is not None]
    upper = min(hinted + [trivial])
    if lower > upper:
        logger.warning(f"lower bound {lower} exceeds the claimed upper bound {upper} on {domain.name}")
    return {
        "lower": lower,
        "upper": upper,
        "sampled": sampled,
        "hinted": bool(hinted) or lower == trivial,
        "notes": [outcome.note for outcome in outcomes],
    }


def _report(invariant: str, subject: str, directions: Dict[str, Dict[str, Any]]) -> InvariantReport:
    lower = max(direction["lower"] for direction in directions.values())
    upper = max(direction["upper"] for direction in directions.values())
    sampled = max(direction["sampled"] for direction in directions.values())
    consistent = all(direction["lower"] <= direction["upper"] for direction in directions.values())
    claimed = upper if all(direction["hinted"] for direction in directions.values()) else None
    certified = consistent and claimed is not None and claimed == lower and sampled <= claimed
    return InvariantReport(
        invariant=invariant,
        subject=subject,
        certified_lower=lower,
        sampled_max=sampled,
        claimed=claimed,
        upper_bound=upper,
        status="certified" if certified else "lower-bound",
        detail=directions,
    )


def compute_b(
    pair: PairPresentation,
    hints: Sequence[WitnessHint] = (),
    samples: int = 200,
    seed: int = 1729,
) -> InvariantReport:
    complement = pair.complement
    rng = np.random.default_rng(seed)
    direction = _direction(complement, complement, hints, samples, rng)
    return _report("b", pair.name, {"b": direction})


def compute_f(
    triple: TriplePresentation,
    hints: Sequence[WitnessHint] = (),
    samples: int = 200,
    seed: int = 1729,
) -> InvariantReport:
    """Fatness coindex: the larger of max dim Z_m(x) over x in p and max dim Z_p(y) over y in m."""
    rngs = [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(2)]
    directions = {
        "p": _direction(
            triple.p, triple.m, [hint for hint in hints if hint.direction == "p"], samples, rngs[0]
        ),
        "m": _direction(
            triple.m, triple.p, [hint for hint in hints if hint.direction == "m"], samples, rngs[1]
        ),
    }
    return _report("f", triple.name, directions)


def check_f_vs_b(
    f_report: InvariantReport,
    b_total: InvariantReport,
    b_base: Optional[InvariantReport] = None,
    b_fiber: Optional[InvariantReport] = None,
) -> List[str]:
    """Violations of b(h⊂g) >= f + 1 and b(h⊂g) >= max(b(k⊂g), b(h⊂k)) between certified values."""
    violations = []
    if b_total.upper_bound < f_report.certified_lower + 1:
        violations.append(f"b={b_total.upper_bound} but f >= {f_report.certified_lower}")
    for other in (b_base, b_fiber):
        if other is not None and b_total.upper_bound < other.certified_lower:
            violations.append(f"b={b_total.upper_bound} but {other.subject} has b >= {other.certified_lower}")
    return violations
