"""Flat planes and intermediate Ricci certificates on m ⊕ p.

Only the zero-curvature criterion is evaluated for the deformed metrics q_t.
The normal homogeneous metric (t = ∞) also gets exact sectional curvatures.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from fatlab.exactnum import MatQ, kernel, rank, to_rational
from fatlab.exceptions import (
    CertificateRangeError,
    DependentVectorsError,
    NotInSubspaceError,
    NotOrthonormalError,
    PropertyNotDeclaredError,
)
from fatlab.liealg import (
    SAMPLE_CHUNK,
    AlgebraPresentation,
    PairPresentation,
    Subspace,
    TriplePresentation,
    bracket,
)

__all__ = (
    "DeformedMetric",
    "PVerdict",
    "Ric2Sample",
    "Certificate",
    "metric_qt",
    "flat_plane_test",
    "normal_sec",
    "plane_curvature",
    "bracket_pairing",
    "ric2_sample",
    "property_P_test",
    "property_P_family",
    "ric_k_certificate",
)

logger = logging.getLogger(__name__)

FLOAT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DeformedMetric:
    """q_t on m ⊕ p; t = None stands for t = ∞, the normal homogeneous metric."""

    triple: TriplePresentation
    t: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.t is not None:
            object.__setattr__(self, "t", to_rational(self.t))
            assert self.t > 0, f"Deformation parameter must be positive, {self.t} given"

    @property
    def m_factor(self) -> Fraction:
        if self.t is None:
            return Fraction(1)
        return self.t / (self.t + 1)

    @property
    def label(self) -> str:
        return "inf" if self.t is None else str(self.t)


def _check_horizontal(triple: TriplePresentation, *vectors: MatQ) -> None:
    for vector in vectors:
        if not triple.g.contains(vector) or not triple.h.is_orthogonal_to(vector):
            raise NotInSubspaceError(f"{vector} has a nonzero h-component in {triple.name}")


def metric_qt(x: MatQ, y: MatQ, dm: DeformedMetric) -> Fraction:
    triple = dm.triple
    _check_horizontal(triple, x, y)
    inner = triple.algebra.inner
    x_m, y_m = triple.m.project(x), triple.m.project(y)
    return dm.m_factor * inner(x_m, y_m) + inner(x - x_m, y - y_m)


def _check_independent(algebra: AlgebraPresentation, x: MatQ, y: MatQ) -> None:
    if rank(MatQ.from_columns([algebra.coords(x), algebra.coords(y)])) < 2:
        raise DependentVectorsError("The plane needs two linearly independent vectors")


def flat_plane_test(x: MatQ, y: MatQ, dm: DeformedMetric) -> bool:
    """[x, y] = [x_k, y_k] = [x_p, y_p] = 0."""
    triple = dm.triple
    if not triple.property_p:
        raise PropertyNotDeclaredError(f"{triple.name}: base pair is not declared to satisfy (P)")
    _check_horizontal(triple, x, y)
    _check_independent(triple.algebra, x, y)
    if not bracket(x, y).is_zero():
        return False
    x_p, y_p = triple.p.project(x), triple.p.project(y)
    return bracket(x - x_p, y - y_p).is_zero() and bracket(x_p, y_p).is_zero()


def _sec_numerator(x: MatQ, y: MatQ, triple: TriplePresentation) -> Fraction:
    z = bracket(x, y)
    z_h = triple.h.project(z)
    norm2 = triple.algebra.norm2
    return Fraction(1, 4) * norm2(z - z_h) + norm2(z_h)


def normal_sec(x: MatQ, y: MatQ, triple: TriplePresentation) -> Fraction:
    inner = triple.algebra.inner
    _check_horizontal(triple, x, y)
    if inner(x, x) != 1 or inner(y, y) != 1 or inner(x, y) != 0:
        raise NotOrthonormalError("normal_sec needs an orthonormal pair, use plane_curvature otherwise")
    return _sec_numerator(x, y, triple)


def plane_curvature(x: MatQ, y: MatQ, triple: TriplePresentation) -> Fraction:
    """Normal homogeneous sectional curvature of span{x, y} for any independent pair."""
    inner = triple.algebra.inner
    _check_horizontal(triple, x, y)
    gram = inner(x, x) * inner(y, y) - inner(x, y) ** 2
    if gram == 0:
        raise DependentVectorsError("The plane needs two linearly independent vectors")
    return _sec_numerator(x, y, triple) / gram


def bracket_pairing(x: MatQ, y: MatQ, t: MatQ, algebra: AlgebraPresentation) -> Fraction:
    return algebra.inner(bracket(x, y), t)


@dataclass(frozen=True)
class Ric2Sample:
    triple: str
    samples: int
    minimum: float

    @property
    def positive(self) -> bool:
        return self.minimum > FLOAT_TOLERANCE

    def to_dict(self) -> Dict[str, Any]:
        return {"triple": self.triple, "samples": self.samples, "minimum": self.minimum, "positive": self.positive}


def _float_basis(subspace: Subspace) -> np.ndarray:
    return np.array([element.to_float() for element in subspace.basis])


def ric2_sample(triple: TriplePresentation, samples: int = 100_000, seed: int = 1729) -> Ric2Sample:
    """Minimum of sec(x, e1) + sec(x, e2) over random orthonormal triples of h⊥ for the normal metric."""
    assert samples >= 1, f"Sample count must be positive, {samples} given"
    algebra = triple.algebra
    domain = triple.total_pair.complement
    basis = _float_basis(domain)
    lower = np.linalg.cholesky(domain.gram.to_float())
    back = np.linalg.inv(lower.T)
    weights = algebra.float_weights
    h_coords = algebra.coords_float_batch(_float_basis(triple.h)) if triple.h.dim else None
    h_gram_inv = np.linalg.inv(triple.h.gram.to_float()) if triple.h.dim else None
    rng = np.random.default_rng(seed)
    minimum = np.inf
    for start in range(0, samples, SAMPLE_CHUNK):
        count = min(SAMPLE_CHUNK, samples - start)
        raw = rng.standard_normal((count, domain.dim, 3))
        orthonormal, _ = np.linalg.qr(np.einsum("ab,sbk->sak", lower.T, raw))
        coefficients = back @ orthonormal
        frames = np.einsum("sdk,dij->skij", coefficients, basis)
        x = frames[:, 0]
        total = np.zeros(count)
        for index in (1, 2):
            e = frames[:, index]
            z = algebra.coords_float_batch(x @ e - e @ x)
            norm2 = (z * z * weights).sum(axis=1)
            h_norm2 = np.zeros(count)
            if h_coords is not None:
                pairings = (z * weights) @ h_coords.T
                h_norm2 = np.einsum("sa,ab,sb->s", pairings, h_gram_inv, pairings)
            total += 0.25 * norm2 + 0.75 * h_norm2
        minimum = min(minimum, float(total.min()))
    logger.debug(f"{triple.name}: Ric2 minimum {minimum:.3g} over {samples} frames")
    return Ric2Sample(triple=triple.name, samples=samples, minimum=minimum)


@dataclass(frozen=True)
class PVerdict:
    pair: str
    mode: str
    status: str
    checked: int
    x: Optional[MatQ] = field(default=None, compare=False)
    y: Optional[MatQ] = field(default=None, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        result = {"pair": self.pair, "mode": self.mode, "status": self.status, "checked": self.checked}
        if self.x is not None:
            result["x"] = [[str(value) for value in row] for row in self.x.tolist()]
            result["y"] = [[str(value) for value in row] for row in self.y.tolist()]
        return result


def _kernel_counterexample(pair: PairPresentation, x: MatQ) -> Optional[MatQ]:
    """A y in p with [x, y]_k = 0 but [x, y] ≠ 0, searched over the exact kernel of y ↦ [x, y]_k."""
    p = pair.complement
    if pair.lower.dim:
        brackets = [bracket(x, y) for y in p.basis]
        pairing = MatQ.from_columns([pair.lower.pairings(z) for z in brackets])
        candidates = [p.combination(vector) for vector in kernel(pairing)]
    else:
        candidates = list(p.basis)
    for y in candidates:
        if not bracket(x, y).is_zero():
            return y
    return None


def _sample_points(subspace: Subspace, budget: int, rng: np.random.Generator) -> List[MatQ]:
    points = list(subspace.basis)
    if budget > 0 and subspace.dim:
        points.extend(subspace.combination([int(c) for c in row]) for row in subspace.random_coefficients(rng, budget))
    return points


def property_P_test(
    pair: PairPresentation,
    mode: str = "witness",
    budget: int = 200,
    seed: int = 1729,
    intermediate: Optional[Subspace] = None,
) -> PVerdict:
    """For x, y in p, [x, y]_k = 0 should force [x, y] = 0.

    Witness mode checks the implication on the exact kernel of y ↦ [x, y]_k for basis and random x.
    Falsify mode with an intermediate k ⊂ f ⊂ g pairs x in f⊥ with y in k⊥ ∩ f.
    """
    assert mode in ("witness", "falsify"), f"Unknown mode {mode}"
    rng = np.random.default_rng(seed)
    k = pair.lower
    if mode == "falsify" and intermediate is not None:
        f_perp = intermediate.complement_in(pair.upper, name="f⊥")
        k_perp_f = k.complement_in(intermediate, name="k⊥∩f")
        candidates = [(x, y) for x in f_perp.basis for y in k_perp_f.basis]
        if f_perp.dim and k_perp_f.dim:
            candidates.extend(zip(
                _sample_points(f_perp, budget, rng)[f_perp.dim:],
                _sample_points(k_perp_f, budget, rng)[k_perp_f.dim:],
            ))
        checked = 0
        for x, y in candidates:
            checked += 1
            z = bracket(x, y)
            if k.is_orthogonal_to(z) and not z.is_zero():
                logger.debug(f"{pair.name}: counterexample after {checked} pairs")
                return PVerdict(pair.name, mode, "counterexample", checked, x, y)
        logger.warning(f"{pair.name}: intermediate subalgebra gave no counterexample in {checked} pairs")
        return PVerdict(pair.name, mode, "inconclusive", checked)
    xs = _sample_points(pair.complement, budget, rng)
    for checked, x in enumerate(xs, 1):
        y = _kernel_counterexample(pair, x)
        if y is not None:
            if mode == "witness":
                logger.warning(f"{pair.name}: implication fails for a sampled x")
            return PVerdict(pair.name, mode, "counterexample", checked, x, y)
    status = "holds_on_samples" if mode == "witness" else "inconclusive"
    return PVerdict(pair.name, mode, status, len(xs))


def property_P_family(
    pairs: Mapping[Fraction, PairPresentation],
    budget: int = 50,
    seed: int = 1729,
) -> Dict[Fraction, PVerdict]:
    """Witness-mode check of one pair under a family of bi-invariant metrics Q_t."""
    return {t: property_P_test(pair, "witness", budget, seed) for t, pair in pairs.items()}


@dataclass(frozen=True)
class Certificate:
    triple: str
    t: str
    k: int
    b_fiber: int
    b_base: int
    f: int
    samples: int
    falsified: bool
    witness: Optional[Dict[str, Any]] = field(default=None, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "triple": self.triple,
            "t": self.t,
            "k": self.k,
            "b_fiber": self.b_fiber,
            "b_base": self.b_base,
            "f": self.f,
            "samples": self.samples,
            "falsified": self.falsified,
        }
        if self.witness is not None:
            result["witness"] = self.witness
        return result


class _FlatSearch:
    """Nullity of y ↦ ([x, y], [x_m, y_m], [x_p, y_p]) on m ⊕ p, screened in floats."""

    def __init__(self, triple: TriplePresentation) -> None:
        self.triple = triple
        self.algebra = triple.algebra
        self.basis = list(triple.m.basis) + list(triple.p.basis)
        self.dim_m = triple.m.dim
        self.domain = Subspace(self.algebra, self.basis, name="m⊕p", check=False)
        tensor = np.array([[self.algebra.coords_float(bracket(a, b)) for b in self.basis] for a in self.basis])
        self.tensor = tensor
        size = len(self.basis)
        self.in_m = np.arange(size) < self.dim_m

    def float_nullities(self, coefficients: np.ndarray) -> np.ndarray:
        full = np.einsum("sa,abk->sbk", coefficients, self.tensor)
        m_part = np.einsum("sa,abk->sbk", coefficients * self.in_m, self.tensor) * self.in_m[None, :, None]
        p_part = np.einsum("sa,abk->sbk", coefficients * ~self.in_m, self.tensor) * (~self.in_m)[None, :, None]
        maps = np.concatenate([full, m_part, p_part], axis=2).transpose(0, 2, 1)
        return len(self.basis) - np.linalg.matrix_rank(maps)

    def exact_kernel(self, coefficients: Sequence[int]) -> Tuple[MatQ, List[MatQ]]:
        x = self.domain.combination(coefficients)
        x_m = self.domain.combination(list(coefficients[:self.dim_m]) + [0] * (len(self.basis) - self.dim_m))
        x_p = x - x_m
        zeros = (Fraction(0),) * self.algebra.coordinate_dim
        columns = []
        for index, y in enumerate(self.basis):
            in_m = index < self.dim_m
            columns.append(
                self.algebra.coords(bracket(x, y))
                + (self.algebra.coords(bracket(x_m, y)) if in_m else zeros)
                + (zeros if in_m else self.algebra.coords(bracket(x_p, y)))
            )
        return x, [self.domain.combination(vector) for vector in kernel(MatQ.from_columns(columns))]

    def samples(self, rng: np.random.Generator, count: int, offset: int) -> np.ndarray:
        """Random x cycling through mixed, m-only and p-only vectors."""
        coefficients = self.domain.random_coefficients(rng, count)
        kinds = (np.arange(count) + offset) % 3
        coefficients[kinds == 1] *= self.in_m
        coefficients[kinds == 2] *= ~self.in_m
        for row in np.flatnonzero(~coefficients.any(axis=1)):
            coefficients[row, self.dim_m if kinds[row] == 2 else 0] = 1
        return coefficients


def _frame_witness(algebra: AlgebraPresentation, x: MatQ, frame: List[MatQ]) -> Dict[str, Any]:
    return {
        "x": [str(value) for value in algebra.coords(x)],
        "frame": [[str(value) for value in algebra.coords(vector)] for vector in frame],
    }


def ric_k_certificate(
    dm: DeformedMetric,
    b_fiber: int,
    b_base: int,
    f: int,
    search_budget: int = 10_000,
    seed: int = 1729,
    workers: int = 1,
) -> Certificate:
    """k = b_fiber + b_base + f - 1, then a search for x with k flat planes through it.

    A hit falsifies Ric_k > 0 for every q_t and must not happen for correct inputs.
    """
    triple = dm.triple
    k = b_fiber + b_base + f - 1
    if k >= triple.dim_m + triple.dim_p:
        raise CertificateRangeError(f"{triple.name}: k={k} is not below dim G/H={triple.dim_m + triple.dim_p}")
    if not triple.property_p:
        raise PropertyNotDeclaredError(f"{triple.name}: base pair is not declared to satisfy (P)")
    search = _FlatSearch(triple)
    share = -(-search_budget // workers)
    witness = None
    for worker, child in enumerate(np.random.SeedSequence(seed).spawn(workers)):
        rng = np.random.default_rng(child)
        budget = min(share, search_budget - worker * share)
        for start in range(0, max(budget, 0), SAMPLE_CHUNK):
            coefficients = search.samples(rng, min(SAMPLE_CHUNK, budget - start), start)
            nullities = search.float_nullities(coefficients.astype(float))
            for index in np.flatnonzero(nullities >= k + 1):
                x, frame = search.exact_kernel([int(c) for c in coefficients[index]])
                if len(frame) >= k + 1:
                    witness = _frame_witness(triple.algebra, x, frame)
                    break
                logger.debug(f"{triple.name}: float nullity {nullities[index]} not confirmed exactly")
            if witness is not None:
                break
        if witness is not None:
            break
    if witness is not None:
        logger.warning(f"{triple.name}: found {len(witness['frame'])} flat directions through x, Ric_{k} fails")
    return Certificate(
        triple=triple.name,
        t=dm.label,
        k=k,
        b_fiber=b_fiber,
        b_base=b_base,
        f=f,
        samples=search_budget,
        falsified=witness is not None,
        witness=witness,
    )
