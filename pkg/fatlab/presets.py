import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

from mergedeep import Strategy, merge

from fatlab.exactnum import MatQ
from fatlab.exceptions import InvalidPresetError, PresetNotFoundError
from fatlab.liealg import (
    A_perp,
    A_perp_basis,
    AlgebraPresentation,
    C_perp,
    C_perp_basis,
    DimensionTriple,
    M_basis,
    M_vector,
    PairPresentation,
    SliceSpec,
    Subspace,
    TriplePresentation,
    WitnessHint,
    g2_basis,
    g2_in_so7,
    so3_max_in_so5,
    so_basis,
    so_unit,
    su3_element,
    su3_in_g2,
)

__all__ = (
    "DATA_DIR",
    "PairType",
    "CaseEntry",
    "PresetLibrary",
    "load_presets",
    "default_library",
    "build_matrices",
)

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"

_FAMILIES = {
    "so": lambda expr: so_basis(int(expr["n"])),
    "M": lambda expr: M_basis(int(expr["n"])),
    "g2": lambda expr: g2_basis(),
    "A": lambda expr: A_perp_basis(),
    "su3": lambda expr: su3_in_g2(),
    "C": lambda expr: C_perp_basis(),
    "so3max": lambda expr: so3_max_in_so5(),
}

_BUILDERS = {
    "so_unit": lambda args: so_unit(*(int(value) for value in args)),
    "M": M_vector,
    "A": A_perp,
    "g2": g2_in_so7,
    "su3": su3_element,
    "C": C_perp,
}


@dataclass(frozen=True)
class PairType:
    type: int
    space: str
    chain: str
    property_p: bool


@dataclass(frozen=True)
class CaseEntry:
    label: str
    triple: str
    route: str
    verdict: str


def _is_variable(value: Any) -> bool:
    if not isinstance(value, str):
        return False
    try:
        Fraction(value)
    except ValueError:
        return True
    return False


def _scalar(value: Any, values: Dict[str, Fraction]) -> Fraction:
    if _is_variable(value):
        if value not in values:
            raise InvalidPresetError(f"Variable {value!r} has no value")
        return values[value]
    return Fraction(value)


def _variables(expr: Any) -> Set[str]:
    found: Set[str] = set()
    if isinstance(expr, dict):
        for key, item in expr.items():
            if key in ("args", "scale"):
                found.update(value for value in item if _is_variable(value))
            found.update(_variables(item))
    elif isinstance(expr, list):
        for item in expr:
            found.update(_variables(item))
    return found


def _pad(matrix: MatQ, size: int) -> MatQ:
    if size < matrix.rows:
        raise InvalidPresetError(f"Cannot pad a {matrix.shape} matrix to {size}")
    if size == matrix.rows:
        return matrix
    return MatQ.block_diagonal(matrix, MatQ.zeros(size - matrix.rows, size - matrix.rows))


def _embed(matrix: MatQ, sizes: Sequence[int], index: int) -> MatQ:
    if matrix.rows != sizes[index]:
        raise InvalidPresetError(f"A {matrix.shape} matrix does not fit block {index} of {sizes}")
    blocks = [matrix if position == index else MatQ.zeros(size, size) for position, size in enumerate(sizes)]
    return MatQ.block_diagonal(*blocks)


def _single(expr: Dict[str, Any], values: Dict[str, Fraction]) -> MatQ:
    matrices = build_matrices(expr, values)
    if len(matrices) != 1:
        raise InvalidPresetError(f"Expression {expr} must produce one matrix, got {len(matrices)}")
    return matrices[0]


def build_matrices(expr: Dict[str, Any], values: Optional[Dict[str, Fraction]] = None) -> List[MatQ]:
    """Evaluate one preset expression into the matrices it denotes."""
    values = values or {}
    if "family" in expr:
        if expr["family"] not in _FAMILIES:
            raise InvalidPresetError(f"Unknown family {expr['family']!r}")
        matrices = _FAMILIES[expr["family"]](expr)
    elif "builder" in expr:
        if expr["builder"] not in _BUILDERS:
            raise InvalidPresetError(f"Unknown builder {expr['builder']!r}")
        args = [_scalar(value, values) for value in expr.get("args", [])]
        matrices = [_BUILDERS[expr["builder"]](args)]
    elif "blocks" in expr:
        matrices = [MatQ.block_diagonal(*(_single(item, values) for item in expr["blocks"]))]
    elif "sum" in expr:
        parts = [_single(item, values) for item in expr["sum"]]
        total = parts[0]
        for part in parts[1:]:
            total = total + part
        matrices = [total]
    elif "scale" in expr:
        coefficient, inner = expr["scale"]
        factor = _scalar(coefficient, values)
        matrices = [matrix * factor for matrix in build_matrices(inner, values)]
    elif "matrix" in expr:
        matrices = [MatQ(expr["matrix"])]
    elif "zero" in expr:
        matrices = [MatQ.zeros(int(expr["zero"]), int(expr["zero"]))]
    else:
        raise InvalidPresetError(f"Cannot interpret preset expression {expr}")
    if "pad" in expr:
        matrices = [_pad(matrix, int(expr["pad"])) for matrix in matrices]
    if "embed" in expr:
        sizes, index = expr["embed"]["sizes"], expr["embed"]["index"]
        matrices = [_embed(matrix, sizes, index) for matrix in matrices]
    return matrices


def build_basis(items: Sequence[Dict[str, Any]]) -> List[MatQ]:
    basis: List[MatQ] = []
    for item in items:
        basis.extend(build_matrices(item))
    return basis


def build_slice(expr: Dict[str, Any], case_variables: Sequence[str]) -> SliceSpec:
    names = sorted(_variables(expr))
    if not names:
        raise InvalidPresetError(f"Slice {expr} has no variables")
    origin = _single(expr, {name: Fraction(0) for name in names})
    if not origin.is_zero():
        raise InvalidPresetError(f"Slice {expr} is not homogeneous linear")
    terms = tuple(
        (name, _single(expr, {other: Fraction(int(other == name)) for other in names}))
        for name in names
    )
    unknown = set(case_variables) - set(names)
    if unknown:
        raise InvalidPresetError(f"Case variables {sorted(unknown)} do not occur in the slice")
    return SliceSpec(terms=terms, case_variables=tuple(case_variables))


def load_presets(presets_dir: Optional[str] = None) -> Dict[str, Any]:
    with open(DATA_DIR / "presets.json", encoding="utf-8") as presets_file:
        presets = json.load(presets_file)
    if presets_dir:
        for path in sorted(Path(presets_dir).glob("*.json")):
            logger.debug(f"merging presets overlay {path}")
            with open(path, encoding="utf-8") as overlay_file:
                merge(presets, json.load(overlay_file), strategy=Strategy.ADDITIVE)
    return presets


class PresetLibrary:
    """Builds presentations, hints and tables from the preset data, caching what it built."""

    def __init__(self, presets: Dict[str, Any]) -> None:
        self.presets = presets
        self._algebras: Dict[Tuple[str, Tuple[Fraction, ...]], AlgebraPresentation] = {}
        self._triples: Dict[Tuple[str, Tuple[Fraction, ...]], TriplePresentation] = {}
        self._pairs: Dict[Tuple[str, Tuple[Fraction, ...]], PairPresentation] = {}

    def __repr__(self):
        return f"PresetLibrary({len(self.presets.get('triples', {}))} triples)"

    def _entry(self, section: str, name: str) -> Dict[str, Any]:
        try:
            return self.presets[section][name]
        except KeyError:
            raise PresetNotFoundError(f"No preset {name!r} in {section}") from None

    def names(self, section: str) -> List[str]:
        return list(self.presets.get(section, {}))

    def algebra(self, name: str, metric_scales: Optional[Sequence[object]] = None) -> AlgebraPresentation:
        scales = tuple(Fraction(str(scale)) for scale in metric_scales or ())
        key = (name, scales)
        if key not in self._algebras:
            entry = self._entry("algebras", name)
            sizes = entry.get("ideal_blocks", [entry["ambient_dim"]])
            blocks = []
            offset = 0
            for size in sizes:
                blocks.append((offset, size))
                offset += size
            self._algebras[key] = AlgebraPresentation(
                name=name,
                ambient_dim=entry["ambient_dim"],
                basis=tuple(build_basis(entry["basis"])),
                ideal_blocks=tuple(blocks),
                metric_scales=scales or tuple(Fraction(str(s)) for s in entry.get("metric_scales", ())),
            )
        return self._algebras[key]

    def triple(self, name: str, metric_scales: Optional[Sequence[object]] = None) -> TriplePresentation:
        key = (name, tuple(Fraction(str(scale)) for scale in metric_scales or ()))
        if key not in self._triples:
            entry = self._entry("triples", name)
            self._triples[key] = TriplePresentation(
                name=name,
                algebra=self.algebra(entry["algebra"], metric_scales),
                k_basis=build_basis(entry["k"]),
                h_basis=build_basis(entry["h"]),
                property_p=entry.get("property_p"),
                label=entry.get("label", name),
            )
        return self._triples[key]

    def _hints(
        self,
        raw_hints: Sequence[Dict[str, Any]],
        domains: Dict[str, Subspace],
        algebra: AlgebraPresentation,
        owner: str,
    ) -> List[WitnessHint]:
        hints = []
        for raw in raw_hints:
            direction = raw.get("direction", "b")
            vectors = build_basis(raw.get("vectors", []))
            if raw.get("project"):
                vectors = [domains[direction].project(vector) for vector in vectors]
            slice_spec = None
            if "slice" in raw:
                slice_spec = build_slice(raw["slice"], raw.get("case_variables", []))
            intermediate = None
            if "intermediate" in raw:
                intermediate = TriplePresentation(
                    name=f"{owner}:intermediate",
                    algebra=algebra,
                    k_basis=build_basis(raw["intermediate"]["k"]),
                    h_basis=build_basis(raw["intermediate"]["h"]),
                )
            hints.append(WitnessHint(
                kind=raw["kind"],
                direction=direction,
                vectors=tuple(vectors),
                slice=slice_spec,
                value=raw.get("value"),
                intermediate=intermediate,
                provenance=raw.get("provenance", ""),
            ))
        return hints

    def triple_hints(
        self,
        name: str,
        group: str = "f",
        metric_scales: Optional[Sequence[object]] = None,
    ) -> List[WitnessHint]:
        """Hints of one group: f, b_total, b_base or b_fiber."""
        triple = self.triple(name, metric_scales)
        raw_hints = self._entry("triples", name).get("hints", {}).get(group, [])
        pair = {
            "b_total": triple.total_pair,
            "b_base": triple.base_pair,
            "b_fiber": triple.fiber_pair,
        }.get(group)
        domains = LazyDomains(triple, pair)
        return self._hints(raw_hints, domains, triple.algebra, name)

    def pair(self, name: str, metric_scales: Optional[Sequence[object]] = None) -> PairPresentation:
        key = (name, tuple(Fraction(str(scale)) for scale in metric_scales or ()))
        if key not in self._pairs:
            entry = self._entry("pairs", name)
            algebra = self.algebra(entry["algebra"], metric_scales)
            self._pairs[key] = PairPresentation(
                name=name,
                lower=Subspace(algebra, build_basis(entry["lower"]), name=f"{name}:k"),
                property_p=entry.get("property_p"),
                table_type=entry.get("table_type"),
            )
        return self._pairs[key]

    def pair_entry(self, name: str) -> Dict[str, Any]:
        return self._entry("pairs", name)

    def pair_hints(self, name: str, metric_scales: Optional[Sequence[object]] = None) -> List[WitnessHint]:
        pair = self.pair(name, metric_scales)
        raw_hints = self._entry("pairs", name).get("hints", [])
        return self._hints(raw_hints, {"b": pair.complement}, pair.algebra, name)

    def pair_intermediate(self, name: str) -> Optional[Subspace]:
        entry = self._entry("pairs", name)
        if "intermediate" not in entry:
            return None
        pair = self.pair(name)
        return Subspace(pair.algebra, build_basis(entry["intermediate"]), name=f"{name}:f")

    def pair_pairing(self, name: str) -> Dict[str, MatQ]:
        entry = self._entry("pairs", name)
        if "pairing" not in entry:
            raise PresetNotFoundError(f"Pair {name!r} has no pairing witness")
        return {key: build_matrices(expr)[0] for key, expr in entry["pairing"].items()}

    def dimension_triple(self, name: str) -> DimensionTriple:
        entry = self._entry("dimension_triples", name)
        return DimensionTriple(name=name, h=entry["h"], k=entry["k"], g=entry["g"])

    def pair_types(self) -> List[PairType]:
        return [PairType(**row) for row in self.presets.get("pair_types", [])]

    def cases(self) -> List[CaseEntry]:
        return [CaseEntry(**row) for row in self.presets.get("cases", [])]


class LazyDomains(dict):
    """Hint domains of a triple, built only when a hint asks to be projected."""

    def __init__(self, triple: TriplePresentation, pair: Optional[PairPresentation]) -> None:
        super().__init__()
        self.triple = triple
        self.pair = pair

    def __missing__(self, direction: str) -> Subspace:
        if direction == "b":
            if self.pair is None:
                raise InvalidPresetError("b hints need a pair group")
            domain = self.pair.complement
        else:
            domain = getattr(self.triple, direction)
        self[direction] = domain
        return domain


@lru_cache(maxsize=8)
def default_library(presets_dir: Optional[str] = None) -> PresetLibrary:
    return PresetLibrary(load_presets(presets_dir))
