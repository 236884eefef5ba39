import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from fatlab.curvature import (
    DeformedMetric,
    bracket_pairing,
    flat_plane_test,
    plane_curvature,
    property_P_family,
    property_P_test,
    ric2_sample,
    ric_k_certificate,
)
from fatlab.exactnum import CirclePoint, MatQ
from fatlab.exceptions import InvalidPlanError, PresetNotFoundError, UnknownClaimError
from fatlab.liealg import InvariantReport, bracket, compute_b, compute_f, dimension_obstruction
from fatlab.presets import DATA_DIR, PresetLibrary, build_matrices, default_library
from fatlab.spin import (
    SIGMA,
    CirclePattern,
    brute_force_free,
    diagonal_rotation,
    enumerate_sphere6_circles,
    finite_action_free,
    is_free_circle,
    lift_C_diagonal,
    primitive_patterns,
    su2_rows,
    su2_table,
    torus_element,
    triality_check,
)
from fatlab.topology import (
    QuotientDescriptor,
    distinct_p1_values,
    p1_circle,
    p1_family,
    p1_family_identity,
    p1_su2,
    quotient_report,
)

__all__ = (
    "STATUSES",
    "Citation",
    "ClaimRecord",
    "ClaimResult",
    "PlanContext",
    "CaseResult",
    "CaseTable",
    "Registry",
    "PLAN_OPS",
    "run_claim",
    "classify_triples",
)

logger = logging.getLogger(__name__)

STATUSES = ("pass", "fail", "lower-bound-only")


@dataclass(frozen=True)
class Citation:
    source: str
    quote: str


@dataclass(frozen=True)
class ClaimRecord:
    id: str
    citation: Citation
    op: str
    args: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)
    expected: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)
    computational: bool = True

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ClaimRecord":
        plan = data.get("plan", {})
        return cls(
            id=data["id"],
            citation=Citation(**data["citation"]),
            op=plan.get("op", ""),
            args=plan.get("args", {}),
            expected=data.get("expected", {}),
            computational=data.get("computational", True),
        )


class ClaimResult:
    def __init__(
        self,
        id: str,
        status: str,
        value: Any,
        elapsed: float = 0.0,
        detail: Optional[Dict[str, Any]] = None,
    ) -> None:
        assert status in STATUSES, f"Unknown claim status {status}"
        self.id = id
        self.status = status
        self.value = value
        self.elapsed = elapsed
        self.detail = detail or {}

    def __str__(self):
        return f"{self.__class__.__name__}({self.id}, {self.status}, {self.value})"

    def __repr__(self):
        return str(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClaimResult):
            return NotImplemented
        return self.id == other.id and self.status == other.status and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.__class__.__name__, self.id, self.status))

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    def to_dict(self, timings: bool = False) -> Dict[str, Any]:
        result = {"id": self.id, "status": self.status, "value": _jsonable(self.value), "detail": _jsonable(self.detail)}
        if timings:
            result["elapsed"] = round(self.elapsed, 3)
        return result


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else str(value)
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    return value


@dataclass
class PlanContext:
    library: PresetLibrary
    samples: int = 200
    seed: int = 1729
    workers: int = 1


def _op_compute_b(ctx: PlanContext, args: Dict[str, Any]) -> InvariantReport:
    if "pair" in args:
        pair = ctx.library.pair(args["pair"])
        hints = ctx.library.pair_hints(args["pair"])
    else:
        triple = ctx.library.triple(args["triple"])
        group = args.get("group", "b_total")
        pair = {"b_total": triple.total_pair, "b_base": triple.base_pair, "b_fiber": triple.fiber_pair}[group]
        hints = ctx.library.triple_hints(args["triple"], group)
    return compute_b(pair, hints, samples=ctx.samples, seed=ctx.seed)


def _op_compute_f(ctx: PlanContext, args: Dict[str, Any]) -> InvariantReport:
    triple = ctx.library.triple(args["triple"])
    return compute_f(triple, ctx.library.triple_hints(args["triple"]), samples=ctx.samples, seed=ctx.seed)


def _resolve_triple(ctx: PlanContext, name: str):
    if name in ctx.library.names("dimension_triples"):
        return ctx.library.dimension_triple(name)
    return ctx.library.triple(name)


def _op_dimension_obstruction(ctx: PlanContext, args: Dict[str, Any]) -> Dict[str, Any]:
    verdict = dimension_obstruction(_resolve_triple(ctx, args["triple"]))
    return {"dim_m": verdict.dim_m, "dim_p": verdict.dim_p, "min_f": verdict.min_f}


def _op_property_p(ctx: PlanContext, args: Dict[str, Any]) -> str:
    entry = ctx.library.pair_entry(args["pair"])
    mode = args.get("mode", entry.get("mode", "witness"))
    verdict = property_P_test(
        ctx.library.pair(args["pair"]),
        mode=mode,
        budget=args.get("budget", ctx.samples),
        seed=ctx.seed,
        intermediate=ctx.library.pair_intermediate(args["pair"]),
    )
    return verdict.status


def _op_metric_family(ctx: PlanContext, args: Dict[str, Any]) -> Dict[str, str]:
    entry = ctx.library.pair_entry(args["pair"])
    pairs = {
        Fraction(t): ctx.library.pair(args["pair"], metric_scales=[1, t])
        for t in args.get("t", entry.get("metric_family", [1]))
    }
    verdicts = property_P_family(pairs, budget=args.get("budget", 20), seed=ctx.seed)
    return {str(t): verdict.status for t, verdict in verdicts.items()}


def _op_metric_invariants(ctx: PlanContext, args: Dict[str, Any]) -> Dict[str, Any]:
    """Sampled b of a pair and f of a triple recomputed with the second ideal scaled by each t."""
    scales = args.get("t", [1, 2, 5])
    values: Dict[str, Dict[str, int]] = {}
    if "pair" in args:
        values["b"] = {
            str(t): compute_b(
                ctx.library.pair(args["pair"], metric_scales=[1, t]), samples=ctx.samples, seed=ctx.seed
            ).certified_lower
            for t in scales
        }
    if "triple" in args:
        values["f"] = {
            str(t): compute_f(
                ctx.library.triple(args["triple"], metric_scales=[1, t]), samples=ctx.samples, seed=ctx.seed
            ).certified_lower
            for t in scales
        }
    identical = all(len(set(by_scale.values())) == 1 for by_scale in values.values())
    return {**values, "identical": identical}


def _op_bracket_pairing(ctx: PlanContext, args: Dict[str, Any]) -> Fraction:
    pairing = ctx.library.pair_pairing(args["pair"])
    return bracket_pairing(pairing["x"], pairing["y"], pairing["t"], ctx.library.pair(args["pair"]).algebra)


def _op_ric_k(ctx: PlanContext, args: Dict[str, Any]) -> Dict[str, Any]:
    t = args.get("t")
    metric = DeformedMetric(ctx.library.triple(args["triple"]), None if t is None else Fraction(t))
    certificate = ric_k_certificate(
        metric,
        args["b_fiber"],
        args["b_base"],
        args["f"],
        search_budget=args.get("budget", ctx.samples),
        seed=ctx.seed,
        workers=ctx.workers,
    )
    return certificate.to_dict()


def _op_ric2_sample(ctx: PlanContext, args: Dict[str, Any]) -> bool:
    sample = ric2_sample(ctx.library.triple(args["triple"]), samples=args.get("budget", ctx.samples), seed=ctx.seed)
    return sample.positive


def _matrix(expr: Dict[str, Any]) -> MatQ:
    return build_matrices(expr)[0]


def _op_flat_witness(ctx: PlanContext, args: Dict[str, Any]) -> Dict[str, Any]:
    triple = ctx.library.triple(args["triple"])
    x, y = _matrix(args["x"]), _matrix(args["y"])
    return {
        "flat": flat_plane_test(x, y, DeformedMetric(triple, Fraction(args.get("t", 1)))),
        "commuting": bracket(x, y).is_zero(),
        "sec": plane_curvature(x, y, triple),
    }


def _op_is_free_circle(ctx: PlanContext, args: Dict[str, Any]) -> bool:
    return is_free_circle(CirclePattern(tuple(args["n"])))


def _op_freeness_oracle(ctx: PlanContext, args: Dict[str, Any]) -> int:
    disagreements = 0
    for n in primitive_patterns(args.get("bound", 4)).tolist():
        pattern = CirclePattern(tuple(n))
        if is_free_circle(pattern) != brute_force_free(pattern.ell, pattern.r, args.get("limit", 1000)):
            logger.warning(f"gcd criterion and fixed-point search disagree on {pattern}")
            disagreements += 1
    return disagreements


def _op_su2_row(ctx: PlanContext, args: Dict[str, Any]) -> Dict[str, Any]:
    row = su2_table(args["partition"])
    return {
        "c": list(row.torus_weights),
        "A": [int(value) for value in row.lift_A],
        "B": [int(value) for value in row.lift_B],
        "witness_gcd": None if row.witness is None else row.witness[2],
        "free": row.free,
    }


def _op_su2_table(ctx: PlanContext, args: Dict[str, Any]) -> Dict[str, Any]:
    rows = su2_rows()
    return {"rows": len(rows), "free": [row.label for row in rows if row.free]}


def _op_p1_circle(ctx: PlanContext, args: Dict[str, Any]) -> int:
    return p1_circle(CirclePattern(tuple(args["n"])), args.get("base_space", "S7xS7"))


def _op_p1_family(ctx: PlanContext, args: Dict[str, Any]) -> Any:
    if args.get("symbolic"):
        return p1_family_identity()
    return p1_family(args["k"])


def _op_p1_su2(ctx: PlanContext, args: Dict[str, Any]) -> int:
    return p1_su2(args.get("base_space", "S7xS7"))


def _op_p1_divisible(ctx: PlanContext, args: Dict[str, Any]) -> bool:
    return all(value % args.get("modulus", 8) == 0 for value in distinct_p1_values(args["bound"]))


def _op_distinct_p1(ctx: PlanContext, args: Dict[str, Any]) -> int:
    return len(distinct_p1_values(args["bound"]))


def _op_triality(ctx: PlanContext, args: Dict[str, Any]) -> bool:
    element = args["element"]
    identity = MatQ.identity(8)
    if element == "sigma":
        return triality_check(SIGMA, SIGMA, SIGMA)
    if element == "minus":
        return triality_check(-identity, identity, -identity)
    if element == "torus":
        rng = np.random.default_rng(ctx.seed)
        for _ in range(args.get("count", 100)):
            # construction raises TrialityError on failure
            torus_element([CirclePoint.random(rng) for _ in range(4)])
        return True
    if element == "lifts":
        theta = CirclePoint.from_pythagorean(2, 1)
        for row in su2_rows():
            lift = lift_C_diagonal(row.torus_weights, theta)
            if lift.C != diagonal_rotation(row.torus_weights, theta):
                return False
        return True
    raise InvalidPlanError(f"Unknown triality element {element}")


def _op_finite_free(ctx: PlanContext, args: Dict[str, Any]) -> bool:
    pattern = CirclePattern(tuple(args["n"]))
    return all(
        finite_action_free(pattern, d, minus_on_first=args.get("minus_on_first", True), sphere6=args.get("sphere6", False))
        for d in range(1, args["d_max"] + 1)
    )


def _op_sphere6_circles(ctx: PlanContext, args: Dict[str, Any]) -> int:
    return len(enumerate_sphere6_circles(args.get("bound", 2)))


def _op_quotient(ctx: PlanContext, args: Dict[str, Any]) -> Dict[str, Any]:
    pattern = CirclePattern(tuple(args["n"])) if "n" in args else None
    descriptor = QuotientDescriptor(
        base_space=args.get("base_space", "S7xS7"),
        group=args["group"],
        pattern=pattern,
        d=args.get("d"),
        twist=args.get("twist", True),
    )
    return quotient_report(descriptor).to_dict()


def _op_classify(ctx: PlanContext, args: Dict[str, Any]) -> Dict[str, Any]:
    table = classify_triples(ctx.library, samples=ctx.samples, seed=ctx.seed)
    return {"survivors": len(table.survivors), "mismatches": len(table.mismatches)}


def _op_pairs_count(ctx: PlanContext, args: Dict[str, Any]) -> int:
    rows = ctx.library.pair_types()
    if "property_p" in args:
        rows = [row for row in rows if row.property_p == args["property_p"]]
    return len(rows)


def _op_constant(ctx: PlanContext, args: Dict[str, Any]) -> Any:
    return args["value"]


PLAN_OPS: Dict[str, Callable[[PlanContext, Dict[str, Any]], Any]] = {
    "compute_b": _op_compute_b,
    "compute_f": _op_compute_f,
    "dimension_obstruction": _op_dimension_obstruction,
    "property_p": _op_property_p,
    "metric_family": _op_metric_family,
    "metric_invariants": _op_metric_invariants,
    "bracket_pairing": _op_bracket_pairing,
    "ric_k": _op_ric_k,
    "ric2_sample": _op_ric2_sample,
    "flat_witness": _op_flat_witness,
    "is_free_circle": _op_is_free_circle,
    "freeness_oracle": _op_freeness_oracle,
    "su2_row": _op_su2_row,
    "su2_table": _op_su2_table,
    "p1_circle": _op_p1_circle,
    "p1_family": _op_p1_family,
    "p1_su2": _op_p1_su2,
    "p1_divisible": _op_p1_divisible,
    "distinct_p1": _op_distinct_p1,
    "triality": _op_triality,
    "finite_free": _op_finite_free,
    "sphere6_circles": _op_sphere6_circles,
    "quotient": _op_quotient,
    "classify": _op_classify,
    "pairs_count": _op_pairs_count,
    "constant": _op_constant,
}


class Registry:
    """Claim records keyed by id, in file order."""

    def __init__(self, records: List[ClaimRecord]) -> None:
        self.records: Dict[str, ClaimRecord] = {}
        for record in records:
            if record.id in self.records:
                raise InvalidPlanError(f"Duplicate claim id {record.id}")
            self.records[record.id] = record
        self.validate()

    def __len__(self) -> int:
        return len(self.records)

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "Registry":
        with open(path or DATA_DIR / "claims.json", encoding="utf-8") as claims_file:
            data = json.load(claims_file)
        return cls([ClaimRecord.from_dict(item) for item in data["claims"]])

    def validate(self) -> None:
        for record in self.records.values():
            if not record.citation.source.strip() or not record.citation.quote.strip():
                raise InvalidPlanError(f"{record.id}: citation needs a source and a verbatim quote")
            if record.op not in PLAN_OPS:
                raise InvalidPlanError(f"{record.id}: unknown plan operation {record.op!r}")
            if not set(record.expected) & {"equals", "at_least", "at_most", "fields"}:
                raise InvalidPlanError(f"{record.id}: expected outcome is missing")
            if (record.op == "constant") == record.computational:
                raise InvalidPlanError(f"{record.id}: only constant plans are non-computational")

    def ids(self) -> List[str]:
        return list(self.records)

    def get(self, claim_id: str) -> ClaimRecord:
        try:
            return self.records[claim_id]
        except KeyError:
            raise UnknownClaimError(f"No claim registered under {claim_id!r}") from None


def _matches(value: Any, expected: Dict[str, Any]) -> bool:
    value = _jsonable(value)
    if "equals" in expected and value != expected["equals"]:
        return False
    if "at_least" in expected and not value >= expected["at_least"]:
        return False
    if "at_most" in expected and not value <= expected["at_most"]:
        return False
    for key, item in expected.get("fields", {}).items():
        if value.get(key) != item:
            return False
    return True


def _status(value: Any, expected: Dict[str, Any]) -> str:
    if isinstance(value, InvariantReport):
        if value.status == "certified":
            return "pass" if _matches(value.claimed, expected) else "fail"
        if _matches(value.certified_lower, {key: item for key, item in expected.items() if key != "at_most"}):
            return "pass" if "equals" not in expected else "lower-bound-only"
        return "fail"
    return "pass" if _matches(value, expected) else "fail"


def run_claim(
    claim_id: str,
    registry: Optional[Registry] = None,
    library: Optional[PresetLibrary] = None,
    samples: int = 200,
    seed: int = 1729,
    workers: int = 1,
) -> ClaimResult:
    registry = registry or Registry.load()
    record = registry.get(claim_id)
    ctx = PlanContext(library or default_library(), samples=samples, seed=seed, workers=workers)
    started = time.perf_counter()
    value = PLAN_OPS[record.op](ctx, record.args)
    elapsed = time.perf_counter() - started
    status = _status(value, record.expected)
    detail: Dict[str, Any] = {"computational": record.computational}
    if isinstance(value, InvariantReport):
        detail["report"] = value.to_dict()
        value = value.value
    logger.debug(f"{claim_id}: {status} with {value} in {elapsed:.2f}s")
    if status == "fail":
        logger.warning(f"{claim_id}: expected {record.expected}, got {_jsonable(value)}")
    return ClaimResult(claim_id, status, value, elapsed, detail)


@dataclass(frozen=True)
class CaseResult:
    label: str
    triple: str
    route: str
    expected: str
    verdict: str
    dims: Dict[str, int] = field(default_factory=dict, compare=False, hash=False)

    @property
    def matches(self) -> bool:
        return self.expected == self.verdict

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "triple": self.triple,
            "route": self.route,
            "expected": self.expected,
            "verdict": self.verdict,
            "dim_m": self.dims.get("dim_m"),
            "dim_p": self.dims.get("dim_p"),
        }


@dataclass(frozen=True)
class CaseTable:
    rows: List[CaseResult]

    @property
    def survivors(self) -> List[CaseResult]:
        return [row for row in self.rows if row.verdict == "eq1"]

    @property
    def mismatches(self) -> List[CaseResult]:
        return [row for row in self.rows if not row.matches]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cases": [row.to_dict() for row in self.rows],
            "survivors": [row.triple for row in self.survivors],
        }


def _witness_verdict(report: InvariantReport) -> str:
    if report.status == "certified":
        return f"eq{report.claimed}"
    if report.certified_lower >= 2:
        return "gt1"
    return "undetermined"


def _ideal_split_verdict(triple) -> str:
    for x in triple.m.basis:
        for y in triple.p.basis:
            if not bracket(x, y).is_zero():
                return "undetermined"
    return f"eq{max(triple.dim_m, triple.dim_p)}"


def classify_triples(library: Optional[PresetLibrary] = None, samples: int = 200, seed: int = 1729) -> CaseTable:
    """Replay every case of the f = 1 classification through its obstruction route."""
    library = library or default_library()
    rows = []
    for case in library.cases():
        if case.route == "dimension":
            if case.triple not in library.names("dimension_triples"):
                raise PresetNotFoundError(f"No dimension triple {case.triple!r}")
            triple = library.dimension_triple(case.triple)
            obstruction = dimension_obstruction(triple)
            verdict = "gt1" if obstruction.min_f >= 2 else "undetermined"
        elif case.route == "witness":
            triple = library.triple(case.triple)
            obstruction = dimension_obstruction(triple)
            verdict = _witness_verdict(compute_f(triple, library.triple_hints(case.triple), samples=samples, seed=seed))
        elif case.route == "ideal-split":
            triple = library.triple(case.triple)
            obstruction = dimension_obstruction(triple)
            verdict = _ideal_split_verdict(triple)
        else:
            raise InvalidPlanError(f"{case.label}: unknown route {case.route}")
        if verdict == "eq1" and not obstruction.f1_allowed:
            logger.warning(f"{case.label}: certified f = 1 contradicts the dimension count")
            verdict = "inconsistent"
        logger.debug(f"{case.label}: {case.route} gives {verdict}")
        rows.append(CaseResult(
            label=case.label,
            triple=case.triple,
            route=case.route,
            expected=case.verdict,
            verdict=verdict,
            dims={"dim_m": obstruction.dim_m, "dim_p": obstruction.dim_p},
        ))
    return CaseTable(rows)
