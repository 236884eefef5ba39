import json
import tempfile
from pathlib import Path

import pytest

from fatlab.exceptions import InvalidPlanError, UnknownClaimError
from fatlab.liealg import InvariantReport
from fatlab.registry import Citation, ClaimRecord, ClaimResult, Registry, _status, classify_triples, run_claim
from tests.base import SURVIVING_TRIPLES, BaseTestCase


def _report(status: str, lower: int, claimed=None) -> InvariantReport:
    return InvariantReport(
        invariant="b",
        subject="test",
        certified_lower=lower,
        sampled_max=lower,
        claimed=claimed,
        upper_bound=claimed if claimed is not None else lower + 2,
        status=status,
    )


class RegistryTestCase(BaseTestCase):

    def test_shipped_registry_is_valid(self) -> None:
        registry = self.registry
        assert len(registry) == len(registry.ids())
        assert "b.g2-so8" in registry.ids()
        for claim_id in registry.ids():
            citation = registry.get(claim_id).citation
            assert citation.source.strip()
            assert citation.quote.strip()

    def test_constants_are_the_only_non_computational_claims(self) -> None:
        registry = self.registry
        for claim_id in registry.ids():
            record = registry.get(claim_id)
            assert record.computational == (record.op != "constant")

    def test_unknown_claim(self) -> None:
        with pytest.raises(UnknownClaimError):
            self.registry.get("no.such.claim")

    def test_duplicate_ids(self) -> None:
        with pytest.raises(InvalidPlanError):
            Registry([self.create_claim(), self.create_claim()])

    def test_invalid_records(self) -> None:
        with pytest.raises(InvalidPlanError):
            Registry([self.create_claim(op="guess")])
        with pytest.raises(InvalidPlanError):
            Registry([self.create_claim(quote="  ")])
        with pytest.raises(InvalidPlanError):
            Registry([self.create_claim(expected={})])
        constant = ClaimRecord("test.c", Citation("test", "quote"), "constant", {"value": 1}, {"equals": 1}, True)
        with pytest.raises(InvalidPlanError):
            Registry([constant])

    def test_load_from_file(self) -> None:
        data = {"claims": [{
            "id": "test.k3",
            "citation": {"source": "test", "quote": "a quote"},
            "plan": {"op": "p1_family", "args": {"k": 3}},
            "expected": {"equals": 56},
        }]}
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory, "claims.json")
            path.write_text(json.dumps(data), encoding="utf-8")
            registry = Registry.load(path)
        assert registry.ids() == ["test.k3"]
        assert run_claim("test.k3", registry).status == "pass"


class RunClaimTestCase(BaseTestCase):

    def test_cheap_claims_pass(self) -> None:
        registry = self.registry
        for claim_id in [
            "const.isometry-groups",
            "su2.row.2222",
            "su2.row.3-ones",
            "su2.row.5111",
            "su2.table.rows",
            "circles.free.1119",
            "circles.nonfree.1111",
            "circles.sphere6",
            "p1.family.k9",
            "p1.family.identity",
            "p1.su2",
            "p1.sphere6.circle",
            "dims.F11",
            "dims.F16-2",
            "pairs.bequals1.count",
            "pairs.bracket-pairing.g2-so7",
            "spin.triality.sigma",
            "spin.triality.minus",
            "spin.triality.lifts",
        ]:
            result = run_claim(claim_id, registry, self.library, samples=20)
            assert result.status == "pass", result

    def test_report_values_are_unwrapped(self) -> None:
        result = run_claim("b.so7-so8", self.registry, self.library, samples=20)
        assert result.status == "pass"
        assert result.value == 1
        assert result.detail["report"]["invariant"] == "b"
        assert result.detail["computational"]

    def test_failing_claim(self) -> None:
        registry = Registry([self.create_claim(args={"value": 2})])
        result = run_claim("test.constant", registry)
        assert result.failed
        assert result.value == 2

    def test_su2_rows_report_signed_lifts(self) -> None:
        result = run_claim("su2.row.5111", self.registry)
        assert result.value["A"] == [-1, -1, -3, 3]
        assert result.value["B"] == [-3, 3, 1, -1]
        assert result.value["witness_gcd"] == 3

    def test_invariants_do_not_depend_on_the_metric(self) -> None:
        result = run_claim("pairs.metric-independence.invariants", self.registry, self.library, samples=20)
        assert result.status == "pass", result
        assert result.value["b"] == {"1": 1, "2": 1, "5": 1}
        assert len(set(result.value["f"].values())) == 1
        assert set(result.value["f"]) == {"1", "2", "5"}

    def test_fields_expectation(self) -> None:
        result = run_claim("dims.F11", self.registry)
        assert result.value == {"dim_m": 7, "dim_p": 5, "min_f": 2}

    def test_status_of_reports(self) -> None:
        assert _status(_report("certified", 2, 2), {"equals": 2}) == "pass"
        assert _status(_report("certified", 1, 1), {"equals": 2}) == "fail"
        assert _status(_report("lower-bound", 2), {"equals": 2}) == "lower-bound-only"
        assert _status(_report("lower-bound", 3), {"at_least": 3}) == "pass"
        assert _status(_report("lower-bound", 1), {"at_least": 3}) == "fail"
        assert _status(_report("lower-bound", 1), {"equals": 2}) == "fail"

    def test_result_equality_and_serialisation(self) -> None:
        first = ClaimResult("a", "pass", 1, elapsed=0.5)
        second = ClaimResult("a", "pass", 1, elapsed=3.0)
        assert first == second
        assert first != ClaimResult("a", "fail", 1)
        assert "elapsed" not in first.to_dict()
        assert first.to_dict(timings=True)["elapsed"] == 0.5
        with pytest.raises(AssertionError):
            ClaimResult("a", "maybe", 1)


class ClassifyTestCase(BaseTestCase):

    def test_classification_replays_every_case(self) -> None:
        table = classify_triples(self.library)
        assert len(table.rows) == len(self.library.cases())
        assert table.mismatches == []
        assert {row.triple for row in table.survivors} == SURVIVING_TRIPLES
        ideal_split = [row for row in table.rows if row.route == "ideal-split"]
        assert [row.verdict for row in ideal_split] == ["eq3"]
        assert table.to_dict()["cases"][0]["label"] == "F1 n=3"
