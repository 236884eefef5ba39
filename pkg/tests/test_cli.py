import io
import json
from unittest import mock

from fatlab.cli import ENUMERATE_HEADER, EXIT_FAILED, EXIT_OK, EXIT_USAGE, SCHEMA, main
from fatlab.registry import Registry
from tests.base import BaseTestCase


class CliTestCase(BaseTestCase):

    def run_main(self, *argv: str):
        out = io.StringIO()
        code = main(list(argv), out=out)
        return code, out.getvalue()

    def test_verify_json(self) -> None:
        code, output = self.run_main("--format", "json", "verify", "p1.family.k9", "su2.row.2222")
        assert code == EXIT_OK
        payload = json.loads(output)
        assert payload["schema"] == SCHEMA
        assert payload["failed"] == 0
        assert [result["id"] for result in payload["results"]] == ["p1.family.k9", "su2.row.2222"]
        assert payload["results"][0]["value"] == 344
        assert "elapsed" not in payload["results"][0]

    def test_verify_text_and_csv(self) -> None:
        code, output = self.run_main("verify", "circles.free.1119")
        assert code == EXIT_OK
        assert output.splitlines()[0].split() == ["ID", "STATUS", "VALUE"]
        assert "circles.free.1119  PASS" in output
        assert output.endswith("1 passed, 0 failed\n")
        code, output = self.run_main("--format", "csv", "verify", "circles.nonfree.1111")
        assert output.splitlines() == ["id,status,value", "circles.nonfree.1111,PASS,false"]

    def test_verify_failure_exit_code(self) -> None:
        registry = Registry([self.create_claim(args={"value": 2})])
        with mock.patch("fatlab.cli.Registry.load", return_value=registry):
            code, output = self.run_main("verify")
        assert code == EXIT_FAILED
        assert "0 passed, 1 failed" in output

    def test_verify_unknown_claim(self) -> None:
        code, output = self.run_main("verify", "no.such.claim")
        assert code == EXIT_USAGE
        assert output == ""

    def test_enumerate(self) -> None:
        code, output = self.run_main("--format", "csv", "enumerate", "--bound", "2")
        assert code == EXIT_OK
        lines = output.splitlines()
        assert lines[0] == ",".join(ENUMERATE_HEADER)
        assert all(line.split(",")[12] == "true" for line in lines[1:])
        code, output = self.run_main("--format", "json", "enumerate", "--bound", "2", "--include-nonfree")
        payload = json.loads(output)
        assert payload["bound"] == 2
        assert any(not circle["free"] for circle in payload["circles"])

    def test_enumerate_needs_positive_bound(self) -> None:
        code, _ = self.run_main("enumerate", "--bound", "0")
        assert code == EXIT_USAGE

    def test_su2_table(self) -> None:
        code, output = self.run_main("--format", "json", "su2-table")
        assert code == EXIT_OK
        assert len(json.loads(output)["rows"]) == 9
        code, output = self.run_main("table2")
        assert "gcd(l" in output
        assert "gcd = 1 always" in output

    def test_p1(self) -> None:
        code, output = self.run_main("p1", "--pattern", "1,1,1,9")
        assert code == EXIT_OK
        assert output == "344\n"
        code, output = self.run_main("--format", "csv", "p1", "--pattern", "0,0,1,1", "--base-space", "S6xS7")
        assert output.splitlines()[1] == "0,0,1,1,S6xS7,8,8"

    def test_p1_errors(self) -> None:
        code, output = self.run_main("p1", "--pattern", "1,1,1,1")
        assert code == EXIT_USAGE
        assert output == ""
        code, _ = self.run_main("p1", "--pattern", "1,2")
        assert code == EXIT_USAGE

    def test_invalid_config(self) -> None:
        code, _ = self.run_main("--config", "/nonexistent/fatlab.json", "su2-table")
        assert code == EXIT_USAGE

    def test_classify(self) -> None:
        code, output = self.run_main("--format", "json", "classify")
        assert code == EXIT_OK
        assert len(json.loads(output)["survivors"]) == 6

    def test_repeated_runs_are_identical(self) -> None:
        argv = (
            "--format", "json", "--seed", "7", "--budget", "20",
            "verify", "b.so7-so8", "circles.oracle", "spin.triality.torus",
        )
        code, first = self.run_main(*argv)
        assert code == EXIT_OK
        assert self.run_main(*argv) == (code, first)
        _, first = self.run_main("classify")
        assert self.run_main("classify")[1] == first
