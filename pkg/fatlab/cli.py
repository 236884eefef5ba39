"""Command-line entry point: ``fatlab verify|enumerate|su2-table|p1|classify``."""
import argparse
import asyncio
import csv
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence, TextIO

from fatlab.exceptions import (
    ClaimExecutionError,
    InvalidPatternError,
    NonFreeActionError,
    UnknownClaimError,
)
from fatlab.functions import run_claims
from fatlab.presets import default_library
from fatlab.registry import ClaimResult, Registry, classify_triples
from fatlab.spin import CirclePattern, enumerate_free_circles, su2_rows
from fatlab.topology import BASE_SPACES, QuotientDescriptor, quotient_report
from fatlab.utils import OUTPUT_FORMATS, Config, load_config

__all__ = ("SCHEMA", "EXIT_OK", "EXIT_FAILED", "EXIT_USAGE", "build_parser", "main")

logger = logging.getLogger(__name__)

SCHEMA = 1

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

ENUMERATE_HEADER = ["n1", "n2", "n3", "n4", "l1", "l2", "l3", "l4", "r1", "r2", "r3", "r4", "free", "p1"]
SU2_HEADER = ["partition", "c", "A", "B", "witness", "free"]


def _pattern(text: str) -> CirclePattern:
    try:
        return CirclePattern.parse(text)
    except InvalidPatternError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fatlab", description="Reproduce fatness, freeness and p1 computations.")
    parser.add_argument("--seed", type=int, help="seed of every sampling stage (default 1729)")
    parser.add_argument("--budget", type=_positive, help="default sample budget per claim")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, help="output format (default text)")
    parser.add_argument("--presets", help="directory of preset overlays merged over the shipped presets")
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--workers", type=_positive, help="claims run concurrently")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="run registered claims")
    verify.add_argument("ids", nargs="*", default=["all"], metavar="ID", help="claim ids or 'all'")

    enumerate_parser = commands.add_parser("enumerate", help="free circles of Spin(8) on S7 x S7")
    enumerate_parser.add_argument("--bound", type=_positive, required=True)
    enumerate_parser.add_argument("--include-nonfree", action="store_true")

    commands.add_parser("su2-table", aliases=["table2"], help="SU(2) subgroups of Spin(8)")

    p1 = commands.add_parser("p1", help="first Pontryagin class of a circle quotient")
    p1.add_argument("--pattern", type=_pattern, required=True, help="four comma-separated integers")
    p1.add_argument("--base-space", choices=BASE_SPACES, default="S7xS7")

    commands.add_parser("classify", help="replay the f = 1 classification")
    return parser


def _dump_json(payload: Dict[str, Any], out: TextIO) -> None:
    json.dump({"schema": SCHEMA, **payload}, out, indent=2, ensure_ascii=False)
    out.write("\n")


def _write_csv(header: List[str], rows: List[List[Any]], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return "(" + ",".join(str(item) for item in value) + ")"
    return str(value)


def _write_table(header: List[str], rows: List[List[Any]], out: TextIO) -> None:
    cells = [header] + [[_format_cell(value) for value in row] for row in rows]
    widths = [max(len(row[index]) for row in cells) for index in range(len(header))]
    for row in cells:
        out.write("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() + "\n")


def _cmd_verify(args: argparse.Namespace, config: Config, out: TextIO) -> int:
    registry = Registry.load()
    try:
        results: List[ClaimResult] = asyncio.run(run_claims(*args.ids, registry=registry, config=config))
    except UnknownClaimError as e:
        print(f"fatlab: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ClaimExecutionError as e:
        print(f"fatlab: {e}", file=sys.stderr)
        return EXIT_FAILED
    for result in results:
        logger.info(f"{result.id} took {result.elapsed:.2f}s")
    failed = [result for result in results if result.failed]
    if config.output == "json":
        _dump_json({"results": [result.to_dict() for result in results], "failed": len(failed)}, out)
    else:
        rows = [[result.id, result.status.upper(), json.dumps(result.to_dict()["value"])] for result in results]
        if config.output == "csv":
            _write_csv(["id", "status", "value"], rows, out)
        else:
            _write_table(["ID", "STATUS", "VALUE"], rows, out)
            out.write(f"{len(results) - len(failed)} passed, {len(failed)} failed\n")
    return EXIT_FAILED if failed else EXIT_OK


def _cmd_enumerate(args: argparse.Namespace, config: Config, out: TextIO) -> int:
    circles = enumerate_free_circles(args.bound, include_nonfree=args.include_nonfree)
    if config.output == "json":
        _dump_json({
            "bound": args.bound,
            "circles": [
                {
                    "n": list(circle.pattern.n),
                    "ell": list(circle.pattern.ell),
                    "r": list(circle.pattern.r),
                    "free": circle.free,
                    "p1": circle.p1,
                }
                for circle in circles
            ],
        }, out)
        return EXIT_OK
    rows = [circle.row() for circle in circles]
    if config.output == "csv":
        _write_csv(ENUMERATE_HEADER, [[str(value).lower() if isinstance(value, bool) else value for value in row] for row in rows], out)
    else:
        _write_table(ENUMERATE_HEADER, rows, out)
    return EXIT_OK


def _cmd_su2_table(args: argparse.Namespace, config: Config, out: TextIO) -> int:
    rows = su2_rows()
    if config.output == "json":
        _dump_json({"rows": [row.to_dict() for row in rows]}, out)
        return EXIT_OK
    table = []
    for row in rows:
        if row.witness is None:
            witness = "gcd = 1 always" if row.free else "-"
        elif row.witness[2] is None:
            witness = f"gcd(l{row.witness[0]}, r{row.witness[1]}) undefined"
        else:
            witness = f"gcd(l{row.witness[0]}, r{row.witness[1]}) = {row.witness[2]}"
        table.append([row.label, list(row.torus_weights), [str(v) for v in row.lift_A], [str(v) for v in row.lift_B], witness, row.free])
    if config.output == "csv":
        _write_csv(SU2_HEADER, [[_format_cell(value) for value in row] for row in table], out)
    else:
        _write_table(SU2_HEADER, table, out)
    return EXIT_OK


def _cmd_p1(args: argparse.Namespace, config: Config, out: TextIO) -> int:
    try:
        report = quotient_report(QuotientDescriptor(base_space=args.base_space, group="circle", pattern=args.pattern))
    except (NonFreeActionError, InvalidPatternError) as e:
        print(f"fatlab: {e}", file=sys.stderr)
        return EXIT_USAGE
    if config.output == "json":
        _dump_json({"report": report.to_dict()}, out)
    elif config.output == "csv":
        _write_csv(["pattern", "base_space", "p1", "p1_mod24"], [[str(args.pattern), args.base_space, report.p1, report.p1_mod24]], out)
    else:
        out.write(f"{report.p1}\n")
    return EXIT_OK


def _cmd_classify(args: argparse.Namespace, config: Config, out: TextIO) -> int:
    table = classify_triples(default_library(config.presets_dir), samples=config.sample_budget, seed=config.seed)
    if config.output == "json":
        _dump_json(table.to_dict(), out)
    else:
        header = ["label", "triple", "route", "dim_m", "dim_p", "expected", "verdict"]
        rows = [[row.label, row.triple, row.route, row.dims["dim_m"], row.dims["dim_p"], row.expected, row.verdict] for row in table.rows]
        if config.output == "csv":
            _write_csv(header, rows, out)
        else:
            _write_table(header, rows, out)
            out.write(f"{len(table.survivors)} survivors: {', '.join(row.triple for row in table.survivors)}\n")
    return EXIT_FAILED if table.mismatches else EXIT_OK


_COMMANDS = {
    "verify": _cmd_verify,
    "enumerate": _cmd_enumerate,
    "su2-table": _cmd_su2_table,
    "table2": _cmd_su2_table,
    "p1": _cmd_p1,
    "classify": _cmd_classify,
}


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(
            {
                "seed": args.seed,
                "sample_budget": args.budget,
                "output": args.format,
                "presets_dir": args.presets,
                "workers": args.workers,
            },
            args.config,
        )
    except (OSError, ValueError) as e:
        print(f"fatlab: {e}", file=sys.stderr)
        return EXIT_USAGE
    return _COMMANDS[args.command](args, config, out or sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
