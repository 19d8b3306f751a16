"""Command-line front end.

Exit codes: 0 success, 1 oracle mismatch found, 2 usage error, 3 domain error
(InvalidField, DegenerateCurve, SingularCurve, ...).  Domain errors print a
single JSON line ``{"error": <class>, "message": <text>}`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from .cartier import (
    BASIS_LABELS,
    DEFAULT_ORACLE_BOUND,
    Convention,
    PicardCurve,
    a_number,
    cartier_matrix,
    hasse_witt_fast,
    p_rank,
    rank_fp,
    validate_curve,
)
from .errors import PicardError
from .survey import SweepConfig, SweepReport, oracle_equivalence_run, sweep

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

SWEEP_CSV_COLUMNS = (
    "p", "trial", "f0", "f1", "f2", "f3", "f4", "p_mod_3",
    "rank_H", "a_number", "p_rank", "predicted_a", "matches_theorem",
)


class UsageError(Exception):
    pass


def result_document(curve: PicardCurve, command: str, convention: Convention = Convention.HASSE_WITT) -> dict:
    h = hasse_witt_fast(curve)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "input": {"p": curve.p, "f": list(curve.coefficients)},
        "p_mod_3": curve.p % 3,
    }
    if command == "matrix":
        m = h if convention is Convention.HASSE_WITT else cartier_matrix(curve)
        doc["matrix"] = {
            "convention": m.convention.value,
            "basis": list(BASIS_LABELS),
            "rows": m.to_lists(),
        }
    doc["rank_H"] = rank_fp(h)
    doc["a_number"] = a_number(curve)
    doc["p_rank"] = p_rank(curve)
    return doc


# ---------------------------------------------------------------------------
# Serialization


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else str(v).lower() if isinstance(v, bool) else v for v in row])
    return buf.getvalue()


def _result_text(doc: dict) -> str:
    if "matrix" in doc:
        return "".join(" ".join(str(v) for v in row) + "\n" for row in doc["matrix"]["rows"])
    keys = ("p_mod_3", "rank_H", "a_number", "p_rank")
    lines = [f"p={doc['input']['p']}", "f=" + ",".join(map(str, doc["input"]["f"]))]
    lines += [f"{k}={doc[k]}" for k in keys]
    return "\n".join(lines) + "\n"


def _result_csv(doc: dict) -> str:
    header = ["p", "f0", "f1", "f2", "f3", "f4", "p_mod_3", "rank_H", "a_number", "p_rank"]
    row = [doc["input"]["p"], *doc["input"]["f"], doc["p_mod_3"], doc["rank_H"], doc["a_number"], doc["p_rank"]]
    if "matrix" in doc:
        header += ["convention"] + [f"m{i}{j}" for i in range(1, 4) for j in range(1, 4)]
        row += [doc["matrix"]["convention"]] + [v for r in doc["matrix"]["rows"] for v in r]
    return _csv_text(header, [row])


def _sweep_text(doc: dict) -> str:
    lines = []
    for p, counts in doc["tallies"].items():
        dist = " ".join(f"a={a}:{n}" for a, n in counts.items())
        lines.append(f"p={p} p_mod_3={int(p) % 3} {dist}")
    for r in doc["injected"]:
        lines.append(
            f"injected p={r['p']} f={','.join(str(r[f'f{k}']) for k in range(5))} "
            f"a_number={r['a_number']} matches_theorem={str(r['matches_theorem']).lower()}"
        )
    lines.append(f"counterexamples={len(doc['counterexamples'])}")
    lines.append(f"oracle_mismatches={len(doc['oracle_mismatches'])}")
    if "runtime_seconds" in doc:
        lines.append(f"runtime_seconds={doc['runtime_seconds']}")
    return "\n".join(lines) + "\n"


def _sweep_csv(doc: dict) -> str:
    rows = [[r[c] for c in SWEEP_CSV_COLUMNS] for r in doc["records"] + doc["injected"]]
    return _csv_text(SWEEP_CSV_COLUMNS, rows)


def serialize(doc: dict | SweepReport, fmt: str = "json") -> bytes:
    """Deterministic rendering of a result document or sweep report."""
    if isinstance(doc, SweepReport):
        doc = doc.to_dict()
    is_sweep = "tallies" in doc
    if fmt == "json":
        text = json.dumps(doc, indent=2) + "\n"
    elif fmt == "text":
        if is_sweep:
            text = _sweep_text(doc)
        elif "mismatches" in doc:
            text = f"curves_checked={doc['curves_checked']}\nmismatches={len(doc['mismatches'])}\n"
        else:
            text = _result_text(doc)
    elif fmt == "csv":
        if is_sweep:
            text = _sweep_csv(doc)
        elif "mismatches" in doc:
            text = _csv_text(("curves_checked", "mismatches"), [(doc["curves_checked"], len(doc["mismatches"]))])
        else:
            text = _result_csv(doc)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text.encode("utf-8")


# ---------------------------------------------------------------------------
# Argument parsing


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _injection(text: str) -> tuple[int, tuple[int, ...]]:
    p, sep, coeffs = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected P:c0,c1,c2,c3,c4, got {text!r}")
    try:
        return int(p), tuple(_int_list(coeffs))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime in {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="picard-cartier", description="Cartier operator invariants of Picard curves y^3 = f(x).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", "-o", help="write to this path instead of stdout")

    curve = _Parser(add_help=False)
    curve.add_argument("--p", type=int, required=True, help="prime characteristic > 3")
    curve.add_argument("--f", type=_int_list, required=True, help="coefficients c0,c1,c2,c3,c4 (constant first)")

    m = sub.add_parser("matrix", parents=[common, curve], help="Hasse-Witt or Cartier matrix")
    m.add_argument("--convention", choices=("hasse-witt", "cartier"), default="hasse-witt")
    sub.add_parser("a-number", parents=[common, curve], help="a-number")
    sub.add_parser("p-rank", parents=[common, curve], help="p-rank")

    population = _Parser(add_help=False)
    population.add_argument("--primes", type=_int_list, help="explicit primes, comma separated")
    population.add_argument("--min-p", type=int, default=5)
    population.add_argument("--max-p", type=int, default=50)
    population.add_argument("--residue", type=int, choices=(1, 2), help="keep primes with p %% 3 == RESIDUE")
    population.add_argument("--trials", type=int, default=100, help="curves per prime")
    population.add_argument("--seed", type=int, default=0)
    population.add_argument("--require-nonzero-constant", action="store_true")
    population.add_argument("--oracle-bound", type=int, default=DEFAULT_ORACLE_BOUND)
    population.add_argument("--inject", type=_injection, action="append", default=[],
                            metavar="P:c0,c1,c2,c3,c4", help="extra explicit curve (repeatable)")

    s = sub.add_parser("sweep", parents=[common, population], help="random sweep against the mod-3 dichotomy")
    s.add_argument("--oracle-check", action="store_true", help="cross-check with the bivariate oracle")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--timing", action="store_true", help="include runtime (breaks byte-stability)")
    sub.add_parser("oracle-check", parents=[common, population], help="cross-check all matrix routes")
    return parser


def _config(args, oracle_check: bool) -> SweepConfig:
    kwargs = dict(
        trials_per_prime=args.trials,
        seed=args.seed,
        require_nonzero_constant=args.require_nonzero_constant,
        oracle_check=oracle_check,
        oracle_bound=args.oracle_bound,
        inject=tuple(args.inject),
    )
    try:
        if args.primes:
            return SweepConfig(primes=tuple(args.primes), **kwargs)
        return SweepConfig.from_range(args.min_p, args.max_p, args.residue, **kwargs)
    except PicardError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _execute(args) -> tuple[dict | SweepReport, int]:
    if args.command in ("matrix", "a-number", "p-rank"):
        curve = validate_curve(args.p, args.f)
        convention = Convention(getattr(args, "convention", "hasse-witt"))
        return result_document(curve, args.command, convention), EXIT_OK
    if args.command == "sweep":
        report = sweep(_config(args, args.oracle_check), workers=args.workers)
        code = EXIT_MISMATCH if report.oracle_mismatches else EXIT_OK
        return report.to_dict(include_runtime=args.timing), code
    config = _config(args, True)
    mismatches = oracle_equivalence_run(config)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_dict(),
        "curves_checked": len(config.primes) * config.trials_per_prime + len(config.inject),
        "mismatches": mismatches,
    }
    return doc, EXIT_MISMATCH if mismatches else EXIT_OK


def _error_line(kind: str, message: str) -> str:
    return json.dumps({"error": kind, "message": message}) + "\n"


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(_error_line("UsageError", str(exc)))
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        doc, code = _execute(args)
    except UsageError as exc:
        sys.stderr.write(_error_line("UsageError", str(exc)))
        return EXIT_USAGE
    except PicardError as exc:
        sys.stderr.write(_error_line(type(exc).__name__, str(exc)))
        return EXIT_DOMAIN
    data = serialize(doc, args.format)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
    return code


def main() -> None:
    sys.exit(run())
