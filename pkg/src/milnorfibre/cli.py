"""Command line front end.

Exit status: 0 on success, 1 when the diagram is invalid, data is
missing or inconsistent, a diagnostic reports a contradiction, or the
cell-complex oracle disagrees; 2 for unreadable input and usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from sympy import isprime

from . import corpus
from .diagram import load_diagram
from .errors import (
    DataMissingError,
    DiagramValidationError,
    DimensionError,
    InconsistentDataError,
    ParseError,
)
from .report import CHECKS, MAX_PRIME, MODES, AnalysisConfig, analyze, render_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"modulus must be an integer, got {text!r}")
    if p >= MAX_PRIME:
        raise argparse.ArgumentTypeError(f"modulus {p} exceeds the machine-word limit 2^63")
    if not isprime(p):
        raise argparse.ArgumentTypeError(f"modulus {p} is not prime")
    return p


def _add_analysis_flags(p: argparse.ArgumentParser, defaults_from_corpus: bool) -> None:
    p.add_argument("--mode", choices=MODES, default=None if defaults_from_corpus else "bounds")
    p.add_argument("--mod", dest="prime", type=_prime, default=None, metavar="P", help="work over Z/P")
    p.add_argument("--format", dest="output_format", choices=("text", "structured"), default="text")
    p.add_argument("--check", dest="checks", action="append", choices=CHECKS, default=None)
    p.add_argument("--signs", type=Path, default=None, help="JSON list or {loop id: +-1} for the j2 signs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="milnorfibre",
        description="Milnor fibre homology of non-isolated hypersurface singularities from deformation data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze a deformation-diagram JSON file")
    a.add_argument("file", type=Path)
    _add_analysis_flags(a, defaults_from_corpus=False)

    ex = sub.add_parser("examples", help="bundled worked examples")
    exsub = ex.add_subparsers(dest="examples_command", required=True)
    exsub.add_parser("list", help="list bundled examples")
    run = exsub.add_parser("run", help="run one bundled example, or all")
    run.add_argument("name")
    _add_analysis_flags(run, defaults_from_corpus=True)
    return parser


def _load_signs(path: Path | None):
    if path is None:
        return None
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read signs file: {exc.strerror}", str(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", str(path))
    if not isinstance(data, (list, dict)):
        raise ParseError("signs file must hold a list or an object", str(path))
    return data


def _emit(report, fmt: str, out) -> None:
    out.write(report.to_json() if fmt == "structured" else render_text(report))


def _run_file(path: Path, config: AnalysisConfig, annotations, out) -> int:
    d = load_diagram(path)
    report = analyze(d, config, annotations)
    _emit(report, config.output_format, out)
    return EXIT_OK if report.ok else EXIT_FAIL


def _config(args, entry: dict | None = None) -> AnalysisConfig:
    entry = entry or {}
    signs = _load_signs(args.signs)
    if signs is None and entry.get("signs"):
        signs = _load_signs(corpus.corpus_dir() / entry["signs"])
    mode = args.mode or entry.get("mode", "bounds")
    prime = args.prime if args.prime is not None else entry.get("prime")
    checks = tuple(args.checks) if args.checks else (tuple(entry["checks"]) if "checks" in entry else None)
    return AnalysisConfig(mode=mode, prime=prime, output_format=args.output_format, checks=checks, signs=signs)


def _examples_list(out) -> int:
    for e in corpus.index():
        out.write(f"{e['name']:<12} {e['title']}\n")
        out.write(f"{'':<12} {e['citation']}\n")
        out.write(f"{'':<12} expected: {e['expected']}\n")
        for note in e.get("annotations", ()):
            out.write(f"{'':<12} note: {note}\n")
    return EXIT_OK


def _examples_run(args, out) -> int:
    if args.name == "all":
        selected = corpus.names()
    else:
        try:
            corpus.entry(args.name)
        except KeyError as exc:
            raise UsageError(exc.args[0])
        selected = [args.name]
    status = EXIT_OK
    for i, name in enumerate(selected):
        e = corpus.entry(name)
        if len(selected) > 1 and args.output_format == "text":
            out.write(("\n" if i else "") + f"== {name}: {e['title']}\n")
        code = _run_file(corpus.path(name), _config(args, e), tuple(e.get("annotations", ())), out)
        status = max(status, code)
    return status


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "analyze":
            return _run_file(args.file, _config(args), (), out)
        if args.examples_command == "list":
            return _examples_list(out)
        return _examples_run(args, out)
    except ParseError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except DiagramValidationError as exc:
        err.write("invalid diagram:\n" + "".join(f"  - {e}\n" for e in exc.errors))
        return EXIT_FAIL
    except (DataMissingError, InconsistentDataError, DimensionError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
