"""Command-line entry point: ``otsl <command> ...``.

Exit codes: 0 success, 1 validation negative, 2 usage error, 3 I/O error,
4 data error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from typing import Iterator, Sequence, TextIO

from . import __version__
from .grid import GridDims, GridError, SizeError, enumerate_grids
from .htmlcodec import ValidityError, html_emit, html_parse, html_text_read, html_text_write
from .ingest import (
    FileError,
    FormatError,
    IngestError,
    OtslRecord,
    convert_dataset,
    convert_record,
    read_gt,
)
from .lang import (
    IncompleteError,
    LexError,
    Mode,
    OtslError,
    OtslSyntaxError,
    detokenize,
    encode,
    parse,
    tokenize,
    validate,
)
from .metrics import CorpusStats, teds, to_struct_tree
from .repair import CandidateFormatError, read_candidates, repair_sequence, repair_stream, write_candidates
from .sim import SimConfig, SimMode, simulate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4

log = logging.getLogger("otsl")


class _IOFailure(Exception):
    pass


@contextlib.contextmanager
def _open_in(path: str) -> Iterator[TextIO]:
    if path == "-":
        yield sys.stdin
        return
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc
    with handle:
        yield handle


@contextlib.contextmanager
def _open_out(path: str | None) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        handle = open(path, "w", encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc
    with handle:
        yield handle


def _lines(handle: TextIO) -> Iterator[tuple[int, str]]:
    for lineno, line in enumerate(handle, 1):
        if line.strip():
            yield lineno, line.strip()


def cmd_validate(args: argparse.Namespace) -> int:
    mode = Mode.STRICT if args.strict else Mode.SYNTACTIC
    status = EXIT_OK
    with _open_in(args.input) as fh:
        for lineno, line in _lines(fh):
            verdict: dict = {"line": lineno, "valid": True, "rule": None, "position": None}
            try:
                dims = validate(tokenize(line), mode)
                detail = f"valid {dims.rows}x{dims.cols}"
            except LexError as exc:
                verdict.update(valid=False, rule="lex", position=exc.offset)
                detail = f"invalid: {exc}"
            except OtslSyntaxError as exc:
                v = exc.violation
                verdict.update(valid=False, rule=v.rule.value, position=list(v.position))
                detail = f"invalid {v.rule} at {v.position}"
            except IncompleteError as exc:
                verdict.update(valid=False, rule="incomplete")
                detail = f"invalid: {exc}"
            if not verdict["valid"]:
                status = EXIT_INVALID
            if args.json:
                print(json.dumps(verdict))
            else:
                print(f"line {lineno}: {detail}")
    return status


def cmd_convert(args: argparse.Namespace) -> int:
    if args.src == args.dst:
        print("--from and --to must differ", file=sys.stderr)
        return EXIT_USAGE
    status = EXIT_OK
    with _open_in(args.input) as fh, _open_out(args.output) as out:
        for lineno, line in _lines(fh):
            try:
                if args.src == "otsl":
                    result = html_text_write(html_emit(parse(tokenize(line))))
                else:
                    result = detokenize(encode(html_parse(html_text_read(line))))
            except (OtslError, ValidityError, GridError) as exc:
                print(f"line {lineno}: {type(exc).__name__}: {exc}", file=sys.stderr)
                status = EXIT_DATA
                continue
            out.write(result + "\n")
    return status


def cmd_repair(args: argparse.Namespace) -> int:
    mode = Mode.STRICT if args.strict else Mode.SYNTACTIC
    reports = []
    if args.candidates:
        with _open_in(args.candidates) as fh:
            try:
                steps = read_candidates(fh)
            except CandidateFormatError as exc:
                print(str(exc), file=sys.stderr)
                return EXIT_DATA
        reports.append((None, repair_stream(steps, mode, min_rows=args.min_rows)))
    else:
        with _open_in(args.input) as fh:
            for lineno, line in _lines(fh):
                try:
                    seq = tokenize(line)
                except LexError as exc:
                    print(f"line {lineno}: {exc}", file=sys.stderr)
                    return EXIT_DATA
                reports.append((lineno, repair_sequence(seq, mode)))

    status = EXIT_OK
    for lineno, report in reports:
        print(detokenize(report.output))
        where = "" if lineno is None else f"line {lineno}: "
        for sub in report.substitutions:
            original = sub.original.value if sub.original is not None else "-"
            print(f"{where}substituted {original} -> {sub.chosen.value} at step {sub.index}", file=sys.stderr)
        print(f"{where}{len(report.substitutions)} substitution(s)", file=sys.stderr)
        if not report.valid:
            status = EXIT_INVALID
    return status


def cmd_ingest(args: argparse.Namespace) -> int:
    try:
        report = convert_dataset(args.input, args.output, args.format, args.failures)
    except FileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(str(report))
    for rec_id, error in report.failures:
        print(f"  {rec_id}: {error}", file=sys.stderr)
    return EXIT_OK if report.skipped == 0 else EXIT_DATA


def cmd_stats(args: argparse.Namespace) -> int:
    stats = CorpusStats()
    status = EXIT_OK
    if args.otsl or args.html:
        if args.input:
            print("give either INPUT or --otsl/--html", file=sys.stderr)
            return EXIT_USAGE
        try:
            if args.otsl:
                with _open_in(args.otsl) as fh:
                    for _, line in _lines(fh):
                        stats.otsl.add(tokenize(line))
            if args.html:
                with _open_in(args.html) as fh:
                    for _, line in _lines(fh):
                        stats.html.add(html_text_read(line))
        except (OtslError, ValidityError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
    else:
        path = args.input or "-"
        if args.input_format in ("pubtabnet", "fintabnet"):

            def skip(exc: FormatError) -> None:
                nonlocal status
                print(f"skipped {exc}", file=sys.stderr)
                status = EXIT_DATA

            try:
                for rec in read_gt(path, args.input_format, on_error=skip):
                    try:
                        converted = convert_record(rec)
                    except (ValidityError, GridError, OtslError, IngestError) as exc:
                        print(f"skipped {rec.id}: {exc}", file=sys.stderr)
                        status = EXIT_DATA
                        continue
                    stats.add(tokenize(converted.otsl), rec.structure_tokens)
            except FileError as exc:
                raise _IOFailure(str(exc)) from exc
        else:
            with _open_in(path) as fh:
                for lineno, line in _lines(fh):
                    try:
                        obj = json.loads(line)
                        if args.input_format == "pairs":
                            stats.add(tokenize(obj["otsl"]), html_text_read(obj["html"]))
                        else:
                            rec = OtslRecord.from_json(obj)
                            stats.add(tokenize(rec.otsl), html_emit(rec.grid()))
                    except (ValueError, KeyError, TypeError, GridError) as exc:
                        print(f"line {lineno}: skipped: {exc}", file=sys.stderr)
                        status = EXIT_DATA
    sys.stdout.write(stats.to_csv())
    print(f"# {stats.summary()}")
    return status


def cmd_teds(args: argparse.Namespace) -> int:
    trees = []
    for path in (args.a, args.b):
        with _open_in(path) as fh:
            text = fh.read()
        try:
            trees.append(to_struct_tree(html_text_read(text)))
        except (ValidityError, GridError) as exc:
            print(f"{path}: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_DATA
    print(repr(teds(trees[0], trees[1])))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    try:
        grids = enumerate_grids(GridDims(args.rows, args.cols))
        if args.emit == "count":
            print(sum(1 for _ in grids))
        else:
            for grid in grids:
                print(detokenize(encode(grid)))
    except (SizeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    with _open_in(args.input) as fh:
        text = fh.read()
    try:
        grid = parse(tokenize(text))
        cfg = SimConfig(
            seed=args.seed,
            p_top1=args.p_top1,
            p_top2=args.p_top2,
            confidence_gap=args.gap,
            mode=SimMode.DROP_TAIL if args.drop_tail else SimMode.CORRUPT_RANK,
            drop_k=args.drop_tail,
        )
    except OtslError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    with _open_out(args.output) as out:
        out.write(write_candidates(simulate(grid, cfg)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="otsl", description="OTSL table structure toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check OTSL sequences, one per line")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--strict", action="store_true", help="also reject non-rectangular spans")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert between OTSL and HTML, one table per line")
    p.add_argument("--from", dest="src", choices=("otsl", "html"), required=True)
    p.add_argument("--to", dest="dst", choices=("otsl", "html"), required=True)
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("repair", help="repair OTSL sequences or a candidate-step file")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--candidates", help="candidate-step file (one step per line)")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--min-rows", type=int, default=0, help="complete truncated tables to at least N rows")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("ingest", help="convert PubTabNet/FinTabNet JSONL to OTSL JSONL")
    p.add_argument("--format", choices=("pubtabnet", "fintabnet"), default="pubtabnet")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--failures", help="write skipped records as JSONL")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="token frequencies and length statistics")
    p.add_argument("input", nargs="?")
    p.add_argument(
        "--input-format",
        choices=("otsl-jsonl", "pairs", "pubtabnet", "fintabnet"),
        default="otsl-jsonl",
    )
    p.add_argument("--otsl", help="OTSL corpus, one sequence per line")
    p.add_argument("--html", help="HTML corpus, one fragment per line")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("teds", help="structure-only TEDs between two HTML tables")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_teds)

    p = sub.add_parser("enumerate", help="list every table structure of a given size")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--emit", choices=("otsl", "count"), default="otsl")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("simulate", help="emit simulated decoder candidates for an OTSL table")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-top1", type=float, default=1.0)
    p.add_argument("--p-top2", type=float, default=0.0)
    p.add_argument("--gap", type=float, default=0.1)
    p.add_argument("--drop-tail", type=int, default=0, metavar="K", help="drop the last K steps")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
