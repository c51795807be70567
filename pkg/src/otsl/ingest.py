"""Convert PubTabNet/FinTabNet ground truth into OTSL records.

Input is the datasets' JSONL annotation layout::

    {"filename": ..., "split": ..., "html": {"structure": {"tokens": [...]},
                                             "cells": [{"tokens": [...], "bbox": [...]}, ...]}}

Each record is converted through the grid model and the result is checked by
re-parsing the OTSL and re-emitting HTML before it is written.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterator, TextIO

from .grid import GridError, TableGrid, grids_equal
from .htmlcodec import HtmlToken, ValidityError, html_emit, html_parse, to_tokens
from .lang import Mode, OtslError, detokenize, encode, parse, tokenize, validate

log = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")


class IngestError(Exception):
    pass


class FormatError(IngestError):
    def __init__(self, line: int, detail: str):
        super().__init__(f"line {line}: {detail}")
        self.line = line
        self.detail = detail


class FileError(IngestError):
    pass


class VerificationError(IngestError):
    pass


@dataclass
class GtRecord:
    id: str
    split: str
    structure_tokens: list[HtmlToken]
    cell_payloads: list[Any] | None = None
    line: int = 0


@dataclass
class OtslRecord:
    id: str
    split: str
    otsl: str
    rows: int
    cols: int
    header_rows: int
    has_content: list[bool]
    cell_payloads: list[Any] | None = None

    def to_json(self) -> dict[str, Any]:
        cells = []
        for i, flag in enumerate(self.has_content):
            cell: dict[str, Any] = {"has_content": flag}
            if self.cell_payloads is not None:
                cell["payload"] = self.cell_payloads[i]
            cells.append(cell)
        return {
            "id": self.id,
            "split": self.split,
            "rows": self.rows,
            "cols": self.cols,
            "header_rows": self.header_rows,
            "otsl": self.otsl,
            "cells": cells,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> OtslRecord:
        cells = obj["cells"]
        payloads = [c["payload"] for c in cells] if cells and all("payload" in c for c in cells) else None
        return cls(
            id=obj["id"],
            split=obj["split"],
            otsl=obj["otsl"],
            rows=obj["rows"],
            cols=obj["cols"],
            header_rows=obj["header_rows"],
            has_content=[bool(c["has_content"]) for c in cells],
            cell_payloads=payloads,
        )

    def grid(self) -> TableGrid:
        """Rebuild the full grid, header rows and content flags included."""
        grid = parse(tokenize(self.otsl))
        return grid.with_content_flags(self.has_content).with_header_rows(self.header_rows)


@dataclass
class ConversionReport:
    total: int = 0
    converted: int = 0
    skipped: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)

    def merge(self, other: ConversionReport) -> ConversionReport:
        return ConversionReport(
            self.total + other.total,
            self.converted + other.converted,
            self.skipped + other.skipped,
            self.failures + other.failures,
        )

    def __str__(self) -> str:
        return f"{self.converted}/{self.total} converted, {self.skipped} skipped"


def _pubtabnet_id(obj: dict[str, Any]) -> Any:
    return obj.get("filename", obj.get("imgid"))


def _fintabnet_id(obj: dict[str, Any]) -> Any:
    # FinTabNet's table-level files key records by table_id; filename repeats per page
    if "table_id" in obj:
        return obj["table_id"]
    return obj.get("filename")


# Each reader maps one decoded JSON object to its record id.  Additional
# datasets plug in here with their own id extractor.
ID_FIELDS: dict[str, Callable[[dict[str, Any]], Any]] = {
    "pubtabnet": _pubtabnet_id,
    "fintabnet": _fintabnet_id,
}


def _record_from_json(obj: Any, fmt: str, line: int) -> GtRecord:
    if not isinstance(obj, dict):
        raise FormatError(line, "record is not a JSON object")
    rec_id = ID_FIELDS[fmt](obj)
    if rec_id is None or str(rec_id) == "":
        raise FormatError(line, "missing record id")
    split = obj.get("split")
    if split not in SPLITS:
        raise FormatError(line, f"bad split {split!r}")
    try:
        strings = obj["html"]["structure"]["tokens"]
    except (KeyError, TypeError):
        raise FormatError(line, "missing html.structure.tokens") from None
    if not isinstance(strings, list) or not all(isinstance(s, str) for s in strings):
        raise FormatError(line, "html.structure.tokens must be a list of strings")
    try:
        tokens = to_tokens(strings)
    except ValidityError as exc:
        raise FormatError(line, str(exc)) from None
    payloads = obj["html"].get("cells")
    if payloads is not None and not isinstance(payloads, list):
        raise FormatError(line, "html.cells must be a list")
    return GtRecord(str(rec_id), split, tokens, payloads, line)


def read_gt(
    path: str | Path,
    fmt: str = "pubtabnet",
    on_error: Callable[[FormatError], None] | None = None,
) -> Iterator[GtRecord]:
    """Yield ground-truth records in file order.

    A malformed line raises :class:`FormatError` unless ``on_error`` is
    given, in which case the error is passed to it and the line is skipped.
    Blank lines are ignored.
    """
    if fmt not in ID_FIELDS:
        raise ValueError(f"unknown dataset format {fmt!r}")
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise FileError(str(exc)) from exc
    with handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FormatError(lineno, f"invalid JSON: {exc.msg}") from None
                yield _record_from_json(obj, fmt, lineno)
            except FormatError as exc:
                if on_error is None:
                    raise
                on_error(exc)


def _content_flags(rec: GtRecord, n_cells: int) -> list[bool]:
    if rec.cell_payloads is None:
        return [True] * n_cells
    if len(rec.cell_payloads) != n_cells:
        raise VerificationError(f"{len(rec.cell_payloads)} cell payloads for {n_cells} cells")
    flags = []
    for payload in rec.cell_payloads:
        tokens = payload.get("tokens") if isinstance(payload, dict) else payload
        flags.append(bool(tokens))
    return flags


def convert_record(rec: GtRecord) -> OtslRecord:
    grid = html_parse(rec.structure_tokens)
    grid = grid.with_content_flags(_content_flags(rec, len(grid.cells)))
    otsl = encode(grid)
    text = detokenize(otsl)

    out = OtslRecord(
        id=rec.id,
        split=rec.split,
        otsl=text,
        rows=grid.rows,
        cols=grid.cols,
        header_rows=grid.header_rows,
        has_content=[c.has_content for c in grid.cells],
        cell_payloads=rec.cell_payloads,
    )

    rebuilt = out.grid()
    if not grids_equal(rebuilt, grid):
        raise VerificationError("OTSL does not reproduce the source grid")
    reparsed = html_parse(html_emit(rebuilt))
    if not grids_equal(reparsed.with_content_flags(out.has_content), grid):
        raise VerificationError("re-emitted HTML does not reproduce the source grid")
    return out


def _write_jsonl(handle: TextIO, obj: Any) -> None:
    handle.write(json.dumps(obj, ensure_ascii=False) + "\n")


def convert_dataset(
    in_path: str | Path,
    out_path: str | Path,
    fmt: str = "pubtabnet",
    failures_path: str | Path | None = None,
) -> ConversionReport:
    report = ConversionReport()

    def record_failure(rec_id: str, error: str) -> None:
        report.total += 1
        report.skipped += 1
        report.failures.append((rec_id, error))
        log.info("skipped %s: %s", rec_id, error)

    def on_format_error(exc: FormatError) -> None:
        record_failure(f"line {exc.line}", exc.detail)

    if not Path(in_path).is_file():
        raise FileError(f"no such file: {in_path}")
    try:
        out = open(out_path, "w", encoding="utf-8")
    except OSError as exc:
        raise FileError(str(exc)) from exc
    with out:
        for rec in read_gt(in_path, fmt, on_error=on_format_error):
            try:
                converted = convert_record(rec)
            except (ValidityError, GridError, OtslError, VerificationError) as exc:
                record_failure(rec.id, f"{type(exc).__name__}: {exc}")
                continue
            _write_jsonl(out, converted.to_json())
            report.total += 1
            report.converted += 1

    if failures_path is not None:
        try:
            with open(failures_path, "w", encoding="utf-8") as fh:
                for rec_id, error in report.failures:
                    _write_jsonl(fh, {"id": rec_id, "error": error})
        except OSError as exc:
            raise FileError(str(exc)) from exc
    return report


def check_output_record(rec: OtslRecord) -> None:
    """Raise if a written record breaks the published-format invariants."""
    dims = validate(tokenize(rec.otsl), Mode.STRICT)
    if (dims.rows, dims.cols) != (rec.rows, rec.cols):
        raise VerificationError(f"otsl is {dims.rows}x{dims.cols}, record says {rec.rows}x{rec.cols}")
    if len(tokenize(rec.otsl)) != rec.rows * (rec.cols + 1):
        raise VerificationError("token count does not match rows * (cols + 1)")
    rec.grid()
