"""HTML table-structure tokens and their conversion to and from grids.

The vocabulary follows the PubTabNet/FinTabNet structure-token convention.
A plain cell opens with ``<td>``; a spanning cell is spelled ``<td``, its span
attributes (2..10 only), then ``>``.  Token values are the exact
dataset spellings, so a list of dataset token strings maps onto
:class:`HtmlToken` with ``HtmlToken(s)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from html.parser import HTMLParser
from typing import Iterable, Sequence

from .grid import CellSpan, GridDims, GridError, TableGrid, build_grid

MIN_SPAN = 2
MAX_SPAN = 10


class HtmlToken(str, Enum):
    THEAD_OPEN = "<thead>"
    THEAD_CLOSE = "</thead>"
    TBODY_OPEN = "<tbody>"
    TBODY_CLOSE = "</tbody>"
    TR_OPEN = "<tr>"
    TR_CLOSE = "</tr>"
    TD_SIMPLE_OPEN = "<td>"
    TD_CLOSE = "</td>"
    TD_ATTR_OPEN = "<td"
    TAG_END = ">"
    ROWSPAN_2 = ' rowspan="2"'
    ROWSPAN_3 = ' rowspan="3"'
    ROWSPAN_4 = ' rowspan="4"'
    ROWSPAN_5 = ' rowspan="5"'
    ROWSPAN_6 = ' rowspan="6"'
    ROWSPAN_7 = ' rowspan="7"'
    ROWSPAN_8 = ' rowspan="8"'
    ROWSPAN_9 = ' rowspan="9"'
    ROWSPAN_10 = ' rowspan="10"'
    COLSPAN_2 = ' colspan="2"'
    COLSPAN_3 = ' colspan="3"'
    COLSPAN_4 = ' colspan="4"'
    COLSPAN_5 = ' colspan="5"'
    COLSPAN_6 = ' colspan="6"'
    COLSPAN_7 = ' colspan="7"'
    COLSPAN_8 = ' colspan="8"'
    COLSPAN_9 = ' colspan="9"'
    COLSPAN_10 = ' colspan="10"'

    def __str__(self) -> str:
        return self.value

    @property
    def span(self) -> tuple[str, int] | None:
        """``("rowspan", k)`` or ``("colspan", k)`` for attribute tokens."""
        if self.name.startswith(("ROWSPAN_", "COLSPAN_")):
            kind, k = self.name.split("_")
            return kind.lower(), int(k)
        return None


HtmlSequence = Sequence[HtmlToken]


class ValidityError(ValueError):
    """Base class for malformed HTML structure."""


class NestingError(ValidityError):
    def __init__(self, index: int, detail: str):
        super().__init__(f"token {index}: {detail}")
        self.index = index


class SpanRangeError(ValidityError):
    pass


class EmptyTableError(ValidityError):
    pass


class UnsupportedMarkupError(ValidityError):
    def __init__(self, tag: str):
        super().__init__(f"unsupported markup: {tag}")
        self.tag = tag


def _check_span(kind: str, k: int) -> None:
    if not MIN_SPAN <= k <= MAX_SPAN:
        raise SpanRangeError(f"{kind}={k} outside {MIN_SPAN}..{MAX_SPAN}")


def rowspan(k: int) -> HtmlToken:
    _check_span("rowspan", k)
    return HtmlToken(f' rowspan="{k}"')


def colspan(k: int) -> HtmlToken:
    _check_span("colspan", k)
    return HtmlToken(f' colspan="{k}"')


def to_tokens(strings: Iterable[str]) -> list[HtmlToken]:
    """Map dataset token strings onto the vocabulary, byte for byte."""
    tokens = []
    for i, s in enumerate(strings):
        try:
            tokens.append(HtmlToken(s))
        except ValueError:
            raise ValidityError(f"token {i}: {s!r} is not a structure token") from None
    return tokens


@dataclass
class _Cell:
    row_span: int = 1
    col_span: int = 1


@dataclass
class _Rows:
    """Rows of cells as read from the token stream, before placement."""

    rows: list[list[_Cell]]
    header_rows: int


def _read_structure(seq: Sequence[HtmlToken]) -> _Rows:
    T = HtmlToken
    rows: list[list[_Cell]] = []
    header_rows = 0
    section: HtmlToken | None = None  # currently open THEAD/TBODY
    seen_sections: list[HtmlToken] = []
    seen_bare_rows = False
    i = 0
    n = len(seq)

    def expect(cond: bool, detail: str) -> None:
        if not cond:
            raise NestingError(i, detail)

    while i < n:
        tok = T(seq[i])
        if tok in (T.THEAD_OPEN, T.TBODY_OPEN):
            expect(section is None, f"{tok} inside {section}")
            expect(not seen_bare_rows, f"{tok} after rows outside a section")
            expect(tok not in seen_sections, f"repeated {tok}")
            expect(not (tok is T.THEAD_OPEN and T.TBODY_OPEN in seen_sections), "<thead> after <tbody>")
            section = tok
            seen_sections.append(tok)
            i += 1
        elif tok in (T.THEAD_CLOSE, T.TBODY_CLOSE):
            opener = T.THEAD_OPEN if tok is T.THEAD_CLOSE else T.TBODY_OPEN
            expect(section is opener, f"{tok} without matching {opener}")
            section = None
            i += 1
        elif tok is T.TR_OPEN:
            expect(section is not None or not seen_sections, "<tr> outside <thead>/<tbody>")
            if section is None:
                seen_bare_rows = True
            i += 1
            row: list[_Cell] = []
            while True:
                expect(i < n, "unclosed <tr>")
                tok = T(seq[i])
                if tok is T.TR_CLOSE:
                    i += 1
                    break
                if tok is T.TD_SIMPLE_OPEN:
                    i += 1
                    row.append(_Cell())
                elif tok is T.TD_ATTR_OPEN:
                    i += 1
                    cell = _Cell()
                    seen: set[str] = set()
                    while True:
                        expect(i < n, "unterminated <td")
                        tok = T(seq[i])
                        if tok is T.TAG_END:
                            i += 1
                            break
                        expect(tok.span is not None, f"{tok} inside <td ...>")
                        kind, k = tok.span
                        expect(kind not in seen, f"repeated {kind}")
                        seen.add(kind)
                        if kind == "rowspan":
                            cell.row_span = k
                        else:
                            cell.col_span = k
                        i += 1
                    row.append(cell)
                else:
                    raise NestingError(i, f"{tok} inside <tr>")
                expect(i < n and T(seq[i]) is T.TD_CLOSE, "unclosed <td>")
                i += 1
            rows.append(row)
            if section is T.THEAD_OPEN:
                header_rows += 1
        else:
            raise NestingError(i, f"unexpected {tok}")
    if section is not None:
        raise NestingError(n, f"unclosed {section}")
    return _Rows(rows, header_rows)


def html_parse(seq: HtmlSequence) -> TableGrid:
    """Lay out an HTML token sequence on a grid.

    Cells are placed row-major, skipping positions already claimed by row
    spans from above.  Every row must end up exactly as wide as the table.
    """
    structure = _read_structure([HtmlToken(t) for t in seq])
    rows = structure.rows
    if not rows or not any(rows):
        raise EmptyTableError("table has no cells")

    n_rows = len(rows)
    occupied: dict[tuple[int, int], int] = {}
    spans: list[CellSpan] = []
    for r, row in enumerate(rows):
        c = 0
        for cell in row:
            while (r, c) in occupied:
                c += 1
            if r + cell.row_span > n_rows:
                raise GridError(f"rowspan {cell.row_span} at {(r, c)} runs past the last row")
            span = CellSpan(r, c, cell.row_span, cell.col_span)
            for pos in span.positions():
                if pos in occupied:
                    raise GridError(f"cell at {(r, c)} overlaps {pos}")
                occupied[pos] = len(spans)
            spans.append(span)
            c += cell.col_span

    n_cols = max(c for _, c in occupied) + 1
    for r in range(n_rows):
        width = sum(1 for c in range(n_cols) if (r, c) in occupied)
        if width != n_cols:
            raise GridError(f"row {r} has {width} columns, expected {n_cols}")
    return build_grid(GridDims(n_rows, n_cols), spans, structure.header_rows)


def html_emit(grid: TableGrid) -> list[HtmlToken]:
    T = HtmlToken
    by_row: list[list[CellSpan]] = [[] for _ in range(grid.rows)]
    for cell in grid.cells:
        by_row[cell.origin_row].append(cell)

    def emit_rows(lo: int, hi: int) -> list[HtmlToken]:
        out = []
        for r in range(lo, hi):
            out.append(T.TR_OPEN)
            for cell in by_row[r]:
                if cell.row_span == 1 and cell.col_span == 1:
                    out.append(T.TD_SIMPLE_OPEN)
                else:
                    out.append(T.TD_ATTR_OPEN)
                    if cell.row_span > 1:
                        out.append(rowspan(cell.row_span))
                    if cell.col_span > 1:
                        out.append(colspan(cell.col_span))
                    out.append(T.TAG_END)
                out.append(T.TD_CLOSE)
            out.append(T.TR_CLOSE)
        return out

    if grid.header_rows == 0:
        return emit_rows(0, grid.rows)
    tokens = [T.THEAD_OPEN, *emit_rows(0, grid.header_rows), T.THEAD_CLOSE]
    if grid.header_rows < grid.rows:
        tokens += [T.TBODY_OPEN, *emit_rows(grid.header_rows, grid.rows), T.TBODY_CLOSE]
    return tokens


@dataclass(frozen=True)
class HtmlFragment:
    tokens: list[HtmlToken]
    has_content: list[bool]  # one flag per <td>, document order


_STRUCTURAL = {"table", "thead", "tbody", "tr", "td", "th"}
# A structural tag inside a cell ends the cell without </td>, leaving the
# nesting error for html_parse.  These instead signal a nested table.
_NESTED_TABLE = {"tfoot", "col", "colgroup", "caption"}


class _FragmentReader(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.tokens: list[HtmlToken] = []
        self.has_content: list[bool] = []
        self.in_cell = False
        self.cell_text: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if self.in_cell:
            if tag in _NESTED_TABLE or tag == "table":
                raise UnsupportedMarkupError(f"<{tag}> inside a cell")
            if tag not in _STRUCTURAL:
                self.cell_text.append(f"<{tag}>")
                return
            self._leave_cell()
        if tag not in _STRUCTURAL:
            raise UnsupportedMarkupError(f"<{tag}>")
        if tag == "table":
            return
        if tag in ("td", "th"):
            self._open_cell(attrs)
            return
        self.tokens.append(HtmlToken(f"<{tag}>"))

    def _open_cell(self, attrs: list[tuple[str, str | None]]) -> None:
        spans = {}
        for name, value in attrs:
            if name not in ("rowspan", "colspan"):
                continue
            try:
                k = int((value or "").strip())
            except ValueError:
                raise ValidityError(f"{name}={value!r} is not an integer") from None
            if k != 1:
                _check_span(name, k)
                spans[name] = k
        if spans:
            self.tokens.append(HtmlToken.TD_ATTR_OPEN)
            if "rowspan" in spans:
                self.tokens.append(rowspan(spans["rowspan"]))
            if "colspan" in spans:
                self.tokens.append(colspan(spans["colspan"]))
            self.tokens.append(HtmlToken.TAG_END)
        else:
            self.tokens.append(HtmlToken.TD_SIMPLE_OPEN)
        self.in_cell = True
        self.cell_text = []

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if self.in_cell and tag not in _STRUCTURAL and tag not in _NESTED_TABLE:
            self.cell_text.append(f"<{tag}/>")
            return
        raise UnsupportedMarkupError(f"<{tag}/>")

    def handle_endtag(self, tag: str) -> None:
        if self.in_cell:
            if tag in ("td", "th"):
                self.tokens.append(HtmlToken.TD_CLOSE)
                self._leave_cell()
                return
            if tag in _NESTED_TABLE:
                raise UnsupportedMarkupError(f"</{tag}> inside a cell")
            if tag not in _STRUCTURAL:
                self.cell_text.append(f"</{tag}>")
                return
            self._leave_cell()
        if tag not in _STRUCTURAL:
            raise UnsupportedMarkupError(f"</{tag}>")
        if tag == "table":
            return
        if tag in ("td", "th"):
            self.tokens.append(HtmlToken.TD_CLOSE)
            return
        self.tokens.append(HtmlToken(f"</{tag}>"))

    def handle_data(self, data: str) -> None:
        if self.in_cell:
            self.cell_text.append(data)
        elif data.strip():
            raise ValidityError(f"text outside a cell: {data.strip()[:20]!r}")

    def handle_comment(self, data: str) -> None:
        pass

    def _leave_cell(self) -> None:
        self.has_content.append(bool("".join(self.cell_text).strip()))
        self.in_cell = False

    def close(self) -> None:
        super().close()
        if self.in_cell:
            self._leave_cell()


def read_fragment(text: str) -> HtmlFragment:
    """Tokenize a raw HTML table fragment, keeping per-cell content flags."""
    reader = _FragmentReader()
    reader.feed(text)
    reader.close()
    return HtmlFragment(reader.tokens, reader.has_content)


def html_text_read(text: str) -> list[HtmlToken]:
    return read_fragment(text).tokens


def html_text_write(seq: HtmlSequence) -> str:
    html_parse(seq)
    return "<table>" + "".join(HtmlToken(t).value for t in seq) + "</table>"
