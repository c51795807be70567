"""Canonical grid model shared by every codec.

A table is a ``rows x cols`` grid partitioned into rectangular cell spans.
Each span is identified by its top-left origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

MAX_ENUMERATION_CELLS = 16


class GridError(ValueError):
    """Spans do not form a valid rectangular partition of the grid."""


class OverlapError(GridError):
    def __init__(self, position: tuple[int, int]):
        super().__init__(f"position {position} covered by more than one span")
        self.position = position


class GapError(GridError):
    def __init__(self, position: tuple[int, int]):
        super().__init__(f"position {position} is not covered by any span")
        self.position = position


class BoundsError(GridError):
    def __init__(self, span: CellSpan):
        super().__init__(f"span {span} exceeds the grid")
        self.span = span


class HeaderSplitError(GridError):
    def __init__(self, span: CellSpan, header_rows: int):
        super().__init__(f"span {span} crosses the header boundary at row {header_rows}")
        self.span = span
        self.header_rows = header_rows


class SizeError(ValueError):
    pass


@dataclass(frozen=True)
class GridDims:
    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.rows}x{self.cols}")


@dataclass(frozen=True, order=True)
class CellSpan:
    origin_row: int
    origin_col: int
    row_span: int = 1
    col_span: int = 1
    has_content: bool = True

    def __post_init__(self) -> None:
        if self.origin_row < 0 or self.origin_col < 0:
            raise ValueError(f"negative origin in {self}")
        if self.row_span < 1 or self.col_span < 1:
            raise ValueError(f"spans must be >= 1 in {self}")

    @property
    def origin(self) -> tuple[int, int]:
        return (self.origin_row, self.origin_col)

    @property
    def end_row(self) -> int:
        return self.origin_row + self.row_span

    @property
    def end_col(self) -> int:
        return self.origin_col + self.col_span

    def positions(self) -> Iterator[tuple[int, int]]:
        for r in range(self.origin_row, self.end_row):
            for c in range(self.origin_col, self.end_col):
                yield (r, c)


@dataclass(frozen=True)
class TableGrid:
    """An immutable, validated table structure.

    Build instances with :func:`build_grid`; the constructor trusts its input.
    ``coverage[r][c]`` is the index into ``cells`` of the span owning ``(r, c)``.
    """

    dims: GridDims
    cells: tuple[CellSpan, ...]
    coverage: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    header_rows: int = 0

    @property
    def rows(self) -> int:
        return self.dims.rows

    @property
    def cols(self) -> int:
        return self.dims.cols

    def owner(self, row: int, col: int) -> CellSpan:
        return self.cells[self.coverage[row][col]]

    def with_header_rows(self, header_rows: int) -> TableGrid:
        return build_grid(self.dims, self.cells, header_rows)

    def with_content_flags(self, flags: Iterable[bool]) -> TableGrid:
        flags = list(flags)
        if len(flags) != len(self.cells):
            raise ValueError(f"expected {len(self.cells)} content flags, got {len(flags)}")
        cells = [
            CellSpan(c.origin_row, c.origin_col, c.row_span, c.col_span, bool(f))
            for c, f in zip(self.cells, flags)
        ]
        return build_grid(self.dims, cells, self.header_rows)


def build_grid(dims: GridDims, spans: Iterable[CellSpan], header_rows: int = 0) -> TableGrid:
    """Validate ``spans`` as a partition of ``dims`` and return the grid."""
    cells = tuple(sorted(spans))
    if not cells:
        raise GridError("a grid needs at least one cell span")
    if not 0 <= header_rows <= dims.rows:
        raise GridError(f"header_rows={header_rows} outside 0..{dims.rows}")

    owner: list[list[int | None]] = [[None] * dims.cols for _ in range(dims.rows)]
    for index, span in enumerate(cells):
        if span.end_row > dims.rows or span.end_col > dims.cols:
            raise BoundsError(span)
        if span.origin_row < header_rows < span.end_row:
            raise HeaderSplitError(span, header_rows)
        for r, c in span.positions():
            if owner[r][c] is not None:
                raise OverlapError((r, c))
            owner[r][c] = index

    for r, row in enumerate(owner):
        for c, index in enumerate(row):
            if index is None:
                raise GapError((r, c))

    coverage = tuple(tuple(row) for row in owner)  # type: ignore[arg-type]
    return TableGrid(dims, cells, coverage, header_rows)


def grids_equal(a: TableGrid, b: TableGrid) -> bool:
    return a.dims == b.dims and a.header_rows == b.header_rows and a.cells == b.cells


def simple_grid(rows: int, cols: int) -> TableGrid:
    """All-singles grid with no merged cells."""
    spans = [CellSpan(r, c) for r in range(rows) for c in range(cols)]
    return build_grid(GridDims(rows, cols), spans)


def enumerate_grids(dims: GridDims) -> Iterator[TableGrid]:
    """Yield every rectangular tiling of ``dims`` exactly once.

    The tiler always fills the first uncovered position in row-major order and
    tries ``(row_span, col_span)`` pairs in increasing lexicographic order, so
    the output order is fixed.
    """
    rows, cols = dims.rows, dims.cols
    if rows * cols > MAX_ENUMERATION_CELLS:
        raise SizeError(f"{rows}x{cols} exceeds the enumeration bound of {MAX_ENUMERATION_CELLS} cells")

    covered = [[False] * cols for _ in range(rows)]
    placed: list[CellSpan] = []

    def first_free(start: int) -> int:
        for flat in range(start, rows * cols):
            if not covered[flat // cols][flat % cols]:
                return flat
        return rows * cols

    def fits(r: int, c: int, rs: int, cs: int) -> bool:
        return all(not covered[rr][cc] for rr in range(r, r + rs) for cc in range(c, c + cs))

    def mark(r: int, c: int, rs: int, cs: int, value: bool) -> None:
        for rr in range(r, r + rs):
            for cc in range(c, c + cs):
                covered[rr][cc] = value

    def step(start: int) -> Iterator[TableGrid]:
        flat = first_free(start)
        if flat == rows * cols:
            yield build_grid(dims, placed)
            return
        r, c = divmod(flat, cols)
        for rs in range(1, rows - r + 1):
            for cs in range(1, cols - c + 1):
                if not fits(r, c, rs, cs):
                    # wider spans at this height overlap too
                    break
                mark(r, c, rs, cs, True)
                placed.append(CellSpan(r, c, rs, cs))
                yield from step(flat + 1)
                placed.pop()
                mark(r, c, rs, cs, False)

    yield from step(0)
