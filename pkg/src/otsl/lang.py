"""The five-token table structure language.

Tokens, in grid order, describe each position of a rectangular grid:

* ``C``  a new cell (the top-left corner of a span)
* ``L``  merges with the left neighbour
* ``U``  merges with the upper neighbour
* ``X``  merges with both the left and upper neighbours
* ``NL`` ends the current row

Every rule is decidable from the tokens already seen, so :class:`Validator`
checks one token at a time and can report which tokens may come next.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .grid import CellSpan, GridDims, TableGrid, build_grid


class OtslToken(str, Enum):
    C = "C"
    L = "L"
    U = "U"
    X = "X"
    NL = "NL"

    def __str__(self) -> str:
        return self.value


OtslSequence = Sequence[OtslToken]

CELL_TOKENS = (OtslToken.C, OtslToken.L, OtslToken.U, OtslToken.X)


class Mode(str, Enum):
    SYNTACTIC = "syntactic"
    STRICT = "strict"


class Rule(str, Enum):
    R1_LEFT_LOOKING = "R1_left_looking"
    R2_UP_LOOKING = "R2_up_looking"
    R3_CROSS = "R3_cross"
    R4_FIRST_ROW = "R4_first_row"
    R5_FIRST_COL = "R5_first_col"
    R6_RECTANGULAR = "R6_rectangular"
    S7_SPAN_SHAPE = "S7_span_shape"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RuleViolation:
    rule: Rule
    position: tuple[int, int]
    index: int
    token: OtslToken

    def __str__(self) -> str:
        return f"{self.rule} at {self.position} (token {self.index}: {self.token})"


class OtslError(ValueError):
    pass


class LexError(OtslError):
    def __init__(self, word: str, offset: int):
        super().__init__(f"unknown token {word!r} at offset {offset}")
        self.word = word
        self.offset = offset


class OtslSyntaxError(OtslError):
    def __init__(self, violation: RuleViolation):
        super().__init__(str(violation))
        self.violation = violation


class IncompleteError(OtslError):
    """The tokens form a valid prefix but not a finished table."""


class SpanShapeError(OtslError):
    pass


_WORD = re.compile(r"\S+")


def tokenize(text: str) -> list[OtslToken]:
    tokens = []
    for match in _WORD.finditer(text):
        try:
            tokens.append(OtslToken(match.group()))
        except ValueError:
            raise LexError(match.group(), match.start()) from None
    return tokens


def detokenize(seq: Iterable[OtslToken]) -> str:
    return " ".join(OtslToken(t).value for t in seq)


class Validator:
    """Incremental acceptor for OTSL prefixes.

    Only the previous and current rows are kept. In both modes the validator
    also records which origin owns each position; strict mode uses that to
    reject merges that would make a span non-rectangular (rule S7).

    ``feed`` raises :class:`OtslSyntaxError` and leaves the state unchanged when
    a token is rejected, so the same instance can keep going.
    """

    def __init__(self, mode: Mode | str = Mode.STRICT):
        self.mode = Mode(mode)
        self.width: int | None = None
        self.row = 0
        self.index = 0
        self.prev_tokens: list[OtslToken] = []
        self.prev_owners: list[tuple[int, int]] = []
        self.cur_tokens: list[OtslToken] = []
        self.cur_owners: list[tuple[int, int]] = []

    @property
    def col(self) -> int:
        return len(self.cur_tokens)

    @property
    def at_row_start(self) -> bool:
        return not self.cur_tokens

    def clone(self) -> Validator:
        other = Validator.__new__(Validator)
        other.__dict__.update(self.__dict__)
        other.prev_tokens = list(self.prev_tokens)
        other.prev_owners = list(self.prev_owners)
        other.cur_tokens = list(self.cur_tokens)
        other.cur_owners = list(self.cur_owners)
        return other

    def check(self, token: OtslToken) -> RuleViolation | None:
        """Return the first rule ``token`` would break here, or None."""
        token = OtslToken(token)
        r, c = self.row, self.col

        def fail(rule: Rule) -> RuleViolation:
            return RuleViolation(rule, (r, c), self.index, token)

        if token is OtslToken.NL:
            # an empty row is never allowed, so the first NL needs c >= 1
            if c == 0 or (self.width is not None and c != self.width):
                return fail(Rule.R6_RECTANGULAR)
            return None

        if self.width is not None and c >= self.width:
            return fail(Rule.R6_RECTANGULAR)
        if r == 0 and token in (OtslToken.U, OtslToken.X):
            return fail(Rule.R4_FIRST_ROW)
        if c == 0 and token in (OtslToken.L, OtslToken.X):
            return fail(Rule.R5_FIRST_COL)

        left = self.cur_tokens[c - 1] if c > 0 else None
        up = self.prev_tokens[c] if r > 0 else None
        if token is OtslToken.L and left not in (OtslToken.L, OtslToken.C):
            return fail(Rule.R1_LEFT_LOOKING)
        if token is OtslToken.U and up not in (OtslToken.U, OtslToken.C):
            return fail(Rule.R2_UP_LOOKING)
        if token is OtslToken.X and (
            left not in (OtslToken.X, OtslToken.U) or up not in (OtslToken.X, OtslToken.L)
        ):
            return fail(Rule.R3_CROSS)

        if self.mode is Mode.STRICT and r > 0:
            up_owner = self.prev_owners[c]
            # the span above continues into this row iff this row already
            # claimed its left column, so every later column must be X
            continues = up_owner[1] < c and self.cur_owners[up_owner[1]] == up_owner
            if continues and token is not OtslToken.X:
                return fail(Rule.S7_SPAN_SHAPE)
            if token is OtslToken.X and self.cur_owners[c - 1] != up_owner:
                return fail(Rule.S7_SPAN_SHAPE)
        return None

    def feed(self, token: OtslToken) -> None:
        token = OtslToken(token)
        violation = self.check(token)
        if violation is not None:
            raise OtslSyntaxError(violation)
        self._advance(token)

    def _advance(self, token: OtslToken) -> None:
        self.index += 1
        if token is OtslToken.NL:
            if self.width is None:
                self.width = len(self.cur_tokens)
            self.prev_tokens, self.prev_owners = self.cur_tokens, self.cur_owners
            self.cur_tokens, self.cur_owners = [], []
            self.row += 1
            return
        r, c = self.row, self.col
        if token is OtslToken.C:
            owner = (r, c)
        elif token is OtslToken.L:
            owner = self.cur_owners[c - 1]
        else:
            owner = self.prev_owners[c]
        self.cur_tokens.append(token)
        self.cur_owners.append(owner)

    def allowed_next(self) -> set[OtslToken]:
        return {t for t in OtslToken if self.check(t) is None}

    @property
    def complete(self) -> bool:
        return self.row > 0 and self.at_row_start


def validate(seq: Iterable[OtslToken], mode: Mode | str = Mode.STRICT) -> GridDims:
    """Check a whole sequence and return its dimensions.

    Raises :class:`OtslSyntaxError` on the first rejected token and
    :class:`IncompleteError` if the tokens stop before the table is closed.
    """
    validator = Validator(mode)
    for token in seq:
        validator.feed(token)
    if not validator.complete:
        raise IncompleteError(
            f"sequence ends mid-row at {(validator.row, validator.col)}"
            if validator.index
            else "empty sequence"
        )
    assert validator.width is not None
    return GridDims(validator.row, validator.width)


def parse(seq: Iterable[OtslToken]) -> TableGrid:
    """Convert a strictly valid sequence into a :class:`TableGrid`."""
    seq = [OtslToken(t) for t in seq]
    dims = validate(seq, Mode.STRICT)

    owners: list[list[tuple[int, int]]] = []
    row: list[tuple[int, int]] = []
    for token in seq:
        if token is OtslToken.NL:
            owners.append(row)
            row = []
            continue
        r, c = len(owners), len(row)
        if token is OtslToken.C:
            row.append((r, c))
        elif token is OtslToken.L:
            row.append(row[c - 1])
        else:
            row.append(owners[r - 1][c])

    extents: dict[tuple[int, int], tuple[int, int]] = {}
    for r, row in enumerate(owners):
        for c, origin in enumerate(row):
            rs, cs = extents.get(origin, (1, 1))
            extents[origin] = (max(rs, r - origin[0] + 1), max(cs, c - origin[1] + 1))

    spans = [CellSpan(r0, c0, rs, cs) for (r0, c0), (rs, cs) in extents.items()]
    if sum(s.row_span * s.col_span for s in spans) != dims.rows * dims.cols:
        raise SpanShapeError("merged regions do not tile exact rectangles")
    return build_grid(dims, spans)


def encode(grid: TableGrid) -> list[OtslToken]:
    tokens = []
    for r in range(grid.rows):
        for c in range(grid.cols):
            span = grid.owner(r, c)
            if (r, c) == span.origin:
                tokens.append(OtslToken.C)
            elif r == span.origin_row:
                tokens.append(OtslToken.L)
            elif c == span.origin_col:
                tokens.append(OtslToken.U)
            else:
                tokens.append(OtslToken.X)
        tokens.append(OtslToken.NL)
    return tokens
