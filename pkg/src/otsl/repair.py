"""Confidence-driven correction of OTSL token sequences.

At each decoding step the highest-confidence token that the validator accepts
is kept.  When none of the listed candidates fit, the first legal token in
:data:`FALLBACK_ORDER` is used instead, which always exists because the
validator never reaches a dead end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .lang import (
    Mode,
    OtslError,
    OtslToken,
    Validator,
    validate,
)

FALLBACK_ORDER = (OtslToken.C, OtslToken.NL, OtslToken.L, OtslToken.U, OtslToken.X)
_TIE_RANK = {t: i for i, t in enumerate(FALLBACK_ORDER)}


class CandidateFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CandidateStep:
    """Ranked ``(token, confidence)`` pairs for one decoding position.

    Candidates are sorted on construction: confidence descending, ties broken
    by :data:`FALLBACK_ORDER`.
    """

    candidates: tuple[tuple[OtslToken, float], ...]

    def __post_init__(self) -> None:
        if not self.candidates:
            raise ValueError("a candidate step needs at least one token")
        cleaned = []
        for token, conf in self.candidates:
            conf = float(conf)
            if not 0.0 <= conf <= 1.0:
                raise ValueError(f"confidence {conf} outside [0, 1]")
            cleaned.append((OtslToken(token), conf))
        cleaned.sort(key=lambda tc: (-tc[1], _TIE_RANK[tc[0]]))
        object.__setattr__(self, "candidates", tuple(cleaned))

    @classmethod
    def certain(cls, token: OtslToken) -> CandidateStep:
        """The observed token at confidence 1, all others at 0."""
        token = OtslToken(token)
        return cls(((token, 1.0),) + tuple((t, 0.0) for t in FALLBACK_ORDER if t is not token))

    @property
    def top(self) -> OtslToken:
        return self.candidates[0][0]

    def tokens(self) -> list[OtslToken]:
        return [t for t, _ in self.candidates]


@dataclass(frozen=True)
class Substitution:
    index: int
    original: OtslToken | None  # None for tokens appended to close a truncated table
    chosen: OtslToken


@dataclass
class RepairReport:
    output: list[OtslToken]
    substitutions: list[Substitution] = field(default_factory=list)
    valid: bool = False


def _strictly_valid(seq: Sequence[OtslToken]) -> bool:
    try:
        validate(seq, Mode.STRICT)
    except OtslError:
        return False
    return True


def _first_allowed(validator: Validator) -> OtslToken:
    for token in FALLBACK_ORDER:
        if validator.check(token) is None:
            return token
    raise AssertionError("validator reached a state with no legal token")


def repair_stream(
    steps: Iterable[CandidateStep],
    mode: Mode | str = Mode.STRICT,
    *,
    min_rows: int = 0,
) -> RepairReport:
    """Greedy on-the-fly repair over ranked candidates.

    If the steps stop mid-row (or before any row is finished) the table is
    closed greedily from the fallback order.  ``min_rows`` extends that
    completion with whole rows until the table has at least that many.
    """
    validator = Validator(mode)
    output: list[OtslToken] = []
    subs: list[Substitution] = []

    for index, step in enumerate(steps):
        chosen = next((t for t in step.tokens() if validator.check(t) is None), None)
        if chosen is None:
            chosen = _first_allowed(validator)
        validator.feed(chosen)
        output.append(chosen)
        if chosen is not step.top:
            subs.append(Substitution(index, step.top, chosen))

    while not validator.complete or validator.row < min_rows:
        if validator.width is None and not validator.at_row_start:
            # the first row has no fixed width yet; close it rather than grow it
            chosen = OtslToken.NL
        else:
            chosen = _first_allowed(validator)
        subs.append(Substitution(len(output), None, chosen))
        validator.feed(chosen)
        output.append(chosen)

    return RepairReport(output, subs, _strictly_valid(output))


def repair_sequence(seq: Iterable[OtslToken], mode: Mode | str = Mode.STRICT) -> RepairReport:
    """Repair an already generated sequence, treating each token as certain."""
    return repair_stream([CandidateStep.certain(t) for t in seq], mode)


def parse_candidate_line(line: str) -> CandidateStep:
    """Parse ``"C:0.9;L:0.05"`` into a :class:`CandidateStep`."""
    pairs = []
    for part in line.strip().split(";"):
        part = part.strip()
        if not part:
            continue
        name, sep, conf = part.partition(":")
        if not sep:
            raise CandidateFormatError(f"missing ':' in {part!r}")
        try:
            pairs.append((OtslToken(name.strip()), float(conf)))
        except ValueError as exc:
            raise CandidateFormatError(f"bad candidate {part!r}: {exc}") from None
    try:
        return CandidateStep(tuple(pairs))
    except ValueError as exc:
        raise CandidateFormatError(str(exc)) from None


def read_candidates(lines: Iterable[str]) -> list[CandidateStep]:
    steps = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            steps.append(parse_candidate_line(line))
        except CandidateFormatError as exc:
            raise CandidateFormatError(f"line {lineno}: {exc}") from None
    return steps


def format_candidate_line(step: CandidateStep) -> str:
    return ";".join(f"{t.value}:{conf!r}" for t, conf in step.candidates)


def write_candidates(steps: Iterable[CandidateStep]) -> str:
    return "".join(format_candidate_line(s) + "\n" for s in steps)
