"""Seeded stand-in for an autoregressive structure decoder.

For a known grid, :func:`simulate` emits one :class:`CandidateStep` per true
OTSL token with the true token placed at a randomly drawn rank.  There is no
model here, only controllable rank placement for exercising repair.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .grid import TableGrid
from .lang import encode
from .repair import FALLBACK_ORDER, CandidateStep

TOP_CONFIDENCE = 0.9
# below this the linear schedule is replaced by a strictly decreasing tail
_FLOOR = 1e-3


class SimMode(str, Enum):
    CORRUPT_RANK = "corrupt_rank"
    DROP_TAIL = "drop_tail"


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    p_top1: float = 1.0
    p_top2: float = 0.0
    confidence_gap: float = 0.1
    mode: SimMode = SimMode.CORRUPT_RANK
    drop_k: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", SimMode(self.mode))
        for name in ("p_top1", "p_top2"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")
        if self.p_top1 + self.p_top2 > 1.0 + 1e-12:
            raise ValueError("p_top1 + p_top2 must not exceed 1")
        if not 0.0 < self.confidence_gap <= 0.5:
            raise ValueError(f"confidence_gap={self.confidence_gap} outside (0, 0.5]")
        if self.drop_k < 0:
            raise ValueError("drop_k must be non-negative")


def confidence_for_rank(rank: int, gap: float) -> float:
    conf = TOP_CONFIDENCE - rank * gap
    return conf if conf >= _FLOOR else _FLOOR / (rank + 1)


def simulate(grid: TableGrid, cfg: SimConfig) -> list[CandidateStep]:
    truth = encode(grid)
    if cfg.mode is SimMode.DROP_TAIL:
        truth = truth[: max(len(truth) - cfg.drop_k, 0)]

    rng = random.Random(cfg.seed)
    steps = []
    for token in truth:
        u = rng.random()
        if u < cfg.p_top1:
            rank = 0
        elif u < cfg.p_top1 + cfg.p_top2:
            rank = 1
        else:
            rank = 2
        ranked = [t for t in FALLBACK_ORDER if t is not token]
        ranked.insert(rank, token)
        steps.append(
            CandidateStep(tuple((t, confidence_for_rank(i, cfg.confidence_gap)) for i, t in enumerate(ranked)))
        )
    return steps
