"""Structure similarity (TEDs) and corpus token statistics."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .htmlcodec import HtmlSequence, HtmlToken, html_parse
from .lang import OtslSequence


@dataclass(frozen=True)
class TreeNode:
    tag: str
    rowspan: int = 1
    colspan: int = 1
    children: tuple[TreeNode, ...] = ()

    @property
    def label(self) -> tuple[str, int, int]:
        return (self.tag, self.rowspan, self.colspan)

    def __len__(self) -> int:
        return 1 + sum(len(c) for c in self.children)

    def iter(self) -> Iterator[TreeNode]:
        yield self
        for child in self.children:
            yield from child.iter()


def to_struct_tree(seq: HtmlSequence) -> TreeNode:
    """Build the ``table > [thead|tbody] > tr > td`` tree of a token sequence.

    ``td`` leaves carry their span attributes, so a span mismatch costs one
    relabel in :func:`teds`.
    """
    seq = [HtmlToken(t) for t in seq]
    html_parse(seq)

    T = HtmlToken
    stack: list[tuple[str, list[TreeNode]]] = [("table", [])]
    cell: dict[str, int] | None = None
    for tok in seq:
        if tok in (T.THEAD_OPEN, T.TBODY_OPEN, T.TR_OPEN):
            stack.append((tok.value.strip("<>"), []))
        elif tok in (T.THEAD_CLOSE, T.TBODY_CLOSE, T.TR_CLOSE):
            tag, children = stack.pop()
            stack[-1][1].append(TreeNode(tag, children=tuple(children)))
        elif tok in (T.TD_SIMPLE_OPEN, T.TD_ATTR_OPEN):
            cell = {}
        elif tok.span is not None:
            kind, k = tok.span
            assert cell is not None
            cell[kind] = k
        elif tok is T.TD_CLOSE:
            assert cell is not None
            stack[-1][1].append(TreeNode("td", cell.get("rowspan", 1), cell.get("colspan", 1)))
            cell = None
    tag, children = stack.pop()
    return TreeNode(tag, children=tuple(children))


class _Annotated:
    """Postorder numbering with leftmost leaf descendants and keyroots."""

    def __init__(self, root: TreeNode):
        self.labels: list[tuple[str, int, int]] = []
        self.lmd: list[int] = []

        def walk(node: TreeNode) -> int:
            first = None
            for child in node.children:
                leftmost = walk(child)
                if first is None:
                    first = leftmost
            index = len(self.labels)
            self.labels.append(node.label)
            self.lmd.append(index if first is None else first)
            return self.lmd[index]

        walk(root)
        seen: dict[int, int] = {}
        for i, leftmost in enumerate(self.lmd):
            seen[leftmost] = i  # highest postorder index per leftmost leaf
        self.keyroots = sorted(seen.values())


def tree_edit_distance(a: TreeNode, b: TreeNode) -> int:
    """Ordered tree edit distance in which every edit operation costs 1."""
    ta, tb = _Annotated(a), _Annotated(b)
    na, nb = len(ta.labels), len(tb.labels)
    dist = [[0] * nb for _ in range(na)]

    for i in ta.keyroots:
        for j in tb.keyroots:
            li, lj = ta.lmd[i], tb.lmd[j]
            rows, cols = i - li + 2, j - lj + 2
            fd = [[0] * cols for _ in range(rows)]
            for x in range(1, rows):
                fd[x][0] = x
            for y in range(1, cols):
                fd[0][y] = y
            for x in range(1, rows):
                ii = li + x - 1
                for y in range(1, cols):
                    jj = lj + y - 1
                    if ta.lmd[ii] == li and tb.lmd[jj] == lj:
                        relabel = 0 if ta.labels[ii] == tb.labels[jj] else 1
                        fd[x][y] = min(fd[x - 1][y] + 1, fd[x][y - 1] + 1, fd[x - 1][y - 1] + relabel)
                        dist[ii][jj] = fd[x][y]
                    else:
                        px = ta.lmd[ii] - li
                        py = tb.lmd[jj] - lj
                        fd[x][y] = min(fd[x - 1][y] + 1, fd[x][y - 1] + 1, fd[px][py] + dist[ii][jj])
    return dist[na - 1][nb - 1]


def teds(a: TreeNode, b: TreeNode) -> float:
    """``1 - d / max(|a|, |b|)``, floored at 0.

    With unit relabel costs ``d`` can exceed the larger tree (two small trees
    of different shape and disjoint labels), which would push the score below
    zero; such pairs score 0.
    """
    return max(0.0, 1.0 - tree_edit_distance(a, b) / max(len(a), len(b)))


def teds_html(a: HtmlSequence, b: HtmlSequence) -> float:
    return teds(to_struct_tree(a), to_struct_tree(b))


def _median(hist: Counter[int]) -> float | None:
    n = sum(hist.values())
    if n == 0:
        return None
    ordered = sorted(hist.items())

    def nth(k: int) -> int:
        seen = 0
        for value, count in ordered:
            seen += count
            if k < seen:
                return value
        raise IndexError(k)

    if n % 2:
        return float(nth(n // 2))
    return (nth(n // 2 - 1) + nth(n // 2)) / 2


@dataclass
class FormatStats:
    frequencies: Counter[str] = field(default_factory=Counter)
    lengths: Counter[int] = field(default_factory=Counter)

    @property
    def records(self) -> int:
        return sum(self.lengths.values())

    @property
    def total_tokens(self) -> int:
        return sum(self.frequencies.values())

    @property
    def mean_length(self) -> float | None:
        return self.total_tokens / self.records if self.records else None

    @property
    def median_length(self) -> float | None:
        return _median(self.lengths)

    def add(self, tokens: Sequence[str]) -> None:
        self.frequencies.update(str(t) for t in tokens)
        self.lengths[len(tokens)] += 1

    def merge(self, other: FormatStats) -> FormatStats:
        return FormatStats(self.frequencies + other.frequencies, self.lengths + other.lengths)


@dataclass
class CorpusStats:
    otsl: FormatStats = field(default_factory=FormatStats)
    html: FormatStats = field(default_factory=FormatStats)

    @property
    def records(self) -> int:
        return max(self.otsl.records, self.html.records)

    @property
    def ratio(self) -> float | None:
        """Mean OTSL length over mean HTML length; None while either is empty."""
        if self.otsl.mean_length is None or not self.html.mean_length:
            return None
        return self.otsl.mean_length / self.html.mean_length

    def add(self, otsl: OtslSequence, html: HtmlSequence) -> None:
        self.otsl.add(otsl)
        self.html.add(html)

    def merge(self, other: CorpusStats) -> CorpusStats:
        return CorpusStats(self.otsl.merge(other.otsl), self.html.merge(other.html))

    def summary(self) -> str:
        def fmt(x: float | None) -> str:
            return "NA" if x is None else f"{x:.4f}"

        return (
            f"records={self.records} "
            f"otsl_mean={fmt(self.otsl.mean_length)} otsl_median={fmt(self.otsl.median_length)} "
            f"html_mean={fmt(self.html.mean_length)} html_median={fmt(self.html.median_length)} "
            f"ratio={fmt(self.ratio)}"
        )

    def to_csv(self) -> str:
        """Token frequencies and length histograms as ``kind,key,count`` rows."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["kind", "key", "count"])
        for name, stats in (("otsl", self.otsl), ("html", self.html)):
            for token, count in sorted(stats.frequencies.items(), key=lambda kv: (-kv[1], kv[0])):
                writer.writerow([f"{name}_token", token, count])
        for name, stats in (("otsl", self.otsl), ("html", self.html)):
            for length, count in sorted(stats.lengths.items()):
                writer.writerow([f"{name}_length", length, count])
        return out.getvalue()


def corpus_stats(records: Iterable[tuple[OtslSequence, HtmlSequence]]) -> CorpusStats:
    stats = CorpusStats()
    for otsl, html in records:
        stats.add(otsl, html)
    return stats
