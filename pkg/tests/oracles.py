"""Reference computations that share no code with the package.

These are deliberately naive.  Each one enumerates every candidate answer
(token assignments, cut positions or node mappings) and keeps the valid ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

CELL_WORDS = ("C", "L", "U", "X")


def assignment_to_text(rows: list[list[str]]) -> str:
    return " ".join(" ".join(row) + " NL" for row in rows)


def all_assignments(rows: int, cols: int):
    """Every grid of cell words with (0, 0) fixed to C."""
    free = rows * cols - 1
    for combo in itertools.product(CELL_WORDS, repeat=free):
        flat = ("C",) + combo
        yield [list(flat[r * cols:(r + 1) * cols]) for r in range(rows)]


def syntactic_ok(grid: list[list[str]]) -> bool:
    """The six published rules, checked directly on a complete assignment."""
    for r, row in enumerate(grid):
        for c, w in enumerate(row):
            left = row[c - 1] if c > 0 else None
            up = grid[r - 1][c] if r > 0 else None
            if r == 0 and w in ("U", "X"):
                return False
            if c == 0 and w in ("L", "X"):
                return False
            if w == "L" and left not in ("L", "C"):
                return False
            if w == "U" and up not in ("U", "C"):
                return False
            if w == "X" and (left not in ("X", "U") or up not in ("X", "L")):
                return False
    return True


def tiling_of(grid: list[list[str]]) -> frozenset | None:
    """Return the rectangles an assignment encodes, or None if it encodes none.

    Positions are merged with union-find along the edges each word names;
    every component must be a full rectangle whose top-left word is C and
    whose other words match their place (L top edge, U left edge, X inside).
    """
    rows, cols = len(grid), len(grid[0])
    parent = {(r, c): (r, c) for r in range(rows) for c in range(cols)}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    def union(a, b):
        parent[find(a)] = find(b)

    for r in range(rows):
        for c in range(cols):
            w = grid[r][c]
            if w in ("L", "X"):
                if c == 0:
                    return None
                union((r, c), (r, c - 1))
            if w in ("U", "X"):
                if r == 0:
                    return None
                union((r, c), (r - 1, c))

    groups: dict = {}
    for p in parent:
        groups.setdefault(find(p), []).append(p)

    rects = []
    for members in groups.values():
        r0 = min(r for r, _ in members)
        c0 = min(c for _, c in members)
        r1 = max(r for r, _ in members)
        c1 = max(c for _, c in members)
        if len(members) != (r1 - r0 + 1) * (c1 - c0 + 1):
            return None
        for r, c in members:
            expected = "C" if (r, c) == (r0, c0) else "L" if r == r0 else "U" if c == c0 else "X"
            if grid[r][c] != expected:
                return None
        rects.append((r0, c0, r1 - r0 + 1, c1 - c0 + 1))
    return frozenset(rects)


def strip_tilings(n: int) -> list[tuple[int, ...]]:
    """Segment lengths for every tiling of a 1 x n strip, via cut subsets."""
    out = []
    for k in range(n):
        for cuts in itertools.combinations(range(1, n), k):
            bounds = (0,) + cuts + (n,)
            out.append(tuple(b - a for a, b in zip(bounds, bounds[1:])))
    return out


@dataclass
class T:
    """Tiny labeled tree for the edit-distance oracle."""

    label: str
    kids: list[T] = field(default_factory=list)


def _flatten(tree: T):
    """Preorder labels plus the ancestor sets of each node."""
    labels, ancestors = [], []

    def walk(node, path):
        idx = len(labels)
        labels.append(node.label)
        ancestors.append(frozenset(path))
        for kid in node.kids:
            walk(kid, path + [idx])

    walk(tree, [])
    return labels, ancestors


def brute_edit_distance(a: T, b: T) -> int:
    """Minimum edit cost as the cheapest valid mapping between the trees.

    A mapping is valid when it is one-to-one and preserves both preorder and
    ancestry; its cost is unmapped nodes on either side plus label mismatches.
    """
    la, aa = _flatten(a)
    lb, ab = _flatten(b)
    na, nb = len(la), len(lb)
    best = na + nb  # the empty mapping

    def search(i: int, last_j: int, pairs: list, cost: int):
        nonlocal best
        if cost >= best:
            return
        if i == na:
            total = cost + (nb - len(pairs))
            best = min(best, total)
            return
        # node i deleted
        search(i + 1, last_j, pairs, cost + 1)
        for j in range(last_j + 1, nb):
            ok = all(((pi in aa[i]) == (pj in ab[j])) for pi, pj in pairs)
            if not ok:
                continue
            pairs.append((i, j))
            search(i + 1, j, pairs, cost + (la[i] != lb[j]))
            pairs.pop()

    search(0, -1, [], 0)
    return best


def tree_shapes(n: int):
    """All ordered unlabeled trees with n nodes, as nested child lists."""
    if n == 1:
        yield []
        return
    for forest in _forests(n - 1):
        yield forest


def _forests(n: int):
    if n == 0:
        yield []
        return
    for first in range(1, n + 1):
        for head in tree_shapes(first):
            for rest in _forests(n - first):
                yield [head] + rest


def label_shape(shape, labels) -> T:
    it = iter(labels)

    def build(kids):
        node = T(next(it))
        node.kids = [build(k) for k in kids]
        return node

    return build(shape)


def shape_size(shape) -> int:
    return 1 + sum(shape_size(k) for k in shape)
