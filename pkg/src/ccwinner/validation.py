"""Recognizers: rho consistency and single-crossing checks for line, tree, grid.

Each checker returns None when the property holds, otherwise the
lexicographically first violation witness (ordered by candidate pair, then
by position).  Witnesses are plain facts about the instance and can be
re-verified independently of the checker.
"""

from __future__ import annotations

from collections import deque
from typing import NamedTuple, Optional

import numpy as np

from .core import Grid, Line, PreferenceProfile, RootedTree


class ConsistencyViolation(NamedTuple):
    """Voter ranks `better` above `worse` yet scores it strictly higher."""

    voter: int
    better: int
    worse: int


class CrossingViolation(NamedTuple):
    """Voters v1 and v3 prefer c to c_other while v2, between them, disagrees.

    "Between" means: later in the line order (v1 before v2 before v3), on the
    tree path from v1 to v3, or inside the coordinate bounding box of v1 and
    v3 on the grid.
    """

    c: int
    c_other: int
    v1: int
    v2: int
    v3: int


def check_consistency(profile: PreferenceProfile) -> Optional[ConsistencyViolation]:
    """Verify rho is nondecreasing along every ranking.

    Adjacent positions suffice: any violating pair contains an adjacent one.
    """
    for v, ranking in enumerate(profile.rankings):
        row = profile.rho[v]
        for p in range(len(ranking) - 1):
            if row[ranking[p]] > row[ranking[p + 1]]:
                return ConsistencyViolation(v, ranking[p], ranking[p + 1])
    return None


def rank_positions(profile: PreferenceProfile) -> np.ndarray:
    """(n, m) matrix of rank positions; row v maps candidate -> position."""
    rank = np.asarray(profile.rankings, dtype=np.int64)
    pos = np.empty_like(rank)
    n, m = rank.shape
    pos[np.arange(n)[:, None], rank] = np.arange(m)[None, :]
    return pos


def check_sc_line(profile: PreferenceProfile, line: Line) -> Optional[CrossingViolation]:
    """Single-crossing on a line: every candidate pair flips at most once."""
    if line.n != profile.n:
        raise ValueError("line order and profile disagree on the number of voters")
    pos = rank_positions(profile)[np.asarray(line.order)]
    m = profile.m
    for a in range(m):
        for b in range(a + 1, m):
            prefers_a = pos[:, a] < pos[:, b]
            flips = np.flatnonzero(prefers_a[1:] != prefers_a[:-1])
            if len(flips) < 2:
                continue
            f0, f1 = int(flips[0]), int(flips[1])
            v1, v2, v3 = (line.order[f0], line.order[f0 + 1], line.order[f1 + 1])
            if prefers_a[f0]:
                return CrossingViolation(a, b, v1, v2, v3)
            return CrossingViolation(b, a, v1, v2, v3)
    return None


def _tree_side_violation(tree: RootedTree, inside: np.ndarray) -> Optional[tuple[int, int, int]]:
    """If `inside` does not induce a connected subtree, return (v1, v2, v3)."""
    members = np.flatnonzero(inside)
    if len(members) == 0:
        return None
    # A vertex subset of a tree is connected iff it spans |S| - 1 edges.
    edges = sum(
        1 for v in range(tree.n) if v != tree.root and inside[v] and inside[tree.parent[v]]
    )
    if edges == len(members) - 1:
        return None
    start = int(members[0])
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        neighbors = list(tree.child_order[v])
        if v != tree.root:
            neighbors.append(tree.parent[v])
        for u in neighbors:
            if inside[u] and u not in seen:
                seen.add(u)
                queue.append(u)
    v3 = int(next(v for v in members if int(v) not in seen))
    v2 = next(u for u in tree.path(start, v3) if not inside[u])
    return start, v2, v3


def check_sc_tree(profile: PreferenceProfile, tree: RootedTree) -> Optional[CrossingViolation]:
    """Single-crossing on a tree: each pair's supporters induce a subtree.

    Checked per candidate pair on both preference sides; equivalent to the
    path formulation (no path may read c, c_other, c) and O(n) per pair.
    """
    if tree.n != profile.n:
        raise ValueError("tree and profile disagree on the number of voters")
    pos = rank_positions(profile)
    m = profile.m
    for a in range(m):
        for b in range(a + 1, m):
            prefers_a = pos[:, a] < pos[:, b]
            for c, c_other, inside in ((a, b, prefers_a), (b, a, ~prefers_a)):
                witness = _tree_side_violation(tree, inside)
                if witness is not None:
                    return CrossingViolation(c, c_other, *witness)
    return None


def _first_member(mask: np.ndarray) -> tuple[int, int]:
    flat = int(np.flatnonzero(mask.ravel())[0])
    return divmod(flat, mask.shape[1])


def _grid_side_violation(side: np.ndarray) -> Optional[tuple[tuple, tuple, tuple]]:
    """If `side` is not box-convex, return grid coords (s, u, t) with u outside.

    u fails iff two opposite closed quadrants around it both contain members;
    then some member box contains u.  Quadrant occupancy comes from running
    maxima in the four sweep directions.
    """
    a = side.astype(np.uint8)
    nw = np.maximum.accumulate(np.maximum.accumulate(a, axis=0), axis=1)
    se = np.maximum.accumulate(np.maximum.accumulate(a[::-1, ::-1], axis=0), axis=1)[::-1, ::-1]
    ne = np.maximum.accumulate(np.maximum.accumulate(a[:, ::-1], axis=0), axis=1)[:, ::-1]
    sw = np.maximum.accumulate(np.maximum.accumulate(a[::-1, :], axis=0), axis=1)[::-1, :]
    bad = ((nw & se) | (ne & sw)).astype(bool) & ~side
    if not bad.any():
        return None
    i, j = _first_member(bad)
    if nw[i, j] and se[i, j]:
        s = _first_member(side[: i + 1, : j + 1])
        t0, t1 = _first_member(side[i:, j:])
        t = (t0 + i, t1 + j)
    else:
        s0, s1 = _first_member(side[: i + 1, j:])
        s = (s0, s1 + j)
        t0, t1 = _first_member(side[i:, : j + 1])
        t = (t0 + i, t1)
    return s, (i, j), t


def check_sc_grid(profile: PreferenceProfile, grid: Grid) -> Optional[CrossingViolation]:
    """Single-crossing on a grid: each pair's supporter set is box-convex.

    Equivalent to the shortest-path formulation: monotone staircases inside a
    bounding box are exactly the shortest paths through it, so a chord
    c, c_other, c along some shortest path exists iff box-convexity fails for
    one side of the pair.  O(n) per ordered pair via quadrant sweeps.
    """
    if grid.n != profile.n:
        raise ValueError("grid shape and profile disagree on the number of voters")
    pos = rank_positions(profile)
    m = profile.m
    for a in range(m):
        for b in range(a + 1, m):
            prefers_a = (pos[:, a] < pos[:, b]).reshape(grid.n1, grid.n2)
            for c, c_other, side in ((a, b, prefers_a), (b, a, ~prefers_a)):
                witness = _grid_side_violation(side)
                if witness is not None:
                    s, u, t = witness
                    return CrossingViolation(
                        c, c_other, grid.index(*s), grid.index(*u), grid.index(*t)
                    )
    return None


def check_structure(profile: PreferenceProfile, structure) -> Optional[CrossingViolation]:
    """Dispatch to the matching single-crossing checker."""
    if isinstance(structure, Line):
        return check_sc_line(profile, structure)
    if isinstance(structure, RootedTree):
        return check_sc_tree(profile, structure)
    if isinstance(structure, Grid):
        return check_sc_grid(profile, structure)
    raise TypeError(f"unsupported structure {type(structure).__name__}")
