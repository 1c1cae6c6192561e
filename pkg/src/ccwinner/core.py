"""Shared domain model: profiles, structures, assignments, and costs.

All indices are 0-based inside the library; the CLI converts to 1-based
labels at the file-format boundary.  Core types are frozen dataclasses
built from tuples, so they are immutable and safe to share.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import NotATree

Rational = Union[int, Fraction]


class Objective(Enum):
    """What gets minimized: the sum or the maximum of misrepresentations."""

    UTILITARIAN = "utilitarian"
    EGALITARIAN = "egalitarian"


def _as_rational(x) -> Rational:
    if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
        raise ValueError(f"rho entries must be int or Fraction, got {type(x).__name__}")
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def borda_misrepresentation(rankings: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Misrepresentation by rank position: 0 for a voter's top choice, m-1 for the last."""
    rows = []
    for ranking in rankings:
        row = [0] * len(ranking)
        for pos, cand in enumerate(ranking):
            if not 0 <= cand < len(ranking):
                raise ValueError(f"ranking entry {cand} outside 0..{len(ranking) - 1}")
            row[cand] = pos
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class PreferenceProfile:
    """Voters' strict rankings plus a misrepresentation matrix.

    ``rankings[v]`` lists candidates from most to least preferred.
    ``rho[v][c]`` is voter v's misrepresentation when represented by c;
    entries are non-negative ints or Fractions.  Consistency of rho with
    the rankings is a property of well-formed instances and is checked by
    ``validation.check_consistency``, not by the constructor, so that
    malformed external data can still be loaded and diagnosed.
    """

    rankings: tuple[tuple[int, ...], ...]
    rho: tuple[tuple[Rational, ...], ...]

    def __post_init__(self):
        if not self.rankings:
            raise ValueError("profile needs at least one voter")
        m = len(self.rankings[0])
        if m == 0:
            raise ValueError("profile needs at least one candidate")
        expected = frozenset(range(m))
        rankings = tuple(tuple(r) for r in self.rankings)
        for v, ranking in enumerate(rankings):
            if len(ranking) != m or frozenset(ranking) != expected:
                raise ValueError(f"ranking of voter {v} is not a permutation of 0..{m - 1}")
        if len(self.rho) != len(rankings):
            raise ValueError("rho must have one row per voter")
        rho = []
        for v, row in enumerate(self.rho):
            if len(row) != m:
                raise ValueError(f"rho row of voter {v} must have {m} entries")
            vals = tuple(_as_rational(x) for x in row)
            if any(x < 0 for x in vals):
                raise ValueError(f"rho row of voter {v} has a negative entry")
            rho.append(vals)
        object.__setattr__(self, "rankings", rankings)
        object.__setattr__(self, "rho", tuple(rho))

    @classmethod
    def from_rankings(cls, rankings, rho=None) -> "PreferenceProfile":
        """Build a profile; rho defaults to Borda misrepresentation."""
        rankings = tuple(tuple(r) for r in rankings)
        if rho is None:
            rho = borda_misrepresentation(rankings)
        return cls(rankings, tuple(tuple(row) for row in rho))

    @property
    def n(self) -> int:
        return len(self.rankings)

    @property
    def m(self) -> int:
        return len(self.rankings[0])

    @property
    def has_integer_rho(self) -> bool:
        return all(isinstance(x, int) for row in self.rho for x in row)


@dataclass(frozen=True)
class Line:
    """A left-to-right ordering of the voters."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(self.order)
        if frozenset(order) != frozenset(range(len(order))) or not order:
            raise ValueError("order must be a non-empty permutation of the voters")
        object.__setattr__(self, "order", order)

    @property
    def n(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class RootedTree:
    """A rooted tree on the voters with an explicit ordering of children.

    ``parent[v]`` is None exactly for the root; ``child_order[v]`` lists
    v's children in the order solvers process them.
    """

    parent: tuple[Optional[int], ...]
    root: int
    child_order: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        parent = tuple(self.parent)
        child_order = tuple(tuple(ch) for ch in self.child_order)
        n = len(parent)
        if n == 0:
            raise NotATree("tree needs at least one vertex")
        if not (0 <= self.root < n) or parent[self.root] is not None:
            raise NotATree("root must be the unique vertex without a parent")
        if len(child_order) != n:
            raise NotATree("child_order must have one entry per vertex")
        for v, p in enumerate(parent):
            if v == self.root:
                continue
            if p is None or not (0 <= p < n):
                raise NotATree(f"vertex {v} needs a parent inside the tree")
        for v in range(n):
            expected = sorted(u for u in range(n) if u != self.root and parent[u] == v)
            if sorted(child_order[v]) != expected:
                raise NotATree(f"child_order of vertex {v} does not match the parent links")
        # A reachability sweep from the root rejects cycles and disconnections.
        seen = [False] * n
        queue = deque([self.root])
        seen[self.root] = True
        while queue:
            v = queue.popleft()
            for u in child_order[v]:
                if seen[u]:
                    raise NotATree("parent links contain a cycle")
                seen[u] = True
                queue.append(u)
        if not all(seen):
            raise NotATree("parent links leave vertices unreachable from the root")
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "child_order", child_order)

    @classmethod
    def from_parent(cls, parent: Sequence[Optional[int]], root: int) -> "RootedTree":
        """Children are ordered by vertex index."""
        n = len(parent)
        children = [[] for _ in range(n)]
        for v, p in enumerate(parent):
            if v != root and p is not None:
                children[p].append(v)
        return cls(tuple(parent), root, tuple(tuple(ch) for ch in children))

    @property
    def n(self) -> int:
        return len(self.parent)

    def depths(self) -> list[int]:
        depth = [0] * self.n
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for u in self.child_order[v]:
                depth[u] = depth[v] + 1
                queue.append(u)
        return depth

    def path(self, u: int, w: int) -> list[int]:
        """Vertices of the unique u-w path, endpoints included."""
        depth = self.depths()
        front, back = [u], [w]
        while depth[front[-1]] > depth[back[-1]]:
            front.append(self.parent[front[-1]])
        while depth[back[-1]] > depth[front[-1]]:
            back.append(self.parent[back[-1]])
        while front[-1] != back[-1]:
            front.append(self.parent[front[-1]])
            back.append(self.parent[back[-1]])
        return front + back[-2::-1]


@dataclass(frozen=True)
class Grid:
    """Voters arranged in an n1 x n2 grid, one voter per cell, row-major."""

    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("grid dimensions must be positive")

    @property
    def n(self) -> int:
        return self.n1 * self.n2

    def index(self, i: int, j: int) -> int:
        return i * self.n2 + j

    def coords(self, v: int) -> tuple[int, int]:
        return divmod(v, self.n2)


Structure = Union[Line, RootedTree, Grid]


@dataclass(frozen=True)
class Assignment:
    """A representative for every voter; the committee is the set of used values."""

    rep: tuple[int, ...]
    committee: frozenset[int] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        rep = tuple(self.rep)
        used = frozenset(rep)
        if self.committee is not None and frozenset(self.committee) != used:
            raise ValueError("committee must equal the set of assigned representatives")
        object.__setattr__(self, "rep", rep)
        object.__setattr__(self, "committee", used)

    @property
    def k_used(self) -> int:
        return len(self.committee)


def canonicalize(profile: PreferenceProfile, assignment: Assignment) -> Assignment:
    """Reassign every voter to their most-preferred committee member.

    The committee shrinks to the members that remain in use; the cost under
    any consistent rho weakly decreases.  Idempotent.
    """
    committee = assignment.committee
    rep = []
    for ranking in profile.rankings:
        for cand in ranking:
            if cand in committee:
                rep.append(cand)
                break
    return Assignment(tuple(rep))


def cost(profile: PreferenceProfile, assignment: Assignment, objective: Objective) -> Rational:
    """Total (utilitarian) or maximum (egalitarian) misrepresentation of an assignment."""
    values = [profile.rho[v][c] for v, c in enumerate(assignment.rep)]
    if objective is Objective.UTILITARIAN:
        return sum(values)
    return max(values)


def normalize_to_root_order(
    profile: PreferenceProfile, structure: Structure
) -> tuple[PreferenceProfile, tuple[int, ...]]:
    """Relabel candidates so the reference voter's ranking becomes 0, 1, ..., m-1.

    The reference voter is the first voter of a line order, the root of a
    tree, and the top-left cell of a grid.  Returns the relabeled profile
    and the inverse map (new label -> old label) used to translate solver
    output back.  Voter indices are untouched.
    """
    if isinstance(structure, Line):
        ref = structure.order[0]
    elif isinstance(structure, RootedTree):
        ref = structure.root
    else:
        ref = 0
    ref_ranking = profile.rankings[ref]
    m = profile.m
    forward = [0] * m
    for pos, cand in enumerate(ref_ranking):
        forward[cand] = pos
    rankings = tuple(tuple(forward[c] for c in ranking) for ranking in profile.rankings)
    rho = tuple(tuple(row[ref_ranking[c]] for c in range(m)) for row in profile.rho)
    return PreferenceProfile(rankings, rho), ref_ranking


def relabel_assignment(assignment: Assignment, new_to_old: Sequence[int]) -> Assignment:
    """Translate an assignment expressed in relabeled candidates back to the originals."""
    return Assignment(tuple(new_to_old[c] for c in assignment.rep))


@dataclass(frozen=True)
class SolveResult:
    """A solver's answer: the assignment plus both cost readings and run metadata."""

    assignment: Assignment
    total_cost: Rational
    egal_cost: Rational
    k_used: int
    algorithm: str
    stats: dict

    @classmethod
    def from_assignment(
        cls,
        profile: PreferenceProfile,
        assignment: Assignment,
        algorithm: str,
        stats: Optional[dict] = None,
    ) -> "SolveResult":
        return cls(
            assignment=assignment,
            total_cost=cost(profile, assignment, Objective.UTILITARIAN),
            egal_cost=cost(profile, assignment, Objective.EGALITARIAN),
            k_used=assignment.k_used,
            algorithm=algorithm,
            stats=dict(stats or {}),
        )
