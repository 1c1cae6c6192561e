"""Solvers for profiles that are single-crossing on a line.

Three routes to the optimum:

* ``solve_line_dp`` -- the O(nmk) dynamic program over (voter, committee
  budget, candidate) states, for both objectives;
* ``solve_line_klink`` -- the reduction to a k-link shortest path in a DAG
  whose arc weights are cheapest-single-candidate segment sums. The weights
  are concave Monge, so unconstrained penalized optima come from a
  totally-monotone matrix search and the link budget is enforced by a
  Lagrangian search on the penalty;
* ``solve_line_egal_threshold`` -- egalitarian via binary search on the
  bottleneck value, each feasibility probe a 0/1 utilitarian DP.

Everything here works on a normalized copy of the instance (candidates
relabeled so the first voter in line order ranks them 0, 1, 2, ...);
assignments are mapped back before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import (
    Assignment,
    Line,
    Objective,
    PreferenceProfile,
    SolveResult,
    canonicalize,
    normalize_to_root_order,
    relabel_assignment,
)
from .errors import InvalidK, NonIntegerRho

__all__ = [
    "PrefixSums",
    "KLinkInstance",
    "build_prefix_sums",
    "omega",
    "check_concave_monge",
    "smawk_min_links",
    "solve_line_dp",
    "solve_line_klink",
    "solve_line_egal_threshold",
]

_INF = 1 << 62
# int64 engine limits: sums must stay well below the infinity sentinel
_RHO_LIMIT = 1 << 40
_TOTAL_LIMIT = 1 << 55


def _line_order(profile: PreferenceProfile, order) -> tuple[int, ...]:
    line = order if isinstance(order, Line) else Line(tuple(order))
    if line.n != profile.n:
        raise ValueError(f"order covers {line.n} voters, profile has {profile.n}")
    return line.order


# ---------------------------------------------------------------------------
# segment weights


@dataclass(frozen=True)
class PrefixSums:
    """Per-candidate running sums of rho along the line.

    ``table[c][j]`` is the summed misrepresentation of candidate c over the
    first j voters in line order, so a segment sum is one subtraction. The
    table is an int64 array when every value fits comfortably, otherwise a
    tuple of tuples of exact numbers.
    """

    table: Union[np.ndarray, tuple[tuple, ...]]
    n: int
    m: int


def build_prefix_sums(profile: PreferenceProfile, order) -> PrefixSums:
    order = _line_order(profile, order)
    n, m = profile.n, profile.m
    rows = [profile.rho[v] for v in order]
    if profile.has_integer_rho:
        try:
            rho = np.array(rows, dtype=np.int64)
        except OverflowError:
            rho = None
        if rho is not None and n * int(rho.max(initial=0)) < _TOTAL_LIMIT:
            table = np.zeros((m, n + 1), dtype=np.int64)
            np.cumsum(rho.T, axis=1, out=table[:, 1:])
            return PrefixSums(table, n, m)
    cols = []
    for c in range(m):
        acc = [0]
        for row in rows:
            acc.append(acc[-1] + row[c])
        cols.append(tuple(acc))
    return PrefixSums(tuple(cols), n, m)


def omega(prefix: PrefixSums, i: int, j: int):
    """Cheapest single candidate for the voters at positions i..j-1.

    Returns (weight, candidate); ties go to the smallest candidate index.
    """
    if not 0 <= i < j <= prefix.n:
        raise ValueError(f"need 0 <= i < j <= {prefix.n}, got ({i}, {j})")
    table = prefix.table
    if isinstance(table, np.ndarray):
        diff = table[:, j] - table[:, i]
        c = int(diff.argmin())
        return int(diff[c]), c
    best, best_c = None, -1
    for c in range(prefix.m):
        w = table[c][j] - table[c][i]
        if best is None or w < best:
            best, best_c = w, c
    return best, best_c


def check_concave_monge(prefix: PrefixSums) -> Optional[tuple[int, int]]:
    """First (i, j) with w(i,j) + w(i+1,j+1) > w(i,j+1) + w(i+1,j), else None.

    Index pairs range over 0 <= i, i+1 < j <= n-1; the range is empty below
    n = 3. On single-crossing input there is no violation, so a hit
    falsifies either the input's single-crossing claim or the weight table.
    """
    n = prefix.n
    for i in range(n - 2):
        for j in range(i + 2, n):
            lhs = omega(prefix, i, j)[0] + omega(prefix, i + 1, j + 1)[0]
            rhs = omega(prefix, i, j + 1)[0] + omega(prefix, i + 1, j)[0]
            if lhs > rhs:
                return (i, j)
    return None


class KLinkInstance:
    """Weight oracle for the segment DAG on vertices 0..n.

    Arc (i, j) covers the voters at positions i..j-1 and costs the cheapest
    single-candidate sum over them. ``evals`` counts weight lookups.
    """

    def __init__(self, prefix: PrefixSums):
        self.prefix = prefix
        self.n = prefix.n
        self.evals = 0

    def omega(self, i: int, j: int):
        self.evals += 1
        return omega(self.prefix, i, j)[0]

    def cand(self, i: int, j: int) -> int:
        return omega(self.prefix, i, j)[1]


# ---------------------------------------------------------------------------
# totally monotone matrix search
#
# Offline/online concave-minima pair in the Agarwal et al. / Galil-Park
# style. Values are (penalized cost, +-links) tuples: the second component
# is row-constant, which keeps the lexicographic order totally monotone
# whenever the costs alone are (the Monge difference bound settles every
# strict first-component comparison, leaving ties to the row constants).


def _concave_minima(row_indices, col_indices, matrix):
    """Column minima of an implicit totally monotone matrix.

    Ties break toward earlier rows.
    """
    if not col_indices:
        return {}
    stack = []
    for r in row_indices:
        while stack and matrix(stack[-1], col_indices[len(stack) - 1]) > matrix(
            r, col_indices[len(stack) - 1]
        ):
            stack.pop()
        if len(stack) != len(col_indices):
            stack.append(r)
    row_indices = stack

    minima = _concave_minima(row_indices, col_indices[1::2], matrix)

    r = 0
    for ci in range(0, len(col_indices), 2):
        col = col_indices[ci]
        row = row_indices[r]
        if ci == len(col_indices) - 1:
            last = row_indices[-1]
        else:
            last = minima[col_indices[ci + 1]][1]
        pair = (matrix(row, col), row)
        while row != last:
            r += 1
            row = row_indices[r]
            pair = min(pair, (matrix(row, col), row))
        minima[col] = pair
    return minima


class _OnlineConcaveMinima:
    """Online column minima for a concave one-dimensional recurrence.

    value(j) = min over i < j of matrix(i, j), where matrix may read
    previously settled values. matrix must return concavity-respecting
    sentinels for out-of-range columns instead of raising.
    """

    def __init__(self, matrix, initial):
        self._values = [initial]
        self._indices = [None]
        self._finished = 0
        self._matrix = matrix
        self._base = 0
        self._tentative = 0

    def value(self, j):
        while self._finished < j:
            self._advance()
        return self._values[j]

    def index(self, j):
        while self._finished < j:
            self._advance()
        return self._indices[j]

    def _advance(self):
        # Case 1: past the tentative frontier; batch-search the largest
        # square submatrix under the base to build a new frontier.
        i = self._finished + 1
        if i > self._tentative:
            rows = range(self._base, self._finished + 1)
            self._tentative = self._finished + len(rows)
            cols = range(self._finished + 1, self._tentative + 1)
            minima = _concave_minima(rows, cols, self._matrix)
            for col in cols:
                if col >= len(self._values):
                    self._values.append(minima[col][0])
                    self._indices.append(minima[col][1])
                elif minima[col][0] < self._values[col]:
                    self._values[col], self._indices[col] = minima[col]
            self._finished = i
            return

        # Case 2: the diagonal supplies a new column minimum; rows above it
        # can never win again, so the base advances to the diagonal.
        diag = self._matrix(i - 1, i)
        if diag < self._values[i]:
            self._values[i] = diag
            self._indices[i] = self._base = i - 1
            self._tentative = self._finished = i
            return

        # Case 3: row i-1 loses at the tentative column, hence everywhere
        # up to it; just accept the tentative value.
        if self._matrix(i - 1, self._tentative) >= self._values[self._tentative]:
            self._finished = i
            return

        # Case 4: row i-1 wins at the tentative column; earlier rows are
        # dead from here on and the base jumps forward.
        self._base = i - 1
        self._tentative = self._finished = i
        return


def _penalized_chain(klink: KLinkInstance, lam, most_links: bool) -> _OnlineConcaveMinima:
    n = klink.n
    sign = -1 if most_links else 1

    def matrix(i, j):
        if j > n:
            return (-i, -i)  # concave sentinel for out-of-range columns
        cost, links = chain.value(i)
        return (cost + klink.omega(i, j) + lam, links + sign)

    chain = _OnlineConcaveMinima(matrix, (0, 0))
    chain.value(n)
    return chain


def smawk_min_links(klink: KLinkInstance, lam, most_links: bool = False):
    """Minimize weight + lam * links over 0 -> n paths in the segment DAG.

    Returns (penalized cost, links, path). Among penalized optima the path
    with the fewest links is produced; ``most_links`` flips the tie-break.
    """
    sign = -1 if most_links else 1
    chain = _penalized_chain(klink, lam, most_links)
    total, links = chain.value(klink.n)
    path = [klink.n]
    while path[-1]:
        path.append(chain.index(path[-1]))
    path.reverse()
    return total, sign * links, tuple(path)


def _exact_k_path(klink: KLinkInstance, lam, k: int) -> tuple[int, ...]:
    """Synthesize a penalized-optimal path with exactly k links.

    Walks tight arcs backward from n, keeping the remaining-link target
    inside [min links, max links] of each prefix; such a predecessor always
    exists because the optimal link counts at a fixed penalty form a
    contiguous interval.
    """
    n = klink.n
    lo = _penalized_chain(klink, lam, False)
    hi = _penalized_chain(klink, lam, True)
    cost = [lo.value(j)[0] for j in range(n + 1)]
    lmin = [lo.value(j)[1] for j in range(n + 1)]
    lmax = [-hi.value(j)[1] for j in range(n + 1)]

    table = klink.prefix.table
    use_numpy = isinstance(table, np.ndarray)
    if use_numpy:
        try:
            cost_np = np.array(cost, dtype=np.int64)
        except OverflowError:
            use_numpy = False
        else:
            lmin_np = np.array(lmin, dtype=np.int64)
            lmax_np = np.array(lmax, dtype=np.int64)

    path = [n]
    v, t = n, k
    while v > 0:
        u = -1
        if use_numpy:
            w = (table[:, v : v + 1] - table[:, :v]).min(axis=0)
            tight = (cost_np[:v] + w + lam == cost_np[v]) & (lmin_np[:v] <= t - 1)
            tight &= t - 1 <= lmax_np[:v]
            hits = np.flatnonzero(tight)
            u = int(hits[-1])
        else:
            for u in range(v - 1, -1, -1):
                if (
                    cost[u] + omega(klink.prefix, u, v)[0] + lam == cost[v]
                    and lmin[u] <= t - 1 <= lmax[u]
                ):
                    break
        path.append(u)
        v, t = u, t - 1
    path.reverse()
    return tuple(path)


# ---------------------------------------------------------------------------
# the O(nmk) dynamic program
#
# Plane layout at voter i: dyp1[t, c] is the optimal suffix cost when voter
# i is represented by exactly candidate c and the suffix committee uses
# t + 1 candidates, all >= c; dyp0[t, c] relaxes "exactly c" to ">= c"
# (a running suffix minimum over c). Infeasible states hold _INF and the
# recurrences propagate it, so no explicit bound of t against m is needed.


def _dp_base(rho_last: np.ndarray, planes: int):
    m = rho_last.shape[0]
    d1 = np.full((planes, m), _INF, dtype=np.int64)
    d1[0] = rho_last
    d0 = np.minimum.accumulate(d1[:, ::-1], axis=1)[:, ::-1]
    return d1, d0


def _dp_step(rho_i: np.ndarray, next1: np.ndarray, next0: np.ndarray, egal: bool):
    planes, m = next1.shape
    new = np.full((planes, m), _INF, dtype=np.int64)
    new[1:, : m - 1] = next0[:-1, 1:]
    choice = new < next1  # strict: ties keep the current candidate
    inner = np.minimum(next1, new)
    if egal:
        cur1 = np.maximum(rho_i, inner)
    else:
        cur1 = rho_i + inner
        np.minimum(cur1, _INF, out=cur1)  # pin the sentinel in place
    cur0 = np.minimum.accumulate(cur1[:, ::-1], axis=1)[:, ::-1]
    return cur1, cur0, choice


def _bit(packed: np.ndarray, idx: int) -> int:
    return (int(packed[idx >> 3]) >> (7 - (idx & 7))) & 1


def _record_segment(rho, planes, egal, a, b, checkpoints):
    """Re-run the DP for voters b..a, packing choice and take bits per voter.

    take[t, c] says dyp1 attains dyp0 at (t, c); choice[t, c] says opening a
    fresh candidate strictly beats staying on c.
    """
    n, m = rho.shape
    nbytes = (planes * m + 7) // 8
    choice_bits: list = [None] * (b - a + 1)
    take_bits: list = [None] * (b - a + 1)
    if b == n - 1:
        d1, d0 = _dp_base(rho[b], planes)
        choice_bits[b - a] = np.zeros(nbytes, dtype=np.uint8)
    else:
        d1, d0, ch = _dp_step(rho[b], *checkpoints[b + 1], egal)
        choice_bits[b - a] = np.packbits(ch.ravel())
    take_bits[b - a] = np.packbits((d1 == d0).ravel())
    for i in range(b - 1, a - 1, -1):
        d1, d0, ch = _dp_step(rho[i], d1, d0, egal)
        choice_bits[i - a] = np.packbits(ch.ravel())
        take_bits[i - a] = np.packbits((d1 == d0).ravel())
    return choice_bits, take_bits


def _dp_engine_numpy(rho: np.ndarray, planes: int, egal: bool):
    """Two-phase DP: value sweep with plane checkpoints every B voters, then
    per-segment re-sweeps recording packed choice bits for the walk. Memory
    is O(sqrt(n) * planes * m) instead of the full O(n * planes * m).
    """
    n, m = rho.shape
    spacing = max(1, int(8 * math.sqrt(n)))
    checkpoints = {}
    d1, d0 = _dp_base(rho[n - 1], planes)
    if n - 1 > 0 and (n - 1) % spacing == 0:
        checkpoints[n - 1] = (d1.copy(), d0.copy())
    for i in range(n - 2, -1, -1):
        d1, d0, _ = _dp_step(rho[i], d1, d0, egal)
        if i > 0 and i % spacing == 0:
            checkpoints[i] = (d1.copy(), d0.copy())
    first = d0[:, 0]
    t = int(first.argmin())  # smallest committee size among optima
    l_star = t + 1

    rep: list[int] = []
    c = 0
    resolving = True  # current state is a dyp0 state until take says stop
    a = 0
    while a < n:
        b = min(a + spacing - 1, n - 1)
        choice_bits, take_bits = _record_segment(rho, planes, egal, a, b, checkpoints)
        for i in range(a, b + 1):
            if resolving:
                idx = t * m + c
                while not _bit(take_bits[i - a], idx):
                    c += 1
                    idx += 1
            rep.append(c)
            if i < n - 1:
                if _bit(choice_bits[i - a], t * m + c):
                    t -= 1
                    c += 1
                    resolving = True
                else:
                    resolving = False
        a = b + 1
    return rep, l_star


def _dp_engine_python(rows, planes: int, egal: bool):
    """Exact-arithmetic engine: keeps every value plane, desk scale only.

    Mirrors the numpy engine's recurrences and tie-breaks so the two produce
    identical assignments on shared instances.
    """
    n, m = len(rows), len(rows[0])
    inf = math.inf
    all1: list = [None] * n
    all0: list = [None] * n
    d1 = [[inf] * m for _ in range(planes)]
    d1[0] = list(rows[n - 1])
    all1[n - 1] = d1
    all0[n - 1] = _suffix_min_rows(d1)
    for i in range(n - 2, -1, -1):
        next1, next0 = all1[i + 1], all0[i + 1]
        d1 = [[inf] * m for _ in range(planes)]
        r = rows[i]
        for t in range(planes):
            same_row = next1[t]
            new_row = next0[t - 1] if t else None
            cur = d1[t]
            for c in range(m):
                inner = same_row[c]
                if new_row is not None and c + 1 < m and new_row[c + 1] < inner:
                    inner = new_row[c + 1]
                cur[c] = max(r[c], inner) if egal else r[c] + inner
        all1[i] = d1
        all0[i] = _suffix_min_rows(d1)
    first = [all0[0][t][0] for t in range(planes)]
    best = min(first)
    t = first.index(best)
    l_star = t + 1

    rep: list[int] = []
    c = 0
    resolving = True
    for i in range(n):
        if resolving:
            while all1[i][t][c] != all0[i][t][c]:
                c += 1
        rep.append(c)
        if i < n - 1:
            same = all1[i + 1][t][c]
            opened = (
                all0[i + 1][t - 1][c + 1] if t >= 1 and c + 1 < m else inf
            )
            if opened < same:
                t -= 1
                c += 1
                resolving = True
            else:
                resolving = False
    return rep, l_star


def _suffix_min_rows(d1):
    out = []
    for row in d1:
        acc = list(row)
        for c in range(len(acc) - 2, -1, -1):
            if acc[c + 1] < acc[c]:
                acc[c] = acc[c + 1]
        out.append(acc)
    return out


def solve_line_dp(
    profile: PreferenceProfile,
    order,
    k: int,
    objective: Objective = Objective.UTILITARIAN,
) -> SolveResult:
    """Optimal committee of size at most k for a line-single-crossing profile.

    The caller vouches for single-crossing on ``order`` (run the checker in
    tests). The committee bound may exceed m; extra budget is simply never
    spent. Returns the canonical assignment: each voter gets their favorite
    committee member, which on these profiles splits the line into at most k
    contiguous blocks.
    """
    if k < 1:
        raise InvalidK(f"committee bound must be at least 1, got {k}")
    order = _line_order(profile, order)
    norm, inverse = normalize_to_root_order(profile, Line(order))
    n, m = profile.n, profile.m
    planes = min(k, n)
    egal = objective is Objective.EGALITARIAN
    rows = [norm.rho[v] for v in order]

    arr = None
    if norm.has_integer_rho:
        try:
            arr = np.array(rows, dtype=np.int64)
        except OverflowError:
            arr = None
        if arr is not None:
            top = int(arr.max(initial=0))
            if top >= _RHO_LIMIT or n * top >= _TOTAL_LIMIT:
                arr = None
    if arr is not None:
        rep_pos, l_star = _dp_engine_numpy(arr, planes, egal)
        engine = "numpy"
    else:
        rep_pos, l_star = _dp_engine_python(rows, planes, egal)
        engine = "python"

    rep = [0] * n
    for pos, c in enumerate(rep_pos):
        rep[order[pos]] = c
    assignment = relabel_assignment(Assignment(tuple(rep)), inverse)
    assignment = canonicalize(profile, assignment)
    stats = {"engine": engine, "states": 2 * n * planes * m, "l_star": l_star}
    return SolveResult.from_assignment(profile, assignment, "line-dp", stats)


# ---------------------------------------------------------------------------
# Lagrangian k-link route


def solve_line_klink(profile: PreferenceProfile, order, k: int) -> SolveResult:
    """Utilitarian optimum via the k-link path reduction, integer rho only.

    Strategy: if the fewest-link unconstrained optimum already fits the
    budget, done. Otherwise binary-search the smallest integer penalty whose
    fewest-link optimum fits; with integer weights the optimal link counts
    at consecutive penalties tile the integers, so the budget k lies inside
    the optimal interval at that penalty and the optimum is the penalized
    value minus penalty * k, witnessed by an exactly-k tight-arc path.
    """
    if k < 1:
        raise InvalidK(f"committee bound must be at least 1, got {k}")
    if not profile.has_integer_rho:
        raise NonIntegerRho("the k-link route needs integer misrepresentation values")
    order = _line_order(profile, order)
    norm, inverse = normalize_to_root_order(profile, Line(order))
    n = profile.n
    prefix = build_prefix_sums(norm, order)
    klink = KLinkInstance(prefix)

    lam = 0
    _, links, path = smawk_min_links(klink, 0)
    if links > k:
        top = max(max(row) for row in norm.rho)
        lo, hi = 1, n * top + 1  # at the top penalty a single arc wins
        while lo < hi:
            mid = (lo + hi) // 2
            if smawk_min_links(klink, mid)[1] <= k:
                hi = mid
            else:
                lo = mid + 1
        lam = lo
        total, links, path = smawk_min_links(klink, lam)
        if links < k:
            most = smawk_min_links(klink, lam, most_links=True)[1]
            if most < k:
                raise AssertionError(
                    "optimal link interval misses the budget; the weights are "
                    "not concave Monge (input not single-crossing?)"
                )
            path = _exact_k_path(klink, lam, k)

    rep = [0] * n
    for u, v in zip(path, path[1:]):
        c = klink.cand(u, v)
        for pos in range(u, v):
            rep[order[pos]] = c
    assignment = relabel_assignment(Assignment(tuple(rep)), inverse)
    assignment = canonicalize(profile, assignment)
    stats = {"lambda": lam, "links": len(path) - 1, "omega_evals": klink.evals}
    return SolveResult.from_assignment(profile, assignment, "line-klink", stats)


# ---------------------------------------------------------------------------
# egalitarian threshold search


def solve_line_egal_threshold(profile: PreferenceProfile, order, k: int) -> SolveResult:
    """Egalitarian optimum by binary search on the bottleneck value.

    Feasibility of threshold t replaces rho with 0 where rho <= t and 1
    above; rankings are untouched, so the probe instance is exactly as
    single-crossing as the input, and t is achievable iff the utilitarian
    optimum of the probe is 0. The answer is the least feasible t among the
    distinct rho values.
    """
    if k < 1:
        raise InvalidK(f"committee bound must be at least 1, got {k}")
    order = _line_order(profile, order)
    values = sorted({x for row in profile.rho for x in row})
    calls = 0

    def probe(t) -> Optional[SolveResult]:
        nonlocal calls
        calls += 1
        capped = PreferenceProfile(
            profile.rankings,
            tuple(tuple(0 if x <= t else 1 for x in row) for row in profile.rho),
        )
        res = solve_line_dp(capped, order, k)
        return res if res.total_cost == 0 else None

    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if probe(values[mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    witness = probe(values[lo])
    stats = {"threshold": values[lo], "dp_calls": calls}
    return SolveResult.from_assignment(
        profile, witness.assignment, "line-egal-threshold", stats
    )
