"""Command line front-end: validate, solve, generate, check, bench.

Instances and results travel as single JSON documents.  Voters and
candidates are 1-based in files and terminal output (0-based everywhere in
the library); misrepresentation values are integers or exact "p/q" strings,
never floats.  Exit codes: 0 success, 1 validation or feasibility failure,
2 usage error, 3 work budget exceeded.  The CC_BUDGET environment variable
caps enumeration sizes for the oracle and the conjecture checker.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .core import (
    Grid,
    Line,
    Objective,
    PreferenceProfile,
    RootedTree,
    borda_misrepresentation,
)
from .errors import (
    AlgorithmStructureMismatch,
    BudgetExceeded,
    CCWinnerError,
    NonIntegerRho,
    ParseError,
)
from .generators import gen_sc_grid, gen_sc_line, gen_sc_tree, gen_star_instance
from .grid_solver import (
    build_grid_prefix,
    check_laminar_conjecture,
    rect_cost,
    solve_grid_bicriterial,
    solve_grid_laminar,
)
from .line_solver import (
    build_prefix_sums,
    check_concave_monge,
    solve_line_dp,
    solve_line_egal_threshold,
    solve_line_klink,
)
from .oracle import brute_force
from .tree_solver import solve_tree_dp
from .validation import check_consistency, check_structure

SCHEMA_VERSION = 1
ALGORITHMS = (
    "auto",
    "line-dp",
    "line-klink",
    "tree-dp",
    "grid-laminar",
    "grid-bicriterial",
    "oracle",
)


# ---------------------------------------------------------------------------
# exact values in JSON


def encode_value(x):
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    raise TypeError(f"cannot encode {type(x).__name__} exactly")


def decode_value(x, where: str):
    if isinstance(x, bool):
        raise ParseError(f"{where}: booleans are not misrepresentation values")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        raise ParseError(f"{where}: floats are inexact; use an integer or a 'p/q' string")
    if isinstance(x, str):
        try:
            value = Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: not a rational: {x!r} ({exc})") from None
        return int(value) if value.denominator == 1 else value
    raise ParseError(f"{where}: expected a number, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# instance files


def _field(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise ParseError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ParseError(f"{where}.{key}: expected an integer")
    if kind is list and not isinstance(value, list):
        raise ParseError(f"{where}.{key}: expected a list")
    if kind is dict and not isinstance(value, dict):
        raise ParseError(f"{where}.{key}: expected an object")
    return value


def _index(value, n: int, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or not (1 <= value <= n):
        raise ParseError(f"{where}: expected an integer in 1..{n}, got {value!r}")
    return value - 1


def _parse_structure(doc: dict, n: int):
    kind = _field(doc, "type", str, "structure")
    if kind == "line":
        order = _field(doc, "order", list, "structure")
        if len(order) != n:
            raise ParseError(f"structure.order: expected {n} voters, got {len(order)}")
        try:
            return Line(tuple(_index(v, n, f"structure.order[{t}]") for t, v in enumerate(order)))
        except ValueError as exc:
            raise ParseError(f"structure.order: {exc}") from None
    if kind == "tree":
        parent_raw = _field(doc, "parent", list, "structure")
        if len(parent_raw) != n:
            raise ParseError(f"structure.parent: expected {n} entries, got {len(parent_raw)}")
        parent = tuple(
            None if p is None else _index(p, n, f"structure.parent[{v}]")
            for v, p in enumerate(parent_raw)
        )
        root = _index(_field(doc, "root", int, "structure"), n, "structure.root")
        try:
            if "child_order" in doc:
                child_order = tuple(
                    tuple(_index(u, n, f"structure.child_order[{v}]") for u in row)
                    for v, row in enumerate(_field(doc, "child_order", list, "structure"))
                )
                return RootedTree(parent, root, child_order)
            return RootedTree.from_parent(parent, root)
        except (ValueError, CCWinnerError) as exc:
            raise ParseError(f"structure: {exc}") from None
    if kind == "grid":
        n1 = _field(doc, "n1", int, "structure")
        n2 = _field(doc, "n2", int, "structure")
        if n1 < 1 or n2 < 1 or n1 * n2 != n:
            raise ParseError(f"structure: {n1}x{n2} grid does not hold {n} voters")
        return Grid(n1, n2)
    raise ParseError(f"structure.type: unknown structure {kind!r}")


def load_instance(path: str):
    """Parse an instance file into (profile, structure, default k or None)."""
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    m = _field(doc, "m", int, "instance")
    if m < 1:
        raise ParseError("instance.m: need at least one candidate")
    rankings_raw = _field(doc, "rankings", list, "instance")
    rankings = []
    for v, row in enumerate(rankings_raw):
        if not isinstance(row, list) or len(row) != m:
            raise ParseError(f"rankings[{v}]: expected a list of {m} candidates")
        rankings.append(tuple(_index(c, m, f"rankings[{v}]") for c in row))
    rho = None
    if doc.get("rho") is not None:
        rho_raw = _field(doc, "rho", list, "instance")
        if len(rho_raw) != len(rankings):
            raise ParseError("rho: one row per voter required")
        rho = []
        for v, row in enumerate(rho_raw):
            if not isinstance(row, list) or len(row) != m:
                raise ParseError(f"rho[{v}]: expected a list of {m} values")
            rho.append(tuple(decode_value(x, f"rho[{v}][{c}]") for c, x in enumerate(row)))
    try:
        profile = PreferenceProfile.from_rankings(tuple(rankings), rho)
    except ValueError as exc:
        raise ParseError(f"rankings: {exc}") from None
    structure = _parse_structure(_field(doc, "structure", dict, "instance"), profile.n)
    k = doc.get("k")
    if k is not None and (isinstance(k, bool) or not isinstance(k, int) or k < 1):
        raise ParseError(f"instance.k: expected a positive integer, got {k!r}")
    return profile, structure, k


def instance_to_doc(profile: PreferenceProfile, structure, k=None) -> dict:
    if isinstance(structure, Line):
        struct = {"type": "line", "order": [v + 1 for v in structure.order]}
    elif isinstance(structure, RootedTree):
        struct = {
            "type": "tree",
            "parent": [None if p is None else p + 1 for p in structure.parent],
            "root": structure.root + 1,
            "child_order": [[u + 1 for u in row] for row in structure.child_order],
        }
    elif isinstance(structure, Grid):
        struct = {"type": "grid", "n1": structure.n1, "n2": structure.n2}
    else:
        raise TypeError(f"unsupported structure {type(structure).__name__}")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "structure": struct,
        "m": profile.m,
        "rankings": [[c + 1 for c in ranking] for ranking in profile.rankings],
    }
    if profile.rho != borda_misrepresentation(profile.rankings):
        doc["rho"] = [[encode_value(x) for x in row] for row in profile.rho]
    if k is not None:
        doc["k"] = k
    return doc


def _write_json(doc: dict, path: str):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")


def result_to_doc(result, k: int, objective: Objective) -> dict:
    stats = {}
    for key, value in result.stats.items():
        if key == "tiling":
            value = [[r[0] + 1, r[1] + 1, r[2] + 1, r[3] + 1] for r in value]
        elif key == "reps":
            value = [c + 1 for c in value]
        elif isinstance(value, tuple):
            value = list(value)
        stats[key] = value
    return {
        "schema_version": SCHEMA_VERSION,
        "algorithm": result.algorithm,
        "objective": objective.value,
        "k": k,
        "k_used": len(result.assignment.committee),
        "committee": sorted(c + 1 for c in result.assignment.committee),
        "assignment": [c + 1 for c in result.assignment.rep],
        "total_cost": encode_value(result.total_cost),
        "egal_cost": encode_value(result.egal_cost),
        "stats": stats,
    }


# ---------------------------------------------------------------------------
# commands


def _env_budget():
    raw = os.environ.get("CC_BUDGET")
    if raw is None:
        return None
    try:
        budget = int(raw)
    except ValueError:
        raise ParseError(f"CC_BUDGET: expected an integer, got {raw!r}") from None
    if budget < 1:
        raise ParseError(f"CC_BUDGET: expected a positive integer, got {budget}")
    return budget


def cmd_validate(args) -> int:
    profile, structure, _ = load_instance(args.path)
    bad = check_consistency(profile)
    if bad is not None:
        print(
            f"inconsistent rho: voter {bad.voter + 1} ranks candidate {bad.better + 1} "
            f"above {bad.worse + 1} but scores it strictly higher"
        )
        return 1
    witness = check_structure(profile, structure)
    if witness is not None:
        print(
            f"not single-crossing: candidates ({witness.c + 1}, {witness.c_other + 1}) "
            f"cross twice around voters ({witness.v1 + 1}, {witness.v2 + 1}, {witness.v3 + 1})"
        )
        return 1
    print("ok")
    return 0


def _dispatch(profile, structure, algorithm: str, objective: Objective, k: int):
    if algorithm == "auto":
        if isinstance(structure, Line):
            algorithm = "line-dp"
        elif isinstance(structure, RootedTree):
            algorithm = "tree-dp"
        else:
            algorithm = "grid-laminar"

    def need(cls, name):
        if not isinstance(structure, cls):
            raise AlgorithmStructureMismatch(
                f"{algorithm} needs a {name} instance, got {type(structure).__name__.lower()}"
            )

    if algorithm == "line-dp":
        need(Line, "line")
        return solve_line_dp(profile, structure, k, objective), None
    if algorithm == "line-klink":
        need(Line, "line")
        if objective is Objective.EGALITARIAN:
            # no egalitarian k-link route exists; threshold search is the
            # egalitarian line algorithm, so hand over rather than refuse
            return solve_line_egal_threshold(profile, structure, k), None
        return solve_line_klink(profile, structure, k), None
    if algorithm == "tree-dp":
        need(RootedTree, "tree")
        return solve_tree_dp(profile, structure, k, objective), None
    if algorithm in ("grid-laminar", "grid-bicriterial"):
        need(Grid, "grid")
        if objective is Objective.EGALITARIAN:
            raise AlgorithmStructureMismatch(
                "egalitarian grid solving is not offered; use --objective utilitarian"
            )
        if algorithm == "grid-laminar":
            return solve_grid_laminar(profile, structure, k)
        return solve_grid_bicriterial(profile, structure, k), None
    result = brute_force(profile, k, objective, budget=_env_budget() or 10**7)
    return result, None


def cmd_solve(args) -> int:
    profile, structure, file_k = load_instance(args.path)
    k = args.k if args.k is not None else file_k
    if k is None:
        print("solve: no committee bound; pass --k or store \"k\" in the instance", file=sys.stderr)
        return 2
    objective = Objective(args.objective)
    bad = check_consistency(profile)
    if bad is not None:
        print(f"inconsistent rho at voter {bad.voter + 1}; fix the instance first", file=sys.stderr)
        return 1
    if args.algorithm != "oracle":
        witness = check_structure(profile, structure)
        if witness is not None:
            print(
                f"not single-crossing: candidates ({witness.c + 1}, {witness.c_other + 1}) "
                f"cross twice; structured solvers would be unsound",
                file=sys.stderr,
            )
            return 1
    try:
        result, tiling = _dispatch(profile, structure, args.algorithm, objective, k)
    except NonIntegerRho as exc:
        print(f"solve: {exc}; rerun with --algorithm line-dp", file=sys.stderr)
        return 1
    if tiling is not None:
        result.stats["tiling"] = tuple((r.i0, r.i1, r.j0, r.j1) for r in tiling.rects)
        result.stats["reps"] = tiling.reps
    doc = result_to_doc(result, k, objective)
    committee = ",".join(str(c) for c in doc["committee"])
    print(
        f"{doc['algorithm']}: total_cost={doc['total_cost']} egal_cost={doc['egal_cost']} "
        f"committee=[{committee}] k_used={doc['k_used']}"
    )
    if args.out:
        _write_json(doc, args.out)
    return 0


def cmd_generate(args) -> int:
    if args.structure == "line":
        profile, structure = gen_sc_line(args.seed, args.n, args.m, max_swaps=args.max_swaps)
    elif args.structure == "tree":
        profile, structure = gen_sc_tree(
            args.seed, args.n, args.m, max_edge_swaps=args.max_edge_swaps
        )
    elif args.structure == "star":
        profile, structure = gen_star_instance(args.n)
    else:
        profile, structure = gen_sc_grid(
            args.seed, args.n1, args.n2, args.m, mode=args.mode, edits=args.edits
        )
    _write_json(instance_to_doc(profile, structure, k=args.k), args.out)
    print(f"wrote {args.structure} instance with n={profile.n} m={profile.m} to {args.out}")
    return 0


def cmd_check(args) -> int:
    if args.mode == "monge":
        return _check_monge(args)
    return _check_conjecture(args)


def _check_monge(args) -> int:
    if args.path is not None:
        profile, structure, _ = load_instance(args.path)
        if not isinstance(structure, Line):
            print("check --mode monge: needs a line instance", file=sys.stderr)
            return 2
        violation = check_concave_monge(build_prefix_sums(profile, structure))
        if violation is not None:
            print(f"monge violation at segment pair (i={violation[0] + 1}, j={violation[1] + 1})")
            return 1
        print("ok")
        return 0
    rng = random.Random(args.seed)
    violations = 0
    for trial in range(args.instances):
        n = rng.randint(3, args.n_max)
        m = rng.randint(2, args.m_max)
        profile, line = gen_sc_line(args.seed + trial, n, m)
        if check_concave_monge(build_prefix_sums(profile, line)) is not None:
            violations += 1
    print(f"monge sweep: {args.instances} instances, {violations} violations")
    return 0 if violations == 0 else 1


def _conjecture_worker(task):
    seed, n1, n2, k, m, budget = task
    profile, grid = gen_sc_grid(seed, n1, n2, m)
    laminar = solve_grid_laminar(profile, grid, k)[0].total_cost
    counterexample = check_laminar_conjecture(profile, grid, k, budget=budget)
    if counterexample is None:
        return seed, n1, n2, k, m, True, 0, None
    prefix = build_grid_prefix(profile, grid)
    best = sum(rect_cost(prefix, r)[0] for r in counterexample.rects)
    witness = {
        "rects": [[r.i0 + 1, r.i1 + 1, r.j0 + 1, r.j1 + 1] for r in counterexample.rects],
        "reps": [c + 1 for c in counterexample.reps],
    }
    return seed, n1, n2, k, m, False, laminar - best, witness


def _check_conjecture(args) -> int:
    budget = _env_budget()
    rng = random.Random(args.seed)
    tasks = []
    for trial in range(args.instances):
        tasks.append(
            (
                args.seed + trial,
                rng.randint(1, args.n1_max),
                rng.randint(1, args.n2_max),
                rng.randint(1, args.k_max),
                rng.randint(2, args.m_max),
                budget,
            )
        )
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_conjecture_worker, tasks))
    else:
        rows = [_conjecture_worker(t) for t in tasks]
    rows.sort()  # worker order must not leak into the report
    counterexamples = [row for row in rows if not row[5]]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["seed", "n1", "n2", "k", "m", "holds", "gap"])
            for seed, n1, n2, k, m, holds, gap, _ in rows:
                writer.writerow([seed, n1, n2, k, m, holds, gap])
        for seed, n1, n2, k, m, _, _, witness in counterexamples:
            _write_json(
                {"seed": seed, "n1": n1, "n2": n2, "k": k, "m": m, "tiling": witness},
                f"{args.out}.counterexample.{seed}.json",
            )
    print(
        f"conjecture sweep: {len(rows)} instances, {len(counterexamples)} counterexamples"
    )
    return 0 if not counterexamples else 1


def _fit_slope(xs, ys) -> float:
    return float(np.polyfit(np.log2(np.array(xs, float)), np.log2(np.array(ys, float)), 1)[0])


def _bench_line(base_n, base_m, base_k, points, seed):
    def run(n, m, k):
        profile, line = gen_sc_line(seed, n, m)
        t0 = time.perf_counter()
        result = solve_line_dp(profile, line, k)
        return time.perf_counter() - t0, result.stats["states"]

    return {
        "n": [(base_n * 2**i, *run(base_n * 2**i, base_m, base_k)) for i in range(points)],
        "m": [(base_m * 2**i, *run(base_n, base_m * 2**i, base_k)) for i in range(points)],
        "k": [(base_k * 2**i, *run(base_n, base_m, base_k * 2**i)) for i in range(points)],
    }


def _bench_tree(base_n, base_m, base_k, points, seed):
    def run(n, m, k):
        profile, tree = gen_sc_tree(seed, n, m)
        t0 = time.perf_counter()
        result = solve_tree_dp(profile, tree, k)
        return time.perf_counter() - t0, result.stats["states"]

    return {
        "n": [(base_n * 2**i, *run(base_n * 2**i, base_m, base_k)) for i in range(points)],
        "m": [(base_m * 2**i, *run(base_n, base_m * 2**i, base_k)) for i in range(points)],
        "k": [(base_k * 2**i, *run(base_n, base_m, base_k * 2**i)) for i in range(points)],
    }


def _bench_grid(base_n, base_m, base_k, points, seed):
    # base_n doubles the column count; three rows keep the DP table affordable
    def run(n2, m, k):
        profile, grid = gen_sc_grid(seed, 3, n2, m)
        t0 = time.perf_counter()
        result, _ = solve_grid_laminar(profile, grid, k)
        return time.perf_counter() - t0, result.stats["dp_cells"]

    return {
        "n": [(base_n * 2**i, *run(base_n * 2**i, base_m, base_k)) for i in range(points)],
        "m": [(base_m * 2**i, *run(base_n, base_m * 2**i, base_k)) for i in range(points)],
        "k": [(base_k * 2**i, *run(base_n, base_m, base_k * 2**i)) for i in range(points)],
    }


_BENCH_DEFAULTS = {
    "line": (2000, 6, 3, _bench_line),
    "tree": (400, 6, 3, _bench_tree),
    "grid": (4, 4, 2, _bench_grid),
}


def cmd_bench(args) -> int:
    default_n, default_m, default_k, runner = _BENCH_DEFAULTS[args.suite]
    base_n = args.base_n or default_n
    base_m = args.base_m or default_m
    base_k = args.base_k or default_k
    sweeps = runner(base_n, base_m, base_k, args.points, args.seed)
    report = {"schema_version": SCHEMA_VERSION, "suite": args.suite, "sweeps": {}}
    for param, rows in sweeps.items():
        values = [r[0] for r in rows]
        times = [r[1] for r in rows]
        counters = [r[2] for r in rows]
        slope_states = _fit_slope(values, counters)
        slope_time = _fit_slope(values, times)
        report["sweeps"][param] = {
            "points": [{"value": v, "seconds": t, "states": s} for v, t, s in rows],
            "slope_states": slope_states,
            "slope_time": slope_time,
        }
        print(f"{args.suite} {param}: slope(states)={slope_states:.3f} slope(time)={slope_time:.3f}")
    if args.out:
        _write_json(report, args.out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccwinner",
        description="Chamberlin-Courant committees on single-crossing profiles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file for single-crossing")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("path")
    p.add_argument("--k", type=int, default=None, help="committee bound (overrides the file)")
    p.add_argument(
        "--objective",
        choices=[o.value for o in Objective],
        default=Objective.UTILITARIAN.value,
    )
    p.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    p.add_argument("--out", default=None, help="write the result record here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a seeded single-crossing instance")
    p.add_argument("--structure", choices=("line", "tree", "grid", "star"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=10, help="voters (line, tree, star)")
    p.add_argument("--m", type=int, default=5, help="candidates")
    p.add_argument("--n1", type=int, default=3, help="grid rows")
    p.add_argument("--n2", type=int, default=3, help="grid columns")
    p.add_argument("--max-swaps", type=int, default=None, help="line: cap on crossings")
    p.add_argument("--max-edge-swaps", type=int, default=3, help="tree: swaps per edge")
    p.add_argument("--mode", choices=("axis", "rejection"), default="axis", help="grid recipe")
    p.add_argument("--edits", type=int, default=None, help="grid rejection: band edits")
    p.add_argument("--k", type=int, default=None, help="store a default committee bound")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", help="monge property or the laminar-tiling conjecture")
    p.add_argument("--mode", choices=("monge", "conjecture"), required=True)
    p.add_argument("path", nargs="?", default=None, help="monge: a line instance file")
    p.add_argument("--instances", type=int, default=300, help="sweep size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-max", type=int, default=12, help="monge sweep: voters")
    p.add_argument("--m-max", type=int, default=6, help="sweep: candidates")
    p.add_argument("--n1-max", type=int, default=4, help="conjecture sweep: rows")
    p.add_argument("--n2-max", type=int, default=5, help="conjecture sweep: columns")
    p.add_argument("--k-max", type=int, default=5, help="conjecture sweep: committee bound")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for the sweep")
    p.add_argument("--out", default=None, help="conjecture: CSV report path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="doubling sweeps with log-log slopes")
    p.add_argument("--suite", choices=("line", "tree", "grid"), required=True)
    p.add_argument("--points", type=int, default=4, help="doublings per parameter")
    p.add_argument("--base-n", type=int, default=None)
    p.add_argument("--base-m", type=int, default=None)
    p.add_argument("--base-k", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="JSON report path")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except CCWinnerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
