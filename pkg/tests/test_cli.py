"""Tests for the command line front-end and its file formats."""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from ccwinner.cli import (
    decode_value,
    encode_value,
    instance_to_doc,
    load_instance,
    main,
)
from ccwinner.core import Assignment, Objective, cost
from ccwinner.errors import ParseError
from ccwinner.generators import gen_sc_grid, gen_sc_line, gen_sc_tree, gen_star_instance

THREE = {
    "schema_version": 1,
    "structure": {"type": "line", "order": [1, 2, 3]},
    "m": 3,
    "rankings": [[1, 2, 3], [2, 1, 3], [2, 3, 1]],
}


def write(tmp_path, doc, name="instance.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


# ---------------------------------------------------------------------------
# value codec


def test_value_codec():
    assert encode_value(7) == 7
    assert encode_value(Fraction(1, 3)) == "1/3"
    assert decode_value(7, "x") == 7
    assert decode_value("1/3", "x") == Fraction(1, 3)
    assert decode_value("6/2", "x") == 3 and isinstance(decode_value("6/2", "x"), int)
    for bad in (1.5, True, "seven", None):
        with pytest.raises(ParseError):
            decode_value(bad, "x")


# ---------------------------------------------------------------------------
# file round-trips


@pytest.mark.parametrize(
    "make",
    [
        lambda: gen_sc_line(5, 9, 4),
        lambda: gen_sc_tree(6, 9, 4),
        lambda: gen_sc_grid(7, 3, 4, 4),
        lambda: gen_star_instance(5),
    ],
)
def test_instance_round_trip(tmp_path, make):
    profile, structure = make()
    path = write(tmp_path, instance_to_doc(profile, structure, k=2))
    profile2, structure2, k = load_instance(path)
    assert profile2 == profile
    assert structure2 == structure
    assert k == 2
    assert instance_to_doc(profile2, structure2, k=k) == instance_to_doc(
        profile, structure, k=2
    )


def test_fractional_rho_round_trip(tmp_path):
    doc = dict(THREE)
    doc["rho"] = [[0, "1/2", 1], [1, 0, "3/2"], ["4/2", 0, "1/2"]]
    profile, _, _ = load_instance(write(tmp_path, doc))
    assert profile.rho[0] == (0, Fraction(1, 2), 1)
    assert profile.rho[2] == (2, 0, Fraction(1, 2))


def test_float_rho_rejected(tmp_path):
    doc = dict(THREE)
    doc["rho"] = [[0, 0.5, 1], [1, 0, 2], [2, 0, 1]]
    with pytest.raises(ParseError, match="floats"):
        load_instance(write(tmp_path, doc))


def test_parse_diagnostics_name_the_field(tmp_path):
    doc = dict(THREE)
    doc["rankings"] = [[1, 2, 3], [2, 1], [2, 3, 1]]
    with pytest.raises(ParseError, match=r"rankings\[1\]"):
        load_instance(write(tmp_path, doc))
    with pytest.raises(ParseError, match="missing field"):
        load_instance(write(tmp_path, {"m": 2, "rankings": [[1, 2]]}))


# ---------------------------------------------------------------------------
# validate


def test_validate_ok(tmp_path, capsys):
    assert main(["validate", write(tmp_path, THREE)]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_validate_reports_double_crossing(tmp_path, capsys):
    doc = {
        "schema_version": 1,
        "structure": {"type": "line", "order": [1, 2, 3]},
        "m": 2,
        "rankings": [[1, 2], [2, 1], [1, 2]],
    }
    assert main(["validate", write(tmp_path, doc)]) == 1
    out = capsys.readouterr().out
    assert "not single-crossing" in out and "(1, 2)" in out


def test_validate_star_instance(tmp_path):
    profile, tree = gen_star_instance(5)
    assert main(["validate", write(tmp_path, instance_to_doc(profile, tree))]) == 0


# ---------------------------------------------------------------------------
# solve


def test_solve_three_voter_line(tmp_path, capsys):
    path = write(tmp_path, THREE)
    assert main(["solve", path, "--k", "1", "--algorithm", "line-dp"]) == 0
    out = capsys.readouterr().out
    assert "total_cost=1" in out and "committee=[2]" in out
    assert main(["solve", path, "--k", "1", "--algorithm", "oracle"]) == 0
    assert "total_cost=1" in capsys.readouterr().out


def test_solve_result_file_is_recheckable(tmp_path):
    profile, line = gen_sc_line(11, 12, 5)
    path = write(tmp_path, instance_to_doc(profile, line))
    out = str(tmp_path / "result.json")
    assert main(["solve", path, "--k", "3", "--out", out]) == 0
    doc = json.loads((tmp_path / "result.json").read_text())
    assert doc["schema_version"] == 1
    assert doc["k_used"] == len(set(doc["assignment"])) <= 3
    rep = Assignment(tuple(c - 1 for c in doc["assignment"]))
    assert cost(profile, rep, Objective.UTILITARIAN) == doc["total_cost"]
    assert cost(profile, rep, Objective.EGALITARIAN) == doc["egal_cost"]
    assert sorted(set(doc["assignment"])) == doc["committee"]


def test_solve_k_from_file(tmp_path, capsys):
    doc = dict(THREE)
    doc["k"] = 2
    assert main(["solve", write(tmp_path, doc)]) == 0
    assert "total_cost=0" in capsys.readouterr().out
    assert main(["solve", write(tmp_path, THREE)]) == 2  # no k anywhere


def test_solve_grid_singletons(tmp_path, capsys):
    profile, grid = gen_sc_grid(13, 2, 2, 4)
    path = write(tmp_path, instance_to_doc(profile, grid))
    assert main(["solve", path, "--k", "4", "--algorithm", "grid-laminar"]) == 0
    assert "total_cost=0" in capsys.readouterr().out


def test_solve_grid_result_embeds_the_tiling(tmp_path):
    profile, grid = gen_sc_grid(14, 3, 3, 5)
    path = write(tmp_path, instance_to_doc(profile, grid))
    out = str(tmp_path / "result.json")
    assert main(["solve", path, "--k", "3", "--out", out]) == 0
    doc = json.loads((tmp_path / "result.json").read_text())
    assert doc["algorithm"] == "grid-laminar"
    rects = doc["stats"]["tiling"]
    assert sum((r[1] - r[0] + 1) * (r[3] - r[2] + 1) for r in rects) == 9
    assert all(1 <= b <= 3 for r in rects for b in r)  # 1-based bounds


def test_egalitarian_klink_hands_over_to_threshold(tmp_path, capsys):
    profile, line = gen_sc_line(15, 10, 4)
    path = write(tmp_path, instance_to_doc(profile, line))
    code = main(
        ["solve", path, "--k", "2", "--algorithm", "line-klink", "--objective", "egalitarian"]
    )
    assert code == 0
    assert "line-egal-threshold" in capsys.readouterr().out


def test_klink_refuses_fractional_rho_with_hint(tmp_path, capsys):
    doc = dict(THREE)
    doc["rho"] = [[0, "1/2", 1], [1, 0, 2], [2, 0, 1]]
    code = main(["solve", write(tmp_path, doc), "--k", "1", "--algorithm", "line-klink"])
    assert code == 1
    assert "line-dp" in capsys.readouterr().err


def test_solve_usage_errors(tmp_path):
    path = write(tmp_path, THREE)
    assert main(["solve", path, "--k", "0"]) == 2  # InvalidK
    assert main(["solve", path, "--k", "1", "--algorithm", "tree-dp"]) == 2  # mismatch
    assert main(["solve", path, "--k", "1", "--algorithm", "bogus"]) == 2  # argparse
    profile, grid = gen_sc_grid(16, 2, 2, 3)
    gpath = write(tmp_path, instance_to_doc(profile, grid), "grid.json")
    assert main(["solve", gpath, "--k", "2", "--objective", "egalitarian"]) == 2


def test_solve_refuses_non_single_crossing(tmp_path, capsys):
    doc = {
        "schema_version": 1,
        "structure": {"type": "line", "order": [1, 2, 3]},
        "m": 2,
        "rankings": [[1, 2], [2, 1], [1, 2]],
    }
    assert main(["solve", write(tmp_path, doc), "--k", "1"]) == 1
    assert "single-crossing" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# generate


def test_generate_is_deterministic(tmp_path):
    a = str(tmp_path / "a.json")
    b = str(tmp_path / "b.json")
    argv = ["generate", "--structure", "tree", "--seed", "9", "--n", "12", "--m", "4"]
    assert main(argv + ["--out", a]) == 0
    assert main(argv + ["--out", b]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_generated_files_validate(tmp_path):
    for structure, extra in [
        ("line", ["--n", "7", "--m", "3"]),
        ("tree", ["--n", "7", "--m", "3"]),
        ("grid", ["--n1", "2", "--n2", "3", "--m", "3"]),
        ("star", ["--n", "5"]),
    ]:
        out = str(tmp_path / f"{structure}.json")
        assert main(["generate", "--structure", structure, "--seed", "2", *extra, "--out", out]) == 0
        assert main(["validate", out]) == 0


def test_generate_star_matches_the_fixed_family(tmp_path):
    out = str(tmp_path / "star.json")
    assert main(["generate", "--structure", "star", "--n", "5", "--out", out]) == 0
    doc = json.loads((tmp_path / "star.json").read_text())
    assert doc["rankings"][0] == [1, 2, 3, 4, 5]
    assert doc["rankings"][3] == [4, 1, 2, 3, 5]
    assert doc["structure"]["parent"] == [None, 1, 1, 1, 1]


# ---------------------------------------------------------------------------
# check


def test_check_monge_single_instance(tmp_path, capsys):
    profile, line = gen_sc_line(21, 9, 4)
    path = write(tmp_path, instance_to_doc(profile, line))
    assert main(["check", "--mode", "monge", path]) == 0
    assert capsys.readouterr().out.strip() == "ok"
    assert main(["check", "--mode", "monge", "--instances", "40"]) == 0


def test_check_monge_needs_a_line(tmp_path):
    profile, tree = gen_sc_tree(3, 5, 3)
    assert main(["check", "--mode", "monge", write(tmp_path, instance_to_doc(profile, tree))]) == 2


def test_check_conjecture_sweep_writes_sorted_csv(tmp_path, capsys):
    out = str(tmp_path / "sweep.csv")
    argv = [
        "check", "--mode", "conjecture", "--instances", "8",
        "--n1-max", "3", "--n2-max", "3", "--k-max", "4",
        "--seed", "5", "--out", out, "--jobs", "2",
    ]
    assert main(argv) == 0
    rows = (tmp_path / "sweep.csv").read_text().strip().splitlines()
    assert rows[0] == "seed,n1,n2,k,m,holds,gap"
    seeds = [int(r.split(",")[0]) for r in rows[1:]]
    assert seeds == sorted(seeds) and len(seeds) == 8
    assert all(r.split(",")[5] == "True" for r in rows[1:])


def test_budget_exceeded_exit_code(tmp_path, monkeypatch):
    monkeypatch.setenv("CC_BUDGET", "1")
    argv = [
        "check", "--mode", "conjecture", "--instances", "8",
        "--n1-max", "3", "--n2-max", "3", "--k-max", "4", "--seed", "1",
    ]
    assert main(argv) == 3


# ---------------------------------------------------------------------------
# bench


def test_bench_report(tmp_path, capsys):
    out = str(tmp_path / "bench.json")
    argv = ["bench", "--suite", "tree", "--points", "2", "--base-n", "60", "--out", out]
    assert main(argv) == 0
    doc = json.loads((tmp_path / "bench.json").read_text())
    assert set(doc["sweeps"]) == {"n", "m", "k"}
    for sweep in doc["sweeps"].values():
        assert len(sweep["points"]) == 2
        assert "slope_states" in sweep and "slope_time" in sweep


# ---------------------------------------------------------------------------
# the installed entry point


def test_subprocess_entry(tmp_path):
    profile, line = gen_sc_line(31, 6, 3)
    path = write(tmp_path, instance_to_doc(profile, line))
    proc = subprocess.run(
        [sys.executable, "-m", "ccwinner.cli", "solve", path, "--k", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "total_cost=" in proc.stdout
