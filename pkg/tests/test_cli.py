"""Command line interface: subcommands, exit codes, file outputs."""

import json
import os

import pytest

from rainbow_nibble import read_rmf, read_selection, verify_rainbow
from rainbow_nibble.cli import main


def test_gen_stats_verify_roundtrip(tmp_path, capsys):
    inst = str(tmp_path / "latin5.rmf")
    assert main(["--out", inst, "gen", "latin", "--n", "5"]) == 0
    assert main(["stats", inst]) == 0
    out = capsys.readouterr().out
    assert "m 5" in out and "max_degree 5" in out

    sel = str(tmp_path / "sel.txt")
    assert main(["--out", sel, "solve", "exact", inst]) == 0
    assert main(["verify", inst, sel, "--full"]) == 0
    assert "ok" in capsys.readouterr().out


def test_exact_negative_and_count(tmp_path, capsys):
    inst = str(tmp_path / "k4.rmf")
    assert main(["--out", inst, "gen", "two-k4"]) == 0
    assert main(["solve", "exact", inst]) == 1
    assert "none" in capsys.readouterr().out
    assert main(["solve", "exact", inst, "--count"]) == 1
    assert "count 0" in capsys.readouterr().out
    assert main(["solve", "exact", inst, "--max"]) == 0
    assert "max 2" in capsys.readouterr().out


def test_gen_double_star_and_improper_stats(tmp_path, capsys):
    inst = str(tmp_path / "ds.rmf")
    assert main(["--out", inst, "gen", "double-star", "--m", "4"]) == 0
    assert main(["stats", inst]) == 1          # strict validation flags overlap
    assert main(["stats", inst, "--improper"]) == 0


def test_stats_theorem_clauses(tmp_path, capsys):
    inst = str(tmp_path / "latin20.rmf")
    main(["--out", inst, "gen", "latin", "--n", "20"])
    code = main(["stats", inst, "--theorem", "2"])
    out = capsys.readouterr().out
    assert code == 1                           # m = n violates the m bound
    assert "clause m_bound" in out and "FAIL" in out


def test_lift_writes_parts_sidecar(tmp_path):
    inst = str(tmp_path / "latin4.rmf")
    lifted = str(tmp_path / "lift.rmf")
    main(["--out", inst, "gen", "latin", "--n", "4"])
    assert main(["--out", lifted, "lift", inst]) == 0
    fam = read_rmf(lifted)
    assert fam.k == 3
    parts = json.loads(open(lifted + ".parts.json").read())
    assert parts["colour_vertices"] == [8, 9, 10, 11]
    assert parts["min_degree_colour_part"] == 4


def test_solve_nibble_writes_selection_and_trajectory(tmp_path):
    inst = str(tmp_path / "rand.rmf")
    sel = str(tmp_path / "sel.txt")
    traj = str(tmp_path / "traj.csv")
    assert main(["--out", inst, "gen", "random", "--n", "60", "--m", "40"]) == 0
    code = main(["--seed", "1", "--out", sel, "solve", "nibble", inst,
                 "--epsilon", "0.2", "--trajectory", traj])
    assert code == 0
    fam = read_rmf(inst)
    rm = read_selection(sel)
    assert verify_rainbow(fam, rm, require_full=True) == []
    lines = open(traj).read().splitlines()
    assert lines[0].startswith("i,x,min_size")
    assert len(lines) >= 2


def test_schedule_table_csv(capsys):
    assert main(["schedule", "--mode", "theoretical", "--n", "1000"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "i,x,r,g,f,a,b,c"
    assert out[1].startswith("0,0,1,1,")


def test_experiment_cli(tmp_path, capsys):
    spec = {"source": {"generator": "random", "params": {"n": 30, "m": 20, "seed": 4}},
            "grid": {"epsilon": [0.1]}, "trials": 2, "base_seed": 1}
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    out_dir = str(tmp_path / "exp")
    assert main(["--out", out_dir, "experiment", str(spec_path)]) == 0
    assert os.path.exists(os.path.join(out_dir, "cells.csv"))
    assert os.path.exists(os.path.join(out_dir, "trajectories", "cell_0.csv"))


def test_usage_and_io_error_codes(tmp_path, capsys):
    assert main(["stats", str(tmp_path / "missing.rmf")]) == 2
    assert main(["bogus-command"]) == 2
    assert main(["gen", "latin", "--n", "notanint"]) == 2
    bad = tmp_path / "bad.rmf"
    bad.write_text("rmf 1\nk 2\nvertices 4\nm 1\ne 0 1 0\n")
    assert main(["stats", str(bad)]) == 2


def test_gen_find_2reg(tmp_path, capsys):
    inst = str(tmp_path / "reg.rmf")
    code = main(["--seed", "0", "--out", inst, "gen", "find-2reg",
                 "--max-vertices", "12", "--tries", "200"])
    if code == 0:
        fam = read_rmf(inst)
        assert all(s == 3 for s in fam.sizes())
        assert os.path.exists(inst + ".cert.txt")
    else:
        assert code == 1
