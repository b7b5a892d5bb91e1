import subprocess
import sys
from pathlib import Path

import pytest

from conftest import two_branch_table
from womcodes import tablefile


def run_cli(*args, cwd=None):
    cmd = [sys.executable, "-m", "womcodes", *map(str, args)]
    return subprocess.run(cmd, capture_output=True, text=True, cwd=cwd)


def summary(stdout):
    return dict(line.split(" = ", 1) for line in stdout.splitlines() if " = " in line)


@pytest.fixture
def fig_file(tmp_path):
    path = tmp_path / "two_branch.wct"
    tablefile.save(two_branch_table(), path)
    return path


@pytest.fixture
def q8_file(tmp_path):
    path = tmp_path / "q8.wct"
    res = run_cli("construct", "--flash", 2, 8, "--messages", 8, "--out", path)
    assert res.returncode == 0, res.stderr
    return path


def test_construct_q8(q8_file, tmp_path):
    res = run_cli("construct", "--flash", 2, 8, "--messages", 8, "--out", tmp_path / "again.wct")
    out = summary(res.stdout)
    assert out["t_star"] == "4" and out["M"] == "8" and out["solver"] == "optimal"
    assert out["nodes"] == "64"
    assert (tmp_path / "again.wct").read_bytes() == q8_file.read_bytes()


def test_construct_q4_m7(tmp_path):
    res = run_cli("construct", "--flash", 2, 4, "--messages", 7, "--out", tmp_path / "t.wct")
    assert res.returncode == 0
    assert summary(res.stdout)["t_star"] == "1"


def test_construct_single_node(tmp_path):
    dag = tmp_path / "single_node.dag"
    dag.write_text("dag 1 1\n", encoding="utf-8")
    res = run_cli("construct", "--dag", dag, "--messages", 2, "--out", tmp_path / "t.wct")
    assert res.returncode == 0
    out = summary(res.stdout)
    assert out["t_star"] == "0" and out["M"] == "0" and out["meets_request"] == "false"


def test_construct_with_k_only(tmp_path):
    res = run_cli("construct", "--ici", 2, 6, 2, "--k", 5, "--out", tmp_path / "t.wct")
    assert res.returncode == 0
    assert summary(res.stdout)["instance"] == "ici n=2 q=6 d=2"


def test_construct_summary_is_deterministic(tmp_path):
    args = ("construct", "--flash", 2, 6, "--messages", 5, "--seed", 4)
    a = run_cli(*args, "--out", "a.wct", cwd=tmp_path)
    b = run_cli(*args, "--out", "a.wct", cwd=tmp_path)
    assert a.stdout == b.stdout


def test_construct_timeout_status(tmp_path):
    out = tmp_path / "t.wct"
    res = run_cli("construct", "--flash", 3, 8, "--messages", 7, "--budget", 0, "--out", out)
    assert res.returncode == 3
    assert summary(res.stdout)["solver"] == "timeout"
    assert "labeling unproven" in out.read_text(encoding="utf-8")


def test_encode_single(fig_file):
    res = run_cli("encode", "--table", fig_file, "--state", 1, "--message", 2)
    assert res.returncode == 0
    assert res.stdout.strip() == "3"


def test_encode_sequence(fig_file, tmp_path):
    seq = tmp_path / "seq.txt"
    seq.write_text("2\n3\n", encoding="utf-8")
    res = run_cli("encode", "--table", fig_file, "--sequence", seq)
    assert res.stdout.strip() == "3 5"


def test_encode_sequence_failure(fig_file, tmp_path):
    seq = tmp_path / "seq.txt"
    seq.write_text("2\n3\n1\n", encoding="utf-8")
    res = run_cli("encode", "--table", fig_file, "--sequence", seq)
    assert res.returncode == 0
    assert res.stdout.splitlines() == ["3 5 FAIL", "FAIL 3"]


def test_encode_bad_message(fig_file):
    res = run_cli("encode", "--table", fig_file, "--state", 1, "--message", 0)
    assert res.returncode == 2
    assert "message 0" in res.stderr


def test_encode_by_levels(q8_file):
    res = run_cli("encode", "--table", q8_file, "--state", "0,0", "--message", 1)
    assert res.returncode == 0 and res.stdout.strip() == "1"


def test_decode(fig_file):
    res = run_cli("decode", "--table", fig_file, "--state", 5)
    assert res.stdout.strip() == "3"
    res = run_cli("decode", "--table", fig_file, "--state", 9)
    assert res.returncode == 2


def test_verify_flash_bound(q8_file):
    res = run_cli("verify", "--table", q8_file, "--bound", "flash", "--no-time")
    assert res.returncode == 0, res.stdout
    out = summary(res.stdout)
    assert out["meets_bound"] == "true" and out["bound"] == "4"
    assert out["t_star_simulated"] == "4" and out["ok"] == "true"


def test_verify_ici_bound(tmp_path):
    path = tmp_path / "ici.wct"
    run_cli("construct", "--ici", 2, 8, 3, "--messages", 8, "--out", path)
    res = run_cli("verify", "--table", path, "--bound", "ici")
    assert res.returncode == 0
    assert summary(res.stdout)["meets_bound"] == "true"


def test_verify_rejects_corrupted_file(q8_file):
    text = q8_file.read_text(encoding="utf-8").replace("node 2 0,1 2 2", "node 2 0,1 3 3")
    q8_file.write_text(text, encoding="utf-8")
    res = run_cli("verify", "--table", q8_file)
    assert res.returncode == 2
    assert "error:" in res.stderr


def test_verify_reports_failed_invariant(tmp_path):
    # formula and simulation part ways when fewer labels than region slots fit
    path = tmp_path / "t.wct"
    run_cli("construct", "--flash", 3, 4, "--messages", 3, "--out", path)
    res = run_cli("verify", "--table", path)
    assert res.returncode == 1
    out = summary(res.stdout)
    assert out["t_star_formula"] == "7" and out["t_star_simulated"] == "8"


def test_missing_input_file(tmp_path):
    res = run_cli("verify", "--table", tmp_path / "nope.wct")
    assert res.returncode == 2


def test_bad_dag_file(tmp_path):
    dag = tmp_path / "bad.dag"
    dag.write_text("dag 2 1\nedge 1 2\nedge 2 1\n", encoding="utf-8")
    res = run_cli("construct", "--dag", dag, "--messages", 2, "--out", tmp_path / "t.wct")
    assert res.returncode == 2 and "cycle" in res.stderr


def test_tables_one(tmp_path):
    res = run_cli("tables", "--which", 1, "--save", tmp_path / "out")
    assert res.returncode == 0, res.stdout
    lines = res.stdout.splitlines()
    row = lines[lines.index("constructed t*") + 2]
    assert row.split() == ["M=4", "3", "4", "5", "6", "7"]
    assert "match = 25" in res.stdout
    assert len(list((tmp_path / "out").glob("*.wct"))) == 25


def test_tables_three_cell(tmp_path):
    res = run_cli("tables", "--which", 3, "--max-q", 7, "--jobs", 2)
    lines = res.stdout.splitlines()
    row = lines[lines.index("constructed t*") + 5]
    assert row.split()[0] == "M=7" and row.split()[4] == "8"


def test_tables_ici_n4_d3_cell():
    res = run_cli("tables", "--which", "ici-n4")
    lines = res.stdout.splitlines()
    row = lines[lines.index("constructed t*") + 2].split()
    # published 17 for (M=5, q=8, d=3); all-pairs imbalance yields only 4 labels
    assert row[0] == "M=5" and row[4] == "M*=4"
    assert res.returncode == 1
