import csv
import json
import subprocess
import sys

import pytest

from depthstab import cli
from depthstab.invariants import CheckResult, verify_paper as real_verify


@pytest.fixture
def p4_file(tmp_path):
    path = tmp_path / "p4.txt"
    path.write_text("# path on four vertices\n1 2\n2 3\n3 4\n")
    return path


def test_analyze_json(p4_file, capsys):
    assert cli.main(["analyze", "--graph", str(p4_file)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["depths"] == [2, 1] and rep["dstab"] == 2 and rep["spread"] == 3
    assert rep["checks"]["thm_1_2"]["status"] == "pass"


def test_analyze_csv(p4_file, capsys):
    assert cli.main(["analyze", "--graph", str(p4_file), "--format", "csv"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert rows[0]["dstab"] == "2" and rows[0]["status"] == "pass"


def test_analyze_disconnected(tmp_path, capsys):
    path = tmp_path / "g.txt"
    path.write_text("1 2\n3 4\n")
    assert cli.main(["analyze", "--graph", str(path)]) == 1
    assert "connected graph" in capsys.readouterr().err


def test_analyze_parse_error(tmp_path, capsys):
    path = tmp_path / "g.txt"
    path.write_text("1 2\n2 two\n")
    assert cli.main(["analyze", "--graph", str(path)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_analyze_missing_file(capsys):
    assert cli.main(["analyze", "--graph", "/nonexistent/graph.txt"]) == 1


def test_analyze_violation_exit_code(p4_file, monkeypatch, capsys):
    def forged(g, *args, **kwargs):
        rep = real_verify(g, *args, **kwargs)
        rep.checks["thm_1_2"] = CheckResult("violated", True, False, {})
        return rep

    monkeypatch.setattr(cli, "verify_paper", forged)
    assert cli.main(["analyze", "--graph", str(p4_file)]) == 2


def test_verify_brooms(tmp_path, capsys):
    out = tmp_path / "out.jsonl"
    summary = tmp_path / "summary.csv"
    code = cli.main(["verify", "--family", "brooms", "--pairs", "1:2,2:4", "--workers", "1",
                     "-o", str(out), "--summary", str(summary)])
    assert code == 0
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    assert [r["seq"] for r in recs] == [0, 1]
    assert [(r["dstab"], r["spread"]) for r in recs] == [(1, 2), (2, 4)]
    rows = list(csv.DictReader(summary.open()))
    assert [r["status"] for r in rows] == ["pass", "pass"]
    assert "processed 2 graphs" in capsys.readouterr().err


def test_verify_connected_n4(capsys):
    assert cli.main(["verify", "--family", "connected", "--max-n", "4", "--workers", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 38
    assert all(json.loads(line)["checks"]["thm_1_2"]["status"] in ("pass", "skipped") for line in lines)


def test_verify_rejects_large_family(capsys):
    assert cli.main(["verify", "--family", "trees", "--max-n", "11"]) == 1
    assert cli.main(["verify", "--family", "brooms"]) == 1


def test_enumerate(capsys):
    assert cli.main(["enumerate", "--trees", "--n", "4"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 16
    assert cli.main(["enumerate", "--trees", "--n", "4", "--up-to-iso"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 2
    assert cli.main(["enumerate", "--n", "4"]) == 1


def test_broom_command(capsys):
    assert cli.main(["broom", "--a", "2", "--b", "4", "--format", "line"]) == 0
    assert capsys.readouterr().out.strip() == "5;1-2,2-3,3-4,3-5"
    assert cli.main(["broom", "--a", "2", "--b", "3"]) == 0
    assert "3 4" in capsys.readouterr().out
    assert cli.main(["broom", "--a", "3", "--b", "3"]) == 1


def test_ideal_command(capsys):
    assert cli.main(["ideal", "(x1*x2, x2*x3, x3*x4)"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert (d["pd"], d["depth"]) == (2, 2)
    assert cli.main(["ideal", "(x1*x2, x2*x3, x1*x3)", "--power", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["depth"] == 0
    assert cli.main(["ideal", "(x1*x2, x2*x3, x3*x4)", "--betti", "--method", "lattice"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "i,multidegree,b"


def test_field_flag(p4_file, capsys):
    assert cli.main(["analyze", "--graph", str(p4_file), "--field", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["field"] == "GF(2)"
    assert cli.main(["analyze", "--graph", str(p4_file), "--field", "4"]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "depthstab", "broom", "--a", "1", "--b", "2", "--format", "line"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "3;1-2,2-3"
