import json
import subprocess
import sys

import pytest

from chromopt.cli import main
from chromopt.graphs import cycle_graph, turan, write_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_analytic_json(capsys):
    code, out, _ = run(capsys, "solve", "--q", "5", "--gamma", "0.25", "--method", "analytic", "--json", "-")
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "solve"
    assert doc["result"]["support_class"]["label"] == "P2(3,2)"


def test_solve_both_agrees(capsys):
    code, out, _ = run(capsys, "solve", "--q", "5", "--gamma", "0.245", "--budget", "ascent_starts", "25",
                       "--json", "-")
    assert code == 0
    assert json.loads(out)["result"]["within_tolerance"]


def test_solve_both_reports_disagreement(capsys):
    # the closed form is beaten by a union support at q = 9, gamma = 0.24
    code, _, _ = run(capsys, "solve", "--q", "9", "--gamma", "0.24", "--budget", "ascent_starts", "25")
    assert code == 3


def test_solve_domain_errors(capsys):
    assert run(capsys, "solve", "--q", "4", "--gamma", "0.25", "--method", "analytic")[0] == 1
    assert run(capsys, "solve", "--q", "5", "--gamma", "0.1", "--method", "analytic")[0] == 1
    assert run(capsys, "solve", "--q", "5")[0] == 1
    assert run(capsys, "bogus")[0] == 1


def test_inconsistency_exit_code(capsys):
    code, _, err = run(capsys, "solve", "--q", "5", "--gamma", "0.24", "--method", "numeric",
                       "--budget", "ascent_starts", "1", "--budget", "ascent_max_iter", "5",
                       "--tol", "oracle", "1e-14")
    assert code == 2 and "inconsistency" in err


def test_count_and_bound(capsys, tmp_path):
    path = tmp_path / "g.txt"
    write_graph(turan(2, 5), path)
    code, out, _ = run(capsys, "count", "--graph", str(path), "--q", "5", "--bound")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "860" and float(lines[1]) >= 860
    write_graph(cycle_graph(5), path)
    for method in ("brute", "poly", "auto"):
        assert run(capsys, "count", "--graph", str(path), "--q", "3", "--method", method)[1].strip() == "30"
    assert run(capsys, "count", "--graph", str(path), "--q", "3", "--method", "multipartite")[0] == 1
    assert run(capsys, "count", "--graph", str(tmp_path / "missing.txt"), "--q", "3")[0] == 1


def test_construct_writes_turan_graph(capsys, tmp_path):
    out_path = tmp_path / "g.txt"
    code, _, _ = run(capsys, "construct", "--q", "5", "--gamma", "0.25", "--n", "10", "--graph-out", str(out_path),
                     "--json", str(tmp_path / "c.json"))
    assert code == 0
    assert out_path.read_text() == turan(2, 10).to_text()
    doc = json.loads((tmp_path / "c.json").read_text())
    assert doc["result"]["is_turan_2"] and doc["result"]["edge_bound"]["satisfied"]


def test_search(capsys):
    code, out, _ = run(capsys, "search", "--n", "5", "--m", "6", "--q", "5", "--json", "-")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["max_count"] == 860 and doc["result"]["turan_is_unique_max"]
    assert run(capsys, "search", "--n", "8", "--m", "16", "--q", "5")[0] == 1


def test_verify_subset_and_window(capsys):
    code, out, _ = run(capsys, "verify", "--check", "claim2-mu", "--check", "lemma-tech1",
                       "--budget", "samples", "50", "--gamma-window", "0.24", "0.25", "--json", "-")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["summary"]["all_satisfied"]
    gammas = {r["gamma"] for r in doc["result"]["records"] if r["check"] == "lemma-tech1"}
    assert len(gammas) == 8 and max(gammas) == 0.25
    assert run(capsys, "verify", "--gamma-window", "0.3", "0.2")[0] == 1


def test_print_config_precedence(capsys, tmp_path, monkeypatch):
    path = tmp_path / "c.toml"
    path.write_text("seed = 9\n")
    monkeypatch.setenv("CHROMOPT_SEED", "4")
    assert "seed = 4" in run(capsys, "solve", "--q", "5", "--gamma", "0.25", "--print-config")[1]
    assert "seed = 9" in run(capsys, "solve", "--q", "5", "--gamma", "0.25", "--config", str(path),
                             "--print-config")[1]
    assert "seed = 2" in run(capsys, "solve", "--q", "5", "--gamma", "0.25", "--config", str(path),
                             "--seed", "2", "--print-config")[1]


def test_same_seed_same_bytes(capsys):
    argv = ("solve", "--q", "5", "--gamma", "0.25", "--method", "numeric", "--budget", "ascent_starts", "25",
            "--seed", "3", "--json", "-")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chromopt.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("chromopt ")
