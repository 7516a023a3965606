import re

import pytest

from flawwalk import corpus
from flawwalk.aec import is_acyclic_coloring, load_edge_list
from flawwalk.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from flawwalk.sat import load_dimacs


def fields(line):
    return dict(tok.split("=", 1) for tok in line.split())


def stable(line):
    return re.sub(r" wall_ms=\S+", "", line)


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.edges"
    edges = [(u, v) for u in range(8) for v in range(u + 1, 8) if (u * 7 + v) % 3 == 0]
    path.write_text("".join(f"{u} {v}\n" for u, v in edges))
    return path


@pytest.fixture
def cnf_file(tmp_path):
    path = tmp_path / "pairs.cnf"
    path.write_text("c paired clauses\np cnf 6 4\n1 2 3 0\n-1 2 -3 0\n4 5 6 0\n-4 -5 6 0\n")
    return path


def test_solve_aec(graph_file, tmp_path, capsys):
    out = tmp_path / "col.txt"
    assert main(["solve-aec", "--input", str(graph_file), "--seed", "7", "--output", str(out)]) == EXIT_OK
    rec = fields(capsys.readouterr().out.strip().splitlines()[-1])
    assert rec["cmd"] == "solve-aec" and rec["seed"] == "7" and rec["outcome"] == "sink"
    assert int(rec["palette"]) <= int(rec["palette_bound"])
    g = load_edge_list(graph_file)
    colors = [int(line.split("->")[1]) for line in out.read_text().splitlines()]
    assert is_acyclic_coloring(g, colors)


def test_solve_sat_prints_solution(cnf_file, capsys):
    assert main(["solve-sat", "--input", str(cnf_file), "--seed", "1"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    lits = [int(x) for x in lines[0].split()[1:-1]]
    assert load_dimacs(cnf_file).satisfied([1 if l > 0 else 0 for l in lits])
    assert fields(lines[1])["verdict"] == "PASS"


def test_budget_exit(tmp_path, capsys):
    path = tmp_path / "unsat.cnf"
    path.write_text("p cnf 1 2\n1 0\n-1 0\n")
    assert main(["solve-sat", "--input", str(path), "--seed", "0", "--max-steps", "20"]) == EXIT_BUDGET
    assert fields(capsys.readouterr().out.strip())["outcome"] == "budget"


def test_oracle_toy_a(capsys):
    assert main(["oracle", "--instance", "toy-a", "--t", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("witness bound: PASS") == 2
    assert out.count("two-sided bound: PASS") == 2


def test_oracle_skips_tightness_without_regeneration(capsys):
    assert main(["oracle", "--instance", "toy-b", "--t", "2", "--walk", "permutation"]) == EXIT_OK
    assert "SKIPPED" in capsys.readouterr().out


def test_oracle_accepts_instance_file(tmp_path, capsys):
    path = tmp_path / "toy.inst"
    path.write_text(corpus.data_path("toy-a").read_text())
    assert main(["oracle", "--instance", str(path), "--t", "2"]) == EXIT_OK


def test_check_cnf(cnf_file, capsys):
    assert main(["check", "--instance", str(cnf_file), "--psi", "0.5"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "zeta=0.5625" in out and "delta=0.4375" in out and "step_bound" in out


def test_check_fail_status(capsys):
    assert main(["check", "--instance", "toy-a", "--psi", "0.1"]) == EXIT_FAIL
    assert "verdict=FAIL" in capsys.readouterr().out


def test_check_toy_b(capsys):
    assert main(["check", "--instance", "toy-b", "--psi", "2"]) == EXIT_OK
    assert "zeta=0.5" in capsys.readouterr().out


def test_charges_and_causality(capsys):
    assert main(["charges", "--instance", "toy-a"]) == EXIT_OK
    assert "# mode=regenerative" in capsys.readouterr().out
    assert main(["causality", "--instance", "full-resample"]) == EXIT_OK
    assert "f2 -> f1 witnessed" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["oracle", "--instance", "toy-a"],
        ["oracle", "--instance", "no-such-instance", "--t", "2"],
        ["solve-sat", "--input", "/no/such.cnf", "--seed", "1"],
        ["solve-sat", "--input", "x.cnf", "--runs", "0"],
    ],
)
def test_usage_errors(argv, capsys):
    try:
        status = main(argv)
    except SystemExit as exc:
        status = exc.code
    assert status == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_entropy_seed_is_reported(cnf_file, capsys):
    assert main(["solve-sat", "--input", str(cnf_file)]) == EXIT_OK
    captured = capsys.readouterr()
    seed = re.search(r"# seed=(\d+)", captured.err).group(1)
    assert fields(captured.out.splitlines()[-1])["seed"] == seed


def test_runs_are_reproducible_and_ordered(graph_file, capsys):
    base = ["solve-aec", "--input", str(graph_file), "--seed", "3", "--runs", "4", "--q", "3"]
    assert main(base) == EXIT_OK
    serial = [stable(l) for l in capsys.readouterr().out.splitlines()]
    assert main(base + ["--jobs", "2"]) == EXIT_OK
    parallel = [stable(l) for l in capsys.readouterr().out.splitlines()]
    assert serial == parallel
    assert [fields(l)["seed"] for l in serial] == ["3", "4", "5", "6"]


@pytest.mark.parametrize("walk", ["permutation", "recursive"])
def test_trace_and_forest(cnf_file, tmp_path, walk, capsys):
    trace = tmp_path / "run.log"
    main(["solve-sat", "--input", str(cnf_file), "--seed", "5", "--walk", walk, "--trace", str(trace)])
    capsys.readouterr()
    assert main(["forest", "--trace", str(trace)]) == EXIT_OK
    assert "roundtrip=PASS" in capsys.readouterr().out


def test_aec_trace_and_forest(graph_file, tmp_path, capsys):
    trace = tmp_path / "aec.log"
    main(["solve-aec", "--input", str(graph_file), "--seed", "2", "--q", "2", "--trace", str(trace)])
    capsys.readouterr()
    assert main(["forest", "--trace", str(trace), "--format", "canonical"]) == EXIT_OK
    assert "roundtrip=PASS" in capsys.readouterr().out
