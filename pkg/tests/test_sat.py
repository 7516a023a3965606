import random

import pytest
from hypothesis import given, strategies as st

from flawwalk.charges import check_regeneration, in_degrees, is_atomic
from flawwalk.core import InstanceError
from flawwalk.sat import (
    CnfInstance,
    DimacsError,
    MTInstance,
    format_solution,
    parse_dimacs,
    random_kcnf,
    solve_sat,
)
from flawwalk.walks import PERMUTATION, RECURSIVE
from strategies import small_cnfs


def test_parse_minimal():
    cnf = parse_dimacs("p cnf 2 1\n1 2 0\n")
    assert cnf.n == 2 and cnf.clauses == [(1, 2)]


def test_parse_skips_comments_and_spans_lines():
    cnf = parse_dimacs("c hello\np cnf 3 2\n1 -2\n3 0\nc mid\n-1 0\n")
    assert cnf.clauses == [(1, -2, 3), (-1,)]


@pytest.mark.parametrize(
    "text, where",
    [
        ("p cnf 2 1\n0\n", "line 2"),
        ("1 2 0\n", "line 1"),
        ("p cnf 2 1\n1 3 0\n", "line 2"),
        ("p cnf 2 2\n1 0\n", "declares 2"),
        ("p cnf 2 1\n1 x 0\n", "line 2"),
    ],
)
def test_parse_errors(text, where):
    with pytest.raises(DimacsError, match=where):
        parse_dimacs(text)


def test_empty_clause_rejected_programmatically():
    with pytest.raises(InstanceError):
        CnfInstance(2, [()])


@given(small_cnfs())
def test_dimacs_round_trip(cnf):
    assert parse_dimacs(cnf.to_dimacs()).clauses == cnf.clauses


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_width_k_clause(k):
    inst = MTInstance(CnfInstance(k, [tuple(-v for v in range(1, k + 1))]))
    assert inst.gammas() == {0: 2.0 ** -k}
    violating = bytes([1] * k)
    assert len(inst.actions(0, violating)) == 2 ** k


def test_two_unit_clauses_regenerate():
    inst = MTInstance(CnfInstance(2, [(1,), (2,)])).to_explicit()
    assert all(check_regeneration(inst, f).passed for f in inst.order)


@given(small_cnfs(max_vars=5))
def test_resampling_is_atomic(cnf):
    inst = MTInstance(cnf).to_explicit()
    assert is_atomic(inst)
    for f in inst.order:
        assert max(in_degrees(inst, f).values()) == 1


@given(small_cnfs(max_vars=6, max_clauses=6))
def test_gamma_is_subcube_measure(cnf):
    inst = MTInstance(cnf)
    for c, g in inst.gammas().items():
        assert g == 2.0 ** -len(cnf.variables(c))


def test_paired_clauses_condition():
    # each clause shares variables only with its partner
    cnf = CnfInstance(6, [(1, 2, 3), (-1, 2, -3), (4, 5, 6), (-4, -5, 6)])
    rep = MTInstance(cnf).condition(0.5)
    assert all(z == pytest.approx(9 / 16) for z in rep.zetas.values())
    assert rep.passed
    result = solve_sat(cnf, seed=3)
    assert result.solved and cnf.satisfied(result.assignment)


def test_ring_condition():
    clauses = [tuple(sorted({(2 * i) % 20 + 1, (2 * i + 1) % 20 + 1, (2 * i + 2) % 20 + 1})) for i in range(10)]
    rep = MTInstance(CnfInstance(20, clauses)).condition(0.5)
    assert rep.max_zeta == pytest.approx(27 / 32)


def test_satisfied_start_takes_no_steps():
    cnf = CnfInstance(1, [(1, -1)])
    result = solve_sat(cnf, seed=0)
    assert result.steps == 0 and result.solved


@pytest.mark.parametrize("engine", [PERMUTATION, RECURSIVE])
def test_random_3cnf_density_two(engine):
    solved = 0
    for seed in range(100):
        cnf = random_kcnf(100, 200, 3, random.Random(seed))
        result = solve_sat(cnf, engine=engine, seed=seed, max_steps=100_000)
        if result.solved:
            assert cnf.satisfied(result.assignment)
            solved += 1
    assert solved >= 99


@given(small_cnfs(max_vars=6, max_clauses=5), st.integers(0, 2 ** 32), st.sampled_from([PERMUTATION, RECURSIVE]))
def test_outputs_satisfy(cnf, seed, engine):
    result = solve_sat(cnf, engine=engine, seed=seed, max_steps=2000, psi=None)
    if result.solved:
        assert cnf.satisfied(result.assignment)


def test_unsatisfiable_hits_budget():
    cnf = CnfInstance(1, [(1,), (-1,)])
    result = solve_sat(cnf, seed=0, max_steps=50)
    assert not result.solved and result.outcome == "budget" and result.steps == 50


def test_format_solution():
    assert format_solution(bytes([1, 0, 1])) == "v 1 -2 3 0\n"


def test_to_explicit_guard():
    with pytest.raises(Exception):
        MTInstance(CnfInstance(13, [(1,)])).to_explicit()
