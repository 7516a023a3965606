import itertools
import math

import pytest
from hypothesis import given, strategies as st

from flawwalk import corpus
from flawwalk.charges import (
    GENERAL,
    REGENERATIVE,
    UNIFORM_IMPROVED,
    ModeUnjustified,
    charge,
    charge_table,
    check_atomic_harmonic,
    check_regeneration,
    harmonic_rho,
    in_degrees,
    is_atomic,
    lam,
    uniform_charge,
)
from flawwalk.core import ExplicitInstance
from flawwalk.sat import CnfInstance, MTInstance
from strategies import explicit_instances, small_cnfs


def test_lambda_resampling_bit():
    inst = corpus.toy_a()
    for s in inst.flaws["f1"]:
        assert lam(inst, "f1", s) == pytest.approx(0.5)


def test_lambda_deterministic_fix():
    inst = corpus.toy_b()
    for s in inst.flaws["f1"]:
        assert lam(inst, "f1", s) == pytest.approx(1.0)


@given(explicit_instances(uniform_mu=True))
def test_lambda_harmonic_uniform_is_inverse_action_count(inst):
    for (i, s) in inst.arcs:
        rho = harmonic_rho(inst, i, s)
        ratio = max(p for _, p in rho)
        assert ratio == pytest.approx(1 / len(rho))


def test_regenerative_charge_toy_a():
    assert charge(corpus.toy_a(), "f1", REGENERATIVE) == pytest.approx(0.5)


def test_general_charge_toy_b():
    assert charge(corpus.toy_b(), "f1", GENERAL) == pytest.approx(1.0)


def test_regenerative_refused_without_regeneration():
    with pytest.raises(ModeUnjustified):
        charge(corpus.toy_b(), "f1", REGENERATIVE)
    with pytest.raises(ModeUnjustified):
        charge_table(corpus.toy_b(), REGENERATIVE)


def test_auto_mode_picks_general_for_toy_b():
    table = charge_table(corpus.toy_b())
    assert table.mode == GENERAL
    assert table.gammas() == {"f1": 1.0, "f2": 1.0}


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_width_k_clause_charge(k):
    cnf = CnfInstance(k, [tuple(range(1, k + 1))])
    inst = MTInstance(cnf).to_explicit()
    assert charge(inst, "c1", REGENERATIVE) == 2.0 ** -k
    assert MTInstance(cnf).gammas() == {0: 2.0 ** -k}


def test_uniform_charge_gadget():
    inst = corpus.gadget()
    assert uniform_charge(inst, "f") == pytest.approx(1.0)
    assert max(in_degrees(inst, "f").values()) == 2


def test_uniform_charge_toy_a_equals_gamma():
    inst = corpus.toy_a()
    assert uniform_charge(inst, "f1") == pytest.approx(0.5)
    assert charge_table(inst, UNIFORM_IMPROVED).gamma("f1") == pytest.approx(0.5)


def test_uniform_charge_needs_uniform_measure():
    with pytest.raises(ModeUnjustified):
        uniform_charge(corpus.biased_bits(), "f1")


@pytest.mark.parametrize("name, passes", [("toy-a", True), ("toy-b", False), ("full-resample", True)])
def test_regeneration_examples(name, passes):
    inst = corpus.build(name)
    for i in inst.order:
        rep = check_regeneration(inst, i)
        assert rep.passed is passes
        if passes:
            assert rep.deviation <= 1e-12


def test_toy_b_regeneration_deviation():
    rep = check_regeneration(corpus.toy_b(), "f1")
    assert rep.deviation == pytest.approx(0.25)


def test_harmonic_rho_uniform_three_actions():
    inst = corpus.full_resample().with_theta({"a": 1.0})
    uniform = ExplicitInstance(
        inst.states, inst.flaws, inst.arcs, {s: 1 / 3 for s in inst.states}, {s: 1 / 3 for s in inst.states}
    )
    assert [p for _, p in harmonic_rho(uniform, "f1", "a")] == pytest.approx([1 / 3] * 3)


def test_harmonic_rho_proportional():
    inst = corpus.biased_resample()
    assert dict(harmonic_rho(inst, "f", "0")) == pytest.approx({"1": 2 / 3, "2": 1 / 3})


def test_harmonic_rho_matches_toy_a():
    inst = corpus.toy_a()
    for key in inst.arcs:
        assert dict(harmonic_rho(inst, *key)) == pytest.approx(dict(inst.actions(*key)))


def test_atomic_harmonic_examples():
    rep = check_atomic_harmonic(corpus.toy_a())
    assert rep.passed and rep.precondition is None
    assert check_atomic_harmonic(corpus.load("mt-x")).passed
    rep = check_atomic_harmonic(corpus.toy_b())
    assert not rep.passed and "regeneration" in rep.precondition


@given(explicit_instances())
def test_general_charge_dominates_measure(inst):
    for i in inst.order:
        assert charge(inst, i, GENERAL) >= inst.measure_of_flaw(i) * (1 - 1e-9)


@given(explicit_instances(), st.data())
def test_harmonic_rho_minimizes_lambda(inst, data):
    harm = inst.with_rho({k: harmonic_rho(inst, *k) for k in inst.arcs})
    for (i, s) in inst.arcs:
        targets = [t for t, _ in inst.actions(i, s)]
        w = data.draw(st.lists(st.integers(1, 20), min_size=len(targets), max_size=len(targets)))
        perturbed = inst.with_rho({**inst.arcs, (i, s): [(t, x / sum(w)) for t, x in zip(targets, w)]})
        assert lam(harm, i, s) <= lam(perturbed, i, s) * (1 + 1e-12)


@given(explicit_instances(uniform_mu=True))
def test_uniform_charge_at_most_b_over_a(inst):
    for i in inst.order:
        b = max(in_degrees(inst, i).values())
        a = min(len(inst.actions(i, s)) for s in inst.flaws[i])
        assert uniform_charge(inst, i) <= b / a + 1e-12


@given(explicit_instances())
def test_atomicity_matches_brute_force(inst):
    unique = True
    for i in inst.order:
        for t in inst.states:
            preds = [s for s in inst.flaws[i] if any(x == t for x, _ in inst.actions(i, s))]
            unique &= len(preds) <= 1
    assert is_atomic(inst) is unique


@given(small_cnfs(max_vars=4))
def test_mt_instances_are_atomic_harmonic_regenerative(cnf):
    inst = MTInstance(cnf).to_explicit()
    assert is_atomic(inst)
    assert check_atomic_harmonic(inst).passed
    for k, c in enumerate(cnf.clauses):
        assert math.isclose(inst.measure_of_flaw(f"c{k + 1}"), 2.0 ** -len(c), rel_tol=1e-12)


def test_mt_corpus_up_to_twelve_variables():
    ring = [tuple(sorted({(3 * k) % 12 + 1, (3 * k + 1) % 12 + 1, (3 * k + 5) % 12 + 1})) for k in range(4)]
    inst = MTInstance(CnfInstance(12, ring)).to_explicit()
    assert is_atomic(inst)
    assert check_atomic_harmonic(inst).passed


def test_table_text_lists_every_flaw():
    text = charge_table(corpus.toy_a()).to_text()
    assert text.splitlines()[0] == "# mode=regenerative"
    assert len(text.splitlines()) == 4


def test_regeneration_via_oracle_for_two_unit_clauses():
    inst = corpus.load("mt-x-y")
    assert all(check_regeneration(inst, i).passed for i in inst.order)
    assert list(itertools.chain(inst.order)) == ["c1", "c2"]
