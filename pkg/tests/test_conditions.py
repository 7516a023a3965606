import itertools
import math
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from flawwalk.causality import CausalityGraph, DependencyGraph
from flawwalk.conditions import (
    CLUSTER,
    SIMPLE,
    ConditionFailed,
    bound_chain,
    check_general_lll,
    enumerate_forests,
    evaluate,
    forest_probability,
    horizon_T0,
    sample_branching_forest,
    step_bound,
    subset_sum,
    zeta_cluster,
    zeta_simple,
)
from flawwalk.forests import ForestNode, WitnessForest


def _all_subsets(items):
    return itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(len(items) + 1))


def test_zeta_simple_examples():
    assert zeta_simple(1 / 8, 1.0, [1.0, 1.0]) == 0.5
    assert zeta_simple(1.0, 2.0, []) == 0.5
    assert zeta_simple(2 ** -3, 0.5, [0.5, 0.5]) == pytest.approx(9 / 16)


def test_zeta_cluster_examples():
    G = DependencyGraph("ab", {"a": ["b"]})
    psi = {"a": 1.0, "b": 1.0}
    assert zeta_cluster(0.25, 1.0, "ab", G, psi) == pytest.approx(0.75)
    assert zeta_simple(0.25, 1.0, [1.0, 1.0]) == pytest.approx(1.0)
    empty = DependencyGraph("ab")
    assert zeta_cluster(0.25, 1.0, "ab", empty, psi) == pytest.approx(zeta_simple(0.25, 1.0, [1.0, 1.0]))


def test_toy_b_passes_with_large_psi():
    R = CausalityGraph.from_mapping({"f1": [], "f2": []})
    rep = evaluate({"f1": 1.0, "f2": 1.0}, {"f1": 2.0, "f2": 2.0}, R)
    assert rep.zetas == {"f1": 0.5, "f2": 0.5}
    assert rep.passed and rep.delta == 0.5


def test_boundary_zeta_of_one_fails():
    R = CausalityGraph.from_mapping({"f": []})
    rep = evaluate({"f": 1.0}, {"f": 1.0}, R)
    assert not rep.passed and rep.verdict("f") == "FAIL"


def test_horizon_first_term():
    assert horizon_T0(1.0, {}, []) == 0.0
    assert horizon_T0(8.0, {}, []) == pytest.approx(3.0)


def test_horizon_independent_roots():
    G = DependencyGraph(["f1", "f2"])
    psi = {"f1": 1.0, "f2": 1.0}
    assert horizon_T0(1.0, psi, ["f1", "f2"], "ind", G) == pytest.approx(2.0)
    assert horizon_T0(1.0, psi, ["f1", "f2"], "all") == pytest.approx(2.0)
    assert horizon_T0(1.0, psi, ["f1", "f2"], [(), ("f1",)]) == pytest.approx(1.0)


def test_step_bound_examples():
    assert step_bound(10, 1, 6) == 16
    assert step_bound(10, 0.5, 6) == 32
    with pytest.raises(ConditionFailed):
        step_bound(10, 0, 6)


def test_report_step_bound_refuses_failed_condition():
    R = CausalityGraph.from_mapping({"f": []})
    rep = evaluate({"f": 1.0}, {"f": 1.0}, R, T0=1.0)
    with pytest.raises(ConditionFailed):
        rep.step_bound(3)


def test_general_lll_examples():
    rep = check_general_lll({"i": 0.25}, {"i": []}, {"i": 1.0})
    assert rep.passed and rep.values["i"] == 0.5
    assert rep.lower_bound == 0.5
    rep = check_general_lll({"i": 0.5, "j": 0.5}, {"i": ["j"]}, {"i": 1.0, "j": 1.0})
    assert not rep.passed and rep.values["i"] == 2.0 and rep.lower_bound is None


def test_forest_probability_single_root():
    forest = WitnessForest([ForestNode("r")], flavor="branching")
    p = forest_probability(forest, {"r": 1.0}, [(), ("r",)], {"r": [()]})
    assert p == 0.5


def test_forest_probability_empty_forest():
    p = forest_probability(WitnessForest([]), {"r": 1.0}, [(), ("r",)], {"r": [()]})
    assert p == 0.5
    p = forest_probability(WitnessForest([]), {"r": 3.0}, [(), ("r",)], {"r": [()]})
    assert p == 0.25


def test_forest_probability_rejects_foreign_children():
    forest = WitnessForest([ForestNode("r", [ForestNode("r")])])
    with pytest.raises(Exception):
        forest_probability(forest, {"r": 1.0}, [(), ("r",)], {"r": [()]})


TWO_FLAW_LISTS = {"a": [(), ("a",), ("b",), ("a", "b")], "b": [(), ("b",)]}
TWO_FLAW_ROOTS = [(), ("a",), ("b",), ("a", "b")]


def test_forest_probabilities_sum_at_most_one():
    psi = {"a": 0.4, "b": 0.7}
    total = 0.0
    for n in range(3):
        for phi in enumerate_forests(TWO_FLAW_ROOTS, TWO_FLAW_LISTS, n):
            total += forest_probability(phi, psi, TWO_FLAW_ROOTS, TWO_FLAW_LISTS)
    assert 0 < total <= 1 + 1e-12


def test_forest_enumeration_counts():
    # one vertex: roots {a} or {b}, each childless
    assert len(enumerate_forests(TWO_FLAW_ROOTS, TWO_FLAW_LISTS, 1)) == 2
    assert len(enumerate_forests(TWO_FLAW_ROOTS, TWO_FLAW_LISTS, 0)) == 1


def test_branching_simulation_matches_enumeration():
    psi = {"a": 0.4, "b": 0.7}
    rng = random.Random(5)
    n = 20_000
    counts = Counter()
    for _ in range(n):
        phi = sample_branching_forest(psi, TWO_FLAW_ROOTS, TWO_FLAW_LISTS, rng, 2)
        counts[None if phi is None else phi.canonical()] += 1
    total = 0.0
    for size in range(3):
        for phi in enumerate_forests(TWO_FLAW_ROOTS, TWO_FLAW_LISTS, size):
            p = forest_probability(phi, psi, TWO_FLAW_ROOTS, TWO_FLAW_LISTS)
            total += p
            sd = math.sqrt(p * (1 - p) / n)
            assert abs(counts[phi.canonical()] / n - p) <= 3 * sd + 1e-9
    q = 1 - total
    assert abs(counts[None] / n - q) <= 3 * math.sqrt(q * (1 - q) / n)


def test_bound_chain_identity():
    gammas = {"a": 0.1, "b": 0.2}
    psi = {"a": 0.4, "b": 0.7}
    for t in range(1, 5):
        chain = bound_chain(gammas, psi, TWO_FLAW_ROOTS, TWO_FLAW_LISTS, t)
        assert chain.identity_sum == pytest.approx(chain.lhs, rel=1e-12)
        assert chain.lhs <= chain.rhs * (1 + 1e-12)


psis = st.lists(st.floats(0.01, 10.0), min_size=0, max_size=12)


@given(psis)
def test_subset_sum_closed_form(values):
    brute = math.fsum(math.prod(S) for S in _all_subsets(values))
    assert subset_sum(values) == pytest.approx(brute, rel=1e-12)


@given(
    st.integers(0, 7).flatmap(
        lambda n: st.tuples(
            st.lists(st.floats(0.01, 5.0), min_size=n, max_size=n),
            st.lists(st.tuples(st.integers(0, max(n - 1, 0)), st.integers(0, max(n - 1, 0))), max_size=10),
        )
    ),
    st.floats(0.001, 1.0),
    st.floats(0.01, 5.0),
)
def test_cluster_never_exceeds_simple(data, gamma, psi_i):
    values, edges = data
    n = len(values)
    adj = {}
    for u, v in edges:
        if n:
            adj.setdefault(u, []).append(v)
    G = DependencyGraph(range(n), adj)
    psi = dict(enumerate(values))
    assert zeta_cluster(gamma, psi_i, range(n), G, psi) <= zeta_simple(gamma, psi_i, values) * (1 + 1e-12)


@given(psis.filter(bool), st.floats(0.001, 1.0), st.floats(0.01, 5.0), st.floats(1.01, 3.0), st.data())
def test_zeta_monotonicity(values, gamma, psi_i, factor, data):
    base = zeta_simple(gamma, psi_i, values)
    assert zeta_simple(gamma * factor, psi_i, values) > base
    assert zeta_simple(gamma, psi_i * factor, values) < base
    k = data.draw(st.integers(0, len(values) - 1))
    bumped = list(values)
    bumped[k] *= factor
    assert zeta_simple(gamma, psi_i, bumped) > base


def test_evaluate_cluster_on_declared_relation():
    R = CausalityGraph.from_mapping({"i": ["a", "b"], "a": ["b"], "b": ["a"]})
    rep = evaluate({"i": 0.25, "a": 0.1, "b": 0.1}, {"i": 1.0, "a": 1.0, "b": 1.0}, R, CLUSTER)
    assert rep.zetas["i"] == pytest.approx(0.75)
    simple = evaluate({"i": 0.25, "a": 0.1, "b": 0.1}, {"i": 1.0, "a": 1.0, "b": 1.0}, R, SIMPLE)
    assert simple.zetas["i"] == pytest.approx(1.0)
    assert "verdict=PASS" in rep.to_text()
