import pytest
from hypothesis import given, strategies as st

from flawwalk import corpus
from flawwalk.causality import build_causality, dependency_graph
from flawwalk.core import ExplicitInstance, span
from flawwalk.forests import (
    RECURSIVE,
    ForestError,
    ForestNode,
    WitnessForest,
    break_forest,
    break_sequence,
    check_recursive_structure,
    forest_of,
    reconstruct_witness,
    recursive_forest,
)
from flawwalk.oracle import enumerate_witnesses, trajectory_from_record
from flawwalk.walks import PERMUTATION, RECORD_FULL, WalkConfig, permutation_walk, recursive_walk, run_walk
from strategies import explicit_instances

ORDER = {"f1": 0, "f2": 1}.__getitem__


def test_toy_b_break_sequence():
    traj = permutation_walk(corpus.toy_b(), WalkConfig(seed=0, record=RECORD_FULL))
    assert break_sequence(traj) == [frozenset({"f1", "f2"}), frozenset()]


def test_collaterally_fixed_flaw_is_dropped():
    inst = ExplicitInstance(
        ["x", "z"], {"f1": ["x"], "f2": ["x"]}, {("f1", "x"): [("z", 1.0)], ("f2", "x"): [("z", 1.0)]},
        {"x": 0.5, "z": 0.5}, {"x": 1.0, "z": 0.0},
    )
    traj = permutation_walk(inst, WalkConfig(seed=0, record=RECORD_FULL))
    assert traj.witness == ("f1",)
    assert break_sequence(traj) == [frozenset({"f1"})]


def test_flawless_start_has_empty_sequence():
    traj = permutation_walk(corpus.toy_a(), WalkConfig(seed=0, initial="11", record=RECORD_FULL))
    assert break_sequence(traj) == []
    assert len(break_forest([], ORDER)) == 0


def test_break_forest_examples():
    forest = break_forest([{"f1", "f2"}, set(), set()], ORDER)
    assert [n.label for n in forest.roots] == ["f1", "f2"]
    assert all(not n.children for n in forest.roots)
    assert reconstruct_witness(forest) == ("f1", "f2")
    forest = break_forest([{"f1"}, {"f2"}, set()], ORDER)
    assert len(forest.roots) == 1
    assert [c.label for c in forest.roots[0].children] == ["f2"]


def test_recursive_reconstruction_is_preorder():
    forest = WitnessForest([ForestNode("f1", [ForestNode("f2")])], RECURSIVE, ORDER)
    assert reconstruct_witness(forest) == ("f1", "f2")
    forest = WitnessForest([ForestNode("f2"), ForestNode("f1", [ForestNode("f2")])], RECURSIVE, ORDER)
    assert reconstruct_witness(forest) == ("f1", "f2", "f2")


def test_recursive_forest_shapes():
    traj = recursive_walk(corpus.toy_b(), WalkConfig(seed=0, record=RECORD_FULL))
    forest = recursive_forest(traj)
    assert len(forest.roots) == 2 and len(forest) == 2


def test_repeated_sibling_labels_rejected():
    forest = WitnessForest([ForestNode("f1"), ForestNode("f1")], RECURSIVE, ORDER)
    with pytest.raises(ForestError):
        reconstruct_witness(forest)


def test_wrong_engine_rejected():
    traj = recursive_walk(corpus.toy_b(), WalkConfig(seed=0, record=RECORD_FULL))
    with pytest.raises(ForestError):
        break_sequence(traj)


@pytest.mark.parametrize("engine", ["permutation", "recursive"])
def test_round_trip_toy_a(engine):
    inst = corpus.toy_a()
    for seed in range(1000):
        traj = run_walk(inst, engine, WalkConfig(seed=seed, record=RECORD_FULL))
        forest = forest_of(traj)
        forest.check_distinct()
        assert reconstruct_witness(forest) == traj.witness


@given(explicit_instances(), st.integers(0, 2 ** 32), st.sampled_from(["permutation", "recursive"]))
def test_round_trip_random_instances(inst, seed, engine):
    traj = run_walk(inst, engine, WalkConfig(seed=seed, max_steps=60, record=RECORD_FULL))
    forest = forest_of(traj)
    forest.check_distinct()
    assert reconstruct_witness(forest) == traj.witness
    assert len(forest) == len(traj) or engine == PERMUTATION


@given(explicit_instances(), st.integers(0, 2 ** 32))
def test_recursive_forest_independence(inst, seed):
    R = build_causality(inst)
    G = dependency_graph(R)
    traj = recursive_walk(inst, WalkConfig(seed=seed, max_steps=60, record=RECORD_FULL))
    assert check_recursive_structure(recursive_forest(traj), G, R, span(inst)) == []


@pytest.mark.parametrize("engine", ["permutation", "recursive"])
def test_injectivity_on_toy_a(engine):
    inst = corpus.toy_a()
    for t in range(1, 6):
        dist = enumerate_witnesses(inst, engine, t, keep_trajectories=True)
        seen = {}
        for w, recs in dist.trajectories.items():
            for rec in recs:
                forest = forest_of(trajectory_from_record(inst, engine, w, rec))
                code = forest.canonical()
                assert seen.setdefault(code, w) == w
        assert len(set(seen.values())) == len(dist.probabilities)
