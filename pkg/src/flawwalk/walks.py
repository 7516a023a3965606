"""The permutation walk and the recursive walk, plus the trajectory log format.

Both engines consume randomness identically: one ``sample_action`` call per
step and one ``sample_initial`` call when no start state is given.  So with
the neighborhood filter disabled the recursive walk reproduces the
permutation walk step for step.

Trajectory log (JSON lines, one object per line):

    {"record": "header", "engine": ..., "seed": ..., "digest": ..., "present": [[flaw, key], ...]}
    {"record": "step", "step": k, "flaw": ..., "key": ..., "parent": p, "digest": ..., "present": [...]}
    {"record": "end", "outcome": "sink" | "budget", "steps": t}

``key`` is the flaw's position in the walk's flaw order (ascending = addressed
first); ``parent`` is the index of the spawning invocation or -1 at top level.
``present`` lists U(state) and appears only for full-level recordings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, TextIO

from .causality import CausalityGraph, build_causality
from .core import ExplicitInstance, FlawInstance, FlawwalkError, InstanceError, Step, Trajectory, make_rng

PERMUTATION = "permutation"
RECURSIVE = "recursive"
ENGINES = (PERMUTATION, RECURSIVE)

SINK = "sink"
BUDGET = "budget"

RECORD_NONE = "none"
RECORD_WITNESS = "witness"
RECORD_FULL = "full"


class PropositionViolation(FlawwalkError):
    """ADDRESS(i, sigma) returned at a state with a flaw outside U(sigma) minus Gamma_R(i) and i."""


@dataclass
class WalkConfig:
    seed: int | None = None
    max_steps: int = 1_000_000
    record: str = RECORD_WITNESS
    R: CausalityGraph | Mapping | None = None
    initial: Any = None
    check_returns: bool = False
    filter_neighborhood: bool = True


def resolve_relation(instance: FlawInstance, R):
    """Map flaw -> Gamma_R(flaw) for the recursive walk; ``None`` defers to the instance.

    On explicit instances a declared relation must contain every causality arc.
    """
    explicit = isinstance(instance, ExplicitInstance)
    if R is None:
        if not explicit:
            return None
        if instance.relation is None:
            return build_causality(instance).arcs
        relation = instance.relation
    elif isinstance(R, CausalityGraph):
        relation = R.arcs
    else:
        relation = {f: frozenset(v) for f, v in R.items()}
    if explicit:
        exact = build_causality(instance)
        missing = [(i, j) for i, j in exact.arc_list() if j not in relation.get(i, ())]
        if missing:
            raise InstanceError(f"{instance.name}: relation misses causality arcs {missing[:5]}")
    return relation


def _start(instance: FlawInstance, config: WalkConfig, rng):
    return config.initial if config.initial is not None else instance.sample_initial(rng)


def _new_trajectory(engine, instance, state, config) -> Trajectory:
    traj = Trajectory(engine, state, seed=config.seed, key=instance.flaw_key)
    if config.record == RECORD_FULL:
        traj.initial_present = tuple(instance.present_flaws(state))
        traj.initial_digest = instance.digest(state)
    elif config.record == RECORD_NONE:
        traj.initial = None
    return traj


def permutation_walk(instance: FlawInstance, config: WalkConfig | None = None) -> Trajectory:
    """Address the greatest present flaw until a sink or the step budget."""
    config = config or WalkConfig()
    rng = make_rng(config.seed)
    state = _start(instance, config, rng)
    traj = _new_trajectory(PERMUTATION, instance, state, config)
    full = config.record == RECORD_FULL
    keep = config.record != RECORD_NONE
    n = 0
    present = instance.present_flaws(state)
    while present:
        if n >= config.max_steps:
            traj.outcome = BUDGET
            break
        flaw = present[0]
        state = instance.sample_action(flaw, state, rng)
        present = instance.present_flaws(state)
        if full:
            traj.steps.append(Step(flaw, -1, state, tuple(present), instance.digest(state)))
        elif keep:
            traj.steps.append(Step(flaw))
        n += 1
    else:
        traj.outcome = SINK
    traj.final = state
    traj.n_steps = n
    return traj


@dataclass
class _Frame:
    flaw: Any
    index: int
    present: frozenset | None


def next_invocation(instance: FlawInstance, state, stack: list, neighborhood, filtered: bool = True):
    """Decide the recursive walk's next ADDRESS call at ``state``.

    Frames whose guard set is empty are popped from ``stack`` (in place) and
    returned as ``popped``.  Returns ``(flaw, parent_index, popped)``;
    ``flaw`` is ``None`` at a sink.
    """
    popped = []
    while stack:
        top = stack[-1]
        if filtered:
            guard = instance.guard_flaws(top.flaw, state, neighborhood(top.flaw))
        else:
            guard = instance.present_flaws(state)
        if guard:
            return guard[0], top.index, popped
        popped.append(stack.pop())
    present = instance.present_flaws(state)
    return (present[0] if present else None), -1, popped


def recursive_walk(instance: FlawInstance, config: WalkConfig | None = None) -> Trajectory:
    """ELIMINATE / ADDRESS with an explicit stack.

    After each step taken by ADDRESS(i, .), the innermost active call keeps
    addressing the greatest flaw of U(sigma) intersected with Gamma_R(i);
    when that set is empty the call returns.  Top level addresses the
    greatest flaw of U(sigma).
    """
    config = config or WalkConfig()
    rng = make_rng(config.seed)
    relation = resolve_relation(instance, config.R)
    state = _start(instance, config, rng)
    traj = _new_trajectory(RECURSIVE, instance, state, config)
    full = config.record == RECORD_FULL
    keep = config.record != RECORD_NONE
    check = config.check_returns and config.filter_neighborhood
    stack: list[_Frame] = []
    n = 0

    def neighborhood(f):
        return None if relation is None else relation.get(f, frozenset())

    while True:
        flaw, parent, popped = next_invocation(
            instance, state, stack, neighborhood, config.filter_neighborhood
        )
        if check:
            for frame in popped:
                _check_return(instance, frame, state, neighborhood(frame.flaw))
        if flaw is None:
            traj.outcome = SINK
            break
        if n >= config.max_steps:
            traj.outcome = BUDGET
            break
        before = frozenset(instance.present_flaws(state)) if check else None
        state = instance.sample_action(flaw, state, rng)
        if full:
            traj.steps.append(
                Step(flaw, parent, state, tuple(instance.present_flaws(state)), instance.digest(state))
            )
        elif keep:
            traj.steps.append(Step(flaw, parent))
        stack.append(_Frame(flaw, n, before))
        n += 1
    traj.final = state
    traj.n_steps = n
    return traj


def _check_return(instance, frame: _Frame, state, nb) -> None:
    if nb is None:
        nb = instance.declared_neighborhood(frame.flaw)
    extra = [
        g for g in instance.present_flaws(state)
        if g not in frame.present or g == frame.flaw or g in nb
    ]
    if extra:
        raise PropositionViolation(
            f"ADDRESS({frame.flaw!r}) returned with flaws {extra[:5]!r} outside the allowed set"
        )


def run_walk(instance: FlawInstance, engine: str, config: WalkConfig | None = None) -> Trajectory:
    if engine == PERMUTATION:
        return permutation_walk(instance, config)
    if engine == RECURSIVE:
        return recursive_walk(instance, config)
    raise ValueError(f"unknown walk engine {engine!r}")


# ---------------------------------------------------------------------------
# trajectory log


def _jsonable(value):
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    return value


def _tuplify(value):
    if isinstance(value, list):
        return tuple(_tuplify(v) for v in value)
    return value


def write_trajectory_log(traj: Trajectory, instance: FlawInstance, fh: TextIO) -> None:
    def pair(f):
        return [_jsonable(instance.describe_flaw(f)), _jsonable(instance.flaw_key(f))]

    header = {"record": "header", "engine": traj.engine, "seed": traj.seed, "digest": traj.initial_digest}
    if traj.initial_present is not None:
        header["present"] = [pair(f) for f in traj.initial_present]
    fh.write(json.dumps(header) + "\n")
    for k, s in enumerate(traj.steps):
        rec = {
            "record": "step",
            "step": k,
            "flaw": _jsonable(instance.describe_flaw(s.flaw)),
            "key": _jsonable(instance.flaw_key(s.flaw)),
            "parent": s.parent,
            "digest": s.digest,
        }
        if s.present is not None:
            rec["present"] = [pair(f) for f in s.present]
        fh.write(json.dumps(rec) + "\n")
    fh.write(json.dumps({"record": "end", "outcome": traj.outcome, "steps": len(traj)}) + "\n")


def read_trajectory_log(lines: Iterable[str]) -> Trajectory:
    """Rebuild a trajectory whose flaws are the logged descriptors."""
    keys: dict = {}
    traj = None
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FlawwalkError(f"trajectory log line {lineno}: {exc}") from None
        kind = rec.get("record")
        if kind == "header":
            present = None
            if "present" in rec:
                present = []
                for d, k in rec["present"]:
                    keys[_tuplify(d)] = _tuplify(k)
                    present.append(_tuplify(d))
                present = tuple(present)
            traj = Trajectory(
                rec["engine"], rec.get("digest"), seed=rec.get("seed"),
                initial_present=present, initial_digest=rec.get("digest"),
            )
        elif kind == "step":
            if traj is None:
                raise FlawwalkError(f"trajectory log line {lineno}: step before header")
            if rec["step"] != len(traj.steps):
                raise FlawwalkError(f"trajectory log line {lineno}: steps out of order")
            flaw = _tuplify(rec["flaw"])
            keys[flaw] = _tuplify(rec["key"])
            present = None
            if "present" in rec:
                present = []
                for d, k in rec["present"]:
                    keys[_tuplify(d)] = _tuplify(k)
                    present.append(_tuplify(d))
                present = tuple(present)
            traj.steps.append(Step(flaw, rec["parent"], rec.get("digest"), present, rec.get("digest")))
        elif kind == "end":
            if traj is None:
                raise FlawwalkError(f"trajectory log line {lineno}: end before header")
            traj.outcome = rec["outcome"]
        else:
            raise FlawwalkError(f"trajectory log line {lineno}: unknown record {kind!r}")
    if traj is None:
        raise FlawwalkError("empty trajectory log")
    traj.key = keys.__getitem__
    return traj
