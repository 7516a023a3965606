"""Exact verification on small explicit instances.

Every trajectory of a walk is expanded depth-first up to ``t`` steps and its
probability theta(sigma_1) * prod rho is accumulated per witness sequence.
The bounds on witness-sequence probabilities are then checked sequence by
sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .charges import check_regeneration, is_atomic
from .core import (
    TOL,
    ExplicitInstance,
    FlawInstance,
    FlawwalkError,
    ImplicitInstanceError,
    Step,
    Trajectory,
    max_ratio,
)
from .walks import PERMUTATION, RECURSIVE, _Frame, next_invocation, resolve_relation

MAX_LEAVES = 10_000_000


class OracleBudgetExceeded(FlawwalkError):
    """The trajectory tree has more leaves than the enumeration guard allows."""


class PreconditionFailed(FlawwalkError):
    """The instance does not satisfy the hypotheses of the check requested."""


@dataclass
class TrajectoryRecord:
    states: tuple
    probability: float
    parents: tuple = ()


@dataclass
class WitnessDistribution:
    t: int
    probabilities: dict = field(default_factory=dict)
    ended_early: float = 0.0
    best: dict = field(default_factory=dict)
    trajectories: dict = field(default_factory=dict)
    leaves: int = 0

    @property
    def total(self) -> float:
        return math.fsum(self.probabilities.values()) + self.ended_early

    def normalization_error(self) -> float:
        return abs(self.total - 1.0)


def _explicit(instance: FlawInstance) -> ExplicitInstance:
    if not isinstance(instance, ExplicitInstance):
        raise ImplicitInstanceError(f"{instance.name}: exact enumeration needs an explicit instance")
    return instance


def enumerate_witnesses(
    instance: FlawInstance,
    engine: str,
    t: int,
    *,
    R=None,
    prune: float = 0.0,
    keep_trajectories: bool = False,
    max_leaves: int = MAX_LEAVES,
) -> WitnessDistribution:
    """Exact law of the first ``t`` flaws addressed by ``engine``.

    Runs that reach a sink before ``t`` steps contribute to ``ended_early``.
    ``prune`` > 0 drops branches whose probability falls below it
    (exploratory use only; verification keeps it at 0).
    """
    inst = _explicit(instance)
    if engine not in (PERMUTATION, RECURSIVE):
        raise ValueError(f"unknown walk engine {engine!r}")
    relation = resolve_relation(inst, R) if engine == RECURSIVE else None

    def neighborhood(f):
        return relation.get(f, frozenset())

    dist = WitnessDistribution(t)
    acc: dict = {}
    early: list[float] = []

    def leaf(witness, states, parents, p):
        dist.leaves += 1
        if dist.leaves > max_leaves:
            raise OracleBudgetExceeded(f"more than {max_leaves} trajectories at t={t}")
        if len(witness) < t:
            early.append(p)
            return
        w = tuple(witness)
        acc.setdefault(w, []).append(p)
        if w not in dist.best or p > dist.best[w].probability:
            dist.best[w] = TrajectoryRecord(tuple(states), p, tuple(parents))
        if keep_trajectories:
            dist.trajectories.setdefault(w, []).append(TrajectoryRecord(tuple(states), p, tuple(parents)))

    # pending branches: (state, call stack, witness, states, parents, probability)
    pending = [(s, [], [], [s], [], p) for s, p in reversed(inst.initial_support())]
    while pending:
        state, stack, witness, states, parents, p = pending.pop()
        if len(witness) == t:
            leaf(witness, states, parents, p)
            continue
        if engine == PERMUTATION:
            present = inst.present_flaws(state)
            flaw = present[0] if present else None
            parent = -1
        else:
            stack = list(stack)
            flaw, parent, _ = next_invocation(inst, state, stack, neighborhood)
        if flaw is None:
            leaf(witness, states, parents, p)
            continue
        index = len(witness)
        for target, q in reversed(inst.actions(flaw, state)):
            pq = p * q
            if prune and pq < prune:
                continue
            new_stack = stack + [_Frame(flaw, index, None)] if engine == RECURSIVE else stack
            pending.append(
                (target, new_stack, witness + [flaw], states + [target], parents + [parent], pq)
            )

    dist.probabilities = {w: math.fsum(ps) for w, ps in acc.items()}
    dist.ended_early = math.fsum(early)
    return dist


def trajectory_from_record(
    instance: ExplicitInstance, engine: str, witness: tuple, rec: TrajectoryRecord
) -> Trajectory:
    """Full-level :class:`Trajectory` for an enumerated trajectory."""
    states = rec.states
    steps = [
        Step(f, rec.parents[k] if rec.parents else -1, states[k + 1],
             tuple(instance.present_flaws(states[k + 1])), str(states[k + 1]))
        for k, f in enumerate(witness)
    ]
    return Trajectory(
        engine, states[0], steps,
        initial_present=tuple(instance.present_flaws(states[0])),
        initial_digest=str(states[0]), key=instance.flaw_key, final=states[-1],
    )


@dataclass
class BoundReport:
    name: str
    passed: bool
    checked: int
    violations: list = field(default_factory=list)
    max_ratio: float = 0.0
    min_ratio: float = math.inf
    precondition: str | None = None
    details: dict = field(default_factory=dict)

    def to_text(self) -> str:
        head = f"{self.name}: {'PASS' if self.passed else 'FAIL'}"
        if self.precondition:
            return f"{head} (precondition: {self.precondition})\n"
        lines = [
            head,
            f"  sequences checked: {self.checked}",
            f"  ratio range: [{self.min_ratio:.6g}, {self.max_ratio:.6g}]",
        ]
        for k, v in self.details.items():
            lines.append(f"  {k}: {v}")
        for w, why in self.violations[:10]:
            lines.append(f"  violation {list(w)}: {why}")
        return "\n".join(lines) + "\n"


def verify_lemma1(
    instance: FlawInstance,
    engine: str,
    t: int,
    charges: Mapping,
    *,
    R=None,
    dist: WitnessDistribution | None = None,
) -> BoundReport:
    """Pr[W_t = W] <= xi * prod gamma over every witness sequence W of length t."""
    inst = _explicit(instance)
    dist = dist or enumerate_witnesses(inst, engine, t, R=R)
    xi = max_ratio(inst)
    report = BoundReport("witness bound", True, 0)
    for w, p in dist.probabilities.items():
        if p <= 0:
            continue
        bound = xi * math.prod(charges[f] for f in w)
        ratio = p / bound
        report.checked += 1
        report.max_ratio = max(report.max_ratio, ratio)
        report.min_ratio = min(report.min_ratio, ratio)
        if p > bound * (1 + TOL) + TOL * 1e-3:
            report.violations.append((w, f"Pr={p:.6g} > bound={bound:.6g}"))
    report.passed = not report.violations
    report.details = {"xi": xi, "t": t, "normalization_error": dist.normalization_error()}
    return report


def tightness_precondition(instance: ExplicitInstance) -> str | None:
    if not is_atomic(instance):
        return "action digraph is not atomic"
    bad = [i for i in instance.order if not check_regeneration(instance, i).passed]
    if bad:
        return f"no regeneration at flaws {bad}"
    low = [s for s, p in instance.initial_support() if p < instance.mu[s] * (1 - TOL)]
    if low:
        return f"theta < mu at support states {low[:5]}"
    return None


def verify_tightness(
    instance: FlawInstance,
    engine: str,
    t: int,
    *,
    R=None,
    dist: WitnessDistribution | None = None,
) -> BoundReport:
    """beta <= Pr[W_t = W] / prod mu(w_i) <= 1/beta with beta = min mu.

    Also checks that every trajectory has probability
    theta(s1)/mu(s1) * mu(s_{t+1}) * prod mu(w_i), the closed form forced by
    atomicity plus regeneration, and that the most likely trajectory of each
    sequence already certifies the lower side.
    """
    inst = _explicit(instance)
    why = tightness_precondition(inst)
    if why is not None:
        raise PreconditionFailed(f"{inst.name}: {why}")
    dist = dist or enumerate_witnesses(inst, engine, t, R=R, keep_trajectories=True)
    beta = min(inst.mu.values())
    masses = {f: inst.measure_of_flaw(f) for f in inst.order}
    report = BoundReport("two-sided bound", True, 0)
    identity_dev = 0.0
    for w, p in dist.probabilities.items():
        if p <= 0:
            continue
        base = math.prod(masses[f] for f in w)
        ratio = p / base
        report.checked += 1
        report.max_ratio = max(report.max_ratio, ratio)
        report.min_ratio = min(report.min_ratio, ratio)
        if ratio > (1 + TOL) / beta:
            report.violations.append((w, f"ratio {ratio:.6g} > 1/beta"))
        if ratio < beta * (1 - TOL):
            report.violations.append((w, f"ratio {ratio:.6g} < beta"))
        best = dist.best[w]
        if best.probability < beta * base * (1 - TOL):
            report.violations.append((w, "most likely trajectory falls below beta * prod mu"))
        for rec in dist.trajectories.get(w, ()):
            s1, last = rec.states[0], rec.states[-1]
            closed = inst.theta[s1] / inst.mu[s1] * inst.mu[last] * base
            identity_dev = max(identity_dev, abs(rec.probability - closed))
    if identity_dev > TOL:
        report.violations.append(((), f"trajectory closed form off by {identity_dev:.3g}"))
    report.passed = not report.violations
    report.details = {"beta": beta, "t": t, "closed_form_deviation": identity_dev}
    return report
