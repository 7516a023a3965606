"""Flaws/actions instances: the contract every walk and analysis consumes.

An instance is a finite state space with a family of flaws (sets of bad
states), for each present flaw a non-empty action set with transition
probabilities, a strictly positive measure and an initial distribution.

Two flavors share one interface:

* :class:`ExplicitInstance` enumerates every state and arc.  The exact
  oracles and the charge/causality scans need this flavor.
* Implicit instances (``sat.MTInstance``, ``aec.AecInstance``) encode states
  and discover flaws lazily; they supply analytic charges and declared
  causality instead.

States and flaws are hashable values.  The flaw order used by the walks is
given by :meth:`FlawInstance.flaw_key`: sorting ascending by key lists flaws
from greatest to least, so the flaw a walk addresses is the one with the
smallest key.
"""

from __future__ import annotations

import bisect
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

TOL = 1e-9


class FlawwalkError(Exception):
    """Base class for errors raised by this package."""


class InstanceError(FlawwalkError, ValueError):
    """An instance violates the flaws/actions contract or cannot be parsed."""


class ImplicitInstanceError(FlawwalkError):
    """An operation that needs an enumerable state space got an implicit instance."""


class SpanUnavailable(FlawwalkError):
    """The initial distribution has no enumerable support and no declared span."""


def make_rng(seed: int | random.Random | None) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


def sample_index(cumulative: Sequence[float], u: float) -> int:
    """Inverse-CDF draw: first index whose cumulative weight exceeds ``u``."""
    k = bisect.bisect_right(cumulative, u)
    return min(k, len(cumulative) - 1)


class FlawInstance:
    """Base class for flaws/actions instances.

    Subclasses implement ``is_flawed``, ``present_flaws``, ``flaw_key``,
    ``sample_action`` and ``sample_initial``; the rest have defaults or are
    only needed by explicit-instance analyses.
    """

    explicit = False
    name = "instance"

    def is_flawed(self, flaw, state) -> bool:
        raise NotImplementedError

    def present_flaws(self, state) -> list:
        """U(state), greatest flaw first."""
        raise NotImplementedError

    def flaw_key(self, flaw):
        raise NotImplementedError

    def greatest(self, flaws: Iterable):
        return min(flaws, key=self.flaw_key)

    def guard_flaws(self, flaw, state, neighborhood: Iterable | None) -> list:
        """Present flaws that lie in ``neighborhood`` (greatest first).

        ``neighborhood`` is the out-neighborhood of ``flaw`` in the digraph
        driving the recursive walk; ``None`` means the instance's declared one.
        """
        if neighborhood is None:
            neighborhood = self.declared_neighborhood(flaw)
        nb = neighborhood if hasattr(neighborhood, "__contains__") else set(neighborhood)
        return [g for g in self.present_flaws(state) if g in nb]

    def declared_neighborhood(self, flaw):
        raise FlawwalkError(f"{self.name}: no declared causality supergraph")

    def actions(self, flaw, state) -> Sequence[tuple[Any, float]]:
        raise ImplicitInstanceError(f"{self.name}: action sets are not enumerable")

    def sample_action(self, flaw, state, rng: random.Random):
        acts = self.actions(flaw, state)
        cum = list(itertools.accumulate(p for _, p in acts))
        return acts[sample_index(cum, rng.random())][0]

    def measure(self, state) -> float:
        raise ImplicitInstanceError(f"{self.name}: measure is not evaluable")

    def sample_initial(self, rng: random.Random):
        raise NotImplementedError

    def initial_support(self) -> list[tuple[Any, float]] | None:
        """Enumerated support of the initial distribution, or ``None``."""
        return None

    def declared_span(self) -> set | None:
        return None

    def declared_ratio(self) -> float | None:
        """An upper bound on max theta/mu when the support is not enumerable."""
        return None

    def digest(self, state) -> str:
        return str(state)

    def describe_flaw(self, flaw):
        """JSON-serializable descriptor of ``flaw``."""
        return flaw


class ExplicitInstance(FlawInstance):
    """Fully enumerated instance.

    ``flaws`` maps each flaw name to its member states, ``arcs`` maps
    ``(flaw, state)`` for every member state to a list of
    ``(target, probability)`` pairs.  ``order`` lists flaws greatest first
    (default: declaration order).  ``relation`` optionally declares a digraph
    R on flaws as ``{flaw: neighbors}``.
    """

    explicit = True

    def __init__(
        self,
        states: Sequence[Hashable],
        flaws: Mapping[Hashable, Iterable],
        arcs: Mapping[tuple, Sequence[tuple[Hashable, float]]],
        mu: Mapping[Hashable, float],
        theta: Mapping[Hashable, float],
        *,
        order: Sequence[Hashable] | None = None,
        relation: Mapping[Hashable, Iterable] | None = None,
        name: str = "instance",
    ):
        self.name = name
        self.states = tuple(states)
        self.flaws = {f: frozenset(m) for f, m in flaws.items()}
        self.order = tuple(order) if order is not None else tuple(self.flaws)
        self.arcs = {k: tuple((t, float(p)) for t, p in v) for k, v in arcs.items()}
        self.mu = {s: float(mu[s]) for s in self.states}
        self.theta = {s: float(theta.get(s, 0.0)) for s in self.states}
        self.relation = (
            None if relation is None else {f: frozenset(relation.get(f, ())) for f in self.flaws}
        )
        self._rank = {f: k for k, f in enumerate(self.order)}
        self._validate()
        self._present = {
            s: tuple(f for f in self.order if s in self.flaws[f]) for s in self.states
        }
        self._cum = {k: list(itertools.accumulate(p for _, p in v)) for k, v in self.arcs.items()}
        support = [s for s in self.states if self.theta[s] > 0]
        self._theta_states = support
        self._theta_cum = list(itertools.accumulate(self.theta[s] for s in support))

    def _validate(self) -> None:
        index = set(self.states)
        if len(index) != len(self.states):
            raise InstanceError(f"{self.name}: duplicate state names")
        if set(self.order) != set(self.flaws) or len(self.order) != len(self.flaws):
            raise InstanceError(f"{self.name}: flaw order must list every flaw exactly once")
        for s in self.states:
            if not self.mu[s] > 0:
                raise InstanceError(f"{self.name}: mu({s}) must be positive")
            if self.theta[s] < 0:
                raise InstanceError(f"{self.name}: theta({s}) is negative")
        if abs(sum(self.mu.values()) - 1) > TOL:
            raise InstanceError(f"{self.name}: mu does not sum to 1")
        if abs(sum(self.theta.values()) - 1) > TOL:
            raise InstanceError(f"{self.name}: theta does not sum to 1")
        for f, members in self.flaws.items():
            if not members <= index:
                raise InstanceError(f"{self.name}: flaw {f} has unknown member states")
            for s in members:
                acts = self.arcs.get((f, s))
                if not acts:
                    raise InstanceError(f"{self.name}: A({f},{s}) is empty")
                targets = [t for t, _ in acts]
                if len(set(targets)) != len(targets):
                    raise InstanceError(f"{self.name}: A({f},{s}) lists a target twice")
                if set(targets) == {s}:
                    raise InstanceError(f"{self.name}: A({f},{s}) = {{{s}}}")
                if not set(targets) <= index:
                    raise InstanceError(f"{self.name}: A({f},{s}) has unknown targets")
                if any(p <= 0 for _, p in acts):
                    raise InstanceError(f"{self.name}: rho_{f}({s},.) has non-positive entries")
                if abs(sum(p for _, p in acts) - 1) > TOL:
                    raise InstanceError(f"{self.name}: rho_{f}({s},.) does not sum to 1")
        for (f, s) in self.arcs:
            if f not in self.flaws or s not in self.flaws[f]:
                raise InstanceError(f"{self.name}: arcs given for {f} at non-member {s}")
        if self.relation is not None:
            for f, nb in self.relation.items():
                if not nb <= set(self.flaws):
                    raise InstanceError(f"{self.name}: relation of {f} names unknown flaws")

    def __eq__(self, other):
        if not isinstance(other, ExplicitInstance):
            return NotImplemented
        return (
            self.name == other.name
            and self.states == other.states
            and self.flaws == other.flaws
            and self.order == other.order
            and self.arcs == other.arcs
            and self.mu == other.mu
            and self.theta == other.theta
            and self.relation == other.relation
        )

    __hash__ = None

    def __repr__(self):
        return f"ExplicitInstance({self.name!r}, |states|={len(self.states)}, flaws={list(self.order)})"

    def is_flawed(self, flaw, state) -> bool:
        return state in self.flaws[flaw]

    def present_flaws(self, state) -> list:
        return list(self._present[state])

    def flaw_key(self, flaw):
        return self._rank[flaw]

    def declared_neighborhood(self, flaw):
        if self.relation is None:
            raise FlawwalkError(f"{self.name}: no declared relation; pass R explicitly")
        return self.relation[flaw]

    def actions(self, flaw, state):
        return self.arcs[(flaw, state)]

    def sample_action(self, flaw, state, rng):
        key = (flaw, state)
        return self.arcs[key][sample_index(self._cum[key], rng.random())][0]

    def measure(self, state) -> float:
        return self.mu[state]

    def sample_initial(self, rng):
        return self._theta_states[sample_index(self._theta_cum, rng.random())]

    def initial_support(self):
        return [(s, self.theta[s]) for s in self._theta_states]

    def measure_of_flaw(self, flaw) -> float:
        return math.fsum(self.mu[s] for s in self.flaws[flaw])

    def with_rho(self, arcs: Mapping[tuple, Sequence[tuple[Hashable, float]]], name: str | None = None):
        """Copy of this instance with the transition probabilities replaced."""
        return ExplicitInstance(
            self.states, self.flaws, arcs, self.mu, self.theta,
            order=self.order, relation=self.relation, name=name or self.name,
        )

    def with_theta(self, theta: Mapping[Hashable, float], name: str | None = None):
        return ExplicitInstance(
            self.states, self.flaws, self.arcs, self.mu, theta,
            order=self.order, relation=self.relation, name=name or self.name,
        )


# ---------------------------------------------------------------------------
# generic operations


def present_flaws(instance: FlawInstance, state) -> list:
    return instance.present_flaws(state)


def sample_initial(instance: FlawInstance, rng) -> Any:
    return instance.sample_initial(make_rng(rng))


def span(instance: FlawInstance) -> set:
    """Flaws that may be present in an initial state."""
    support = instance.initial_support()
    if support is not None:
        out = set()
        for s, _ in support:
            out.update(instance.present_flaws(s))
        return out
    declared = instance.declared_span()
    if declared is None:
        raise SpanUnavailable(f"{instance.name}: initial support is not enumerable")
    return set(declared)


def max_ratio(instance: FlawInstance) -> float:
    """max over states of theta/mu (the prefactor of the witness bounds)."""
    support = instance.initial_support()
    if support is not None:
        return max(p / instance.measure(s) for s, p in support)
    bound = instance.declared_ratio()
    if bound is None:
        raise SpanUnavailable(f"{instance.name}: cannot bound theta/mu without an enumerable support")
    return bound


def check_stochastic(instance: ExplicitInstance) -> float:
    """Largest deviation of any rho_i(sigma, .) row sum from 1."""
    return max(
        (abs(math.fsum(p for _, p in acts) - 1) for acts in instance.arcs.values()),
        default=0.0,
    )


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Step:
    """One ADDRESS invocation: the flaw addressed and the state it led to."""

    flaw: Hashable
    parent: int = -1
    state: Any = None
    present: tuple | None = None
    digest: str | None = None


@dataclass
class Trajectory:
    engine: str
    initial: Any
    steps: list[Step] = field(default_factory=list)
    outcome: str = "sink"
    seed: int | None = None
    initial_present: tuple | None = None
    initial_digest: str | None = None
    key: Callable | None = None
    final: Any = None
    n_steps: int | None = None

    @property
    def witness(self) -> tuple:
        return tuple(s.flaw for s in self.steps)

    @property
    def parents(self) -> tuple:
        return tuple(s.parent for s in self.steps)

    def __len__(self):
        return len(self.steps) if self.n_steps is None else self.n_steps

    def states(self) -> list:
        return [self.initial] + [s.state for s in self.steps]

    def present_sets(self) -> list[tuple]:
        """U(sigma_1), ..., U(sigma_{t+1}); needs a full-level recording."""
        if self.initial_present is None or any(s.present is None for s in self.steps):
            raise FlawwalkError("trajectory was not recorded at the full level")
        return [self.initial_present] + [s.present for s in self.steps]


def replay_check(instance: FlawInstance, traj: Trajectory) -> None:
    """Raise if a full trajectory has a step that is not an arc of the instance."""
    states = traj.states()
    for k, step in enumerate(traj.steps):
        src, dst = states[k], states[k + 1]
        if not instance.is_flawed(step.flaw, src):
            raise FlawwalkError(f"step {k}: flaw {step.flaw!r} not present in source state")
        if instance.explicit and dst not in {t for t, _ in instance.actions(step.flaw, src)}:
            raise FlawwalkError(f"step {k}: target is not an action of {step.flaw!r}")


# ---------------------------------------------------------------------------
# text format
#
#   name <word>
#   state <name> <mu> <theta>
#   flaw <name> <member> ...
#   arc <flaw> <source> <target> <probability>
#   order <flaw> ...             (greatest first; optional)
#   relation <flaw> <flaw> ...   (declared out-neighbors; optional)
#
# '#' starts a comment.  Numbers accept decimal or fraction syntax (1/4);
# the writer emits shortest round-trip float reprs, so parse/format is lossless.


def _number(token: str, lineno: int) -> float:
    try:
        return float(Fraction(token))
    except (ValueError, ZeroDivisionError):
        raise InstanceError(f"line {lineno}: bad number {token!r}") from None


def parse_instance(text: str) -> ExplicitInstance:
    name = "instance"
    states: list[str] = []
    mu: dict[str, float] = {}
    theta: dict[str, float] = {}
    flaws: dict[str, list[str]] = {}
    arcs: dict[tuple[str, str], list[tuple[str, float]]] = {}
    order = None
    relation: dict[str, list[str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "name" and len(rest) == 1:
            name = rest[0]
        elif head == "state" and len(rest) == 3:
            s = rest[0]
            if s in mu:
                raise InstanceError(f"line {lineno}: duplicate state {s}")
            states.append(s)
            mu[s] = _number(rest[1], lineno)
            theta[s] = _number(rest[2], lineno)
        elif head == "flaw" and len(rest) >= 1:
            if rest[0] in flaws:
                raise InstanceError(f"line {lineno}: duplicate flaw {rest[0]}")
            flaws[rest[0]] = rest[1:]
        elif head == "arc" and len(rest) == 4:
            arcs.setdefault((rest[0], rest[1]), []).append((rest[2], _number(rest[3], lineno)))
        elif head == "order" and rest:
            order = rest
        elif head == "relation" and rest:
            if relation is None:
                relation = {}
            relation.setdefault(rest[0], []).extend(rest[1:])
        else:
            raise InstanceError(f"line {lineno}: cannot parse {raw.strip()!r}")
    try:
        return ExplicitInstance(
            states, flaws, arcs, mu, theta, order=order, relation=relation, name=name
        )
    except KeyError as exc:
        raise InstanceError(f"unknown state or flaw {exc}") from None


def format_instance(inst: ExplicitInstance) -> str:
    lines = [f"name {inst.name}"]
    for s in inst.states:
        lines.append(f"state {s} {inst.mu[s]!r} {inst.theta[s]!r}")
    for f in inst.flaws:
        members = [s for s in inst.states if s in inst.flaws[f]]
        lines.append(" ".join(["flaw", str(f), *map(str, members)]))
    for f in inst.flaws:
        for s in inst.states:
            for t, p in inst.arcs.get((f, s), ()):
                lines.append(f"arc {f} {s} {t} {p!r}")
    lines.append(" ".join(["order", *map(str, inst.order)]))
    if inst.relation is not None:
        for f in inst.flaws:
            nb = [g for g in inst.order if g in inst.relation[f]]
            lines.append(" ".join(["relation", str(f), *map(str, nb)]) if nb else f"relation {f}")
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> ExplicitInstance:
    return parse_instance(Path(path).read_text())
