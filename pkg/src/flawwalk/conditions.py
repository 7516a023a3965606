"""Convergence conditions, the horizon T0, step bounds and the branching process.

All conditions share the shape

    zeta_i = (gamma_i / psi_i) * sum_{S in family(i)} prod_{j in S} psi_j

where the family is every subset of Gamma(i) (simple), the subsets that are
independent in the dependency graph (cluster), or a caller-supplied List(f_i)
(general).  A flaw passes when zeta_i <= 1 - STRICT.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .causality import CausalityGraph, DependencyGraph, dependency_graph, independent_weight
from .core import FlawwalkError
from .forests import ForestNode, WitnessForest

STRICT = 1e-9

SIMPLE = "simple"
CLUSTER = "cluster"
GENERAL = "general"


class ConditionFailed(FlawwalkError):
    """A step bound was requested for a failed condition (delta <= 0)."""


def prod_psi(S: Iterable, psi: Mapping) -> float:
    """Q(S) = prod_{g in S} psi_g (1 for the empty set)."""
    return math.prod(psi[g] for g in S)


def subset_sum(values: Iterable[float]) -> float:
    """sum over all subsets S of prod_{j in S} v_j, via the product prod (1 + v_j)."""
    return math.prod(1.0 + v for v in values)


def family_sum(family: Iterable[Iterable], psi: Mapping) -> float:
    return math.fsum(prod_psi(S, psi) for S in family)


def zeta_simple(gamma: float, psi_i: float, neighborhood_psi: Iterable[float]) -> float:
    return gamma / psi_i * subset_sum(neighborhood_psi)


def zeta_cluster(gamma: float, psi_i: float, neighborhood: Iterable, G: DependencyGraph, psi: Mapping) -> float:
    return gamma / psi_i * independent_weight(neighborhood, G, psi)


def zeta_general(gamma: float, psi_i: float, family: Iterable[Iterable], psi: Mapping) -> float:
    return gamma / psi_i * family_sum(family, psi)


@dataclass
class ConditionReport:
    variant: str
    gammas: dict
    zetas: dict
    T0: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def max_zeta(self) -> float:
        return max(self.zetas.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return all(z <= 1 - STRICT for z in self.zetas.values())

    @property
    def delta(self) -> float:
        return 1.0 - self.max_zeta

    def step_bound(self, s: float) -> int:
        if self.T0 is None:
            raise FlawwalkError("report has no T0")
        if not self.passed:
            raise ConditionFailed(f"condition failed (max zeta = {self.max_zeta:.6g})")
        return step_bound(self.T0, self.delta, s)

    def verdict(self, flaw) -> str:
        return "PASS" if self.zetas[flaw] <= 1 - STRICT else "FAIL"

    def to_records(self) -> list[str]:
        return [
            f"flaw={f} gamma={self.gammas[f]:.10g} zeta={z:.10g} verdict={self.verdict(f)}"
            for f, z in self.zetas.items()
        ]

    def to_text(self, s: float | None = None) -> str:
        lines = [f"# condition={self.variant}", "flaw\tgamma\tzeta\tverdict"]
        for f, z in self.zetas.items():
            lines.append(f"{f}\t{self.gammas[f]:.10g}\t{z:.10g}\t{self.verdict(f)}")
        lines.append(f"max_zeta={self.max_zeta:.10g}")
        lines.append(f"delta={self.delta:.10g}")
        if self.T0 is not None:
            lines.append(f"T0={self.T0:.10g}")
            if s is not None and self.passed:
                lines.append(f"step_bound(s={s:g})={self.step_bound(s)}")
        lines.append("verdict=" + ("PASS" if self.passed else "FAIL"))
        lines.extend(f"# {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def evaluate(
    gammas: Mapping,
    psi: Mapping,
    R: CausalityGraph,
    variant: str = SIMPLE,
    *,
    lists: Mapping | None = None,
    T0: float | None = None,
) -> ConditionReport:
    """zeta_i for every flaw in ``gammas`` under the requested variant."""
    zetas = {}
    if variant == SIMPLE:
        for f, g in gammas.items():
            zetas[f] = zeta_simple(g, psi[f], (psi[j] for j in R.out(f)))
    elif variant == CLUSTER:
        G = dependency_graph(R)
        for f, g in gammas.items():
            zetas[f] = zeta_cluster(g, psi[f], R.out(f), G, psi)
    elif variant == GENERAL:
        if lists is None:
            raise ValueError("general variant needs List(f) families")
        for f, g in gammas.items():
            zetas[f] = zeta_general(g, psi[f], lists[f], psi)
    else:
        raise ValueError(f"unknown condition variant {variant!r}")
    return ConditionReport(variant, dict(gammas), zetas, T0)


def horizon_T0(
    xi: float,
    psi: Mapping,
    span: Iterable,
    roots: str | Iterable[Iterable] = "all",
    G: DependencyGraph | None = None,
) -> float:
    """log2(max theta/mu) + log2(sum over the root family of prod psi).

    ``roots`` is ``"all"`` (every subset of the span), ``"ind"`` (subsets
    independent in ``G``) or an explicit family of sets.
    """
    span = list(span)
    if roots == "all":
        log_sum = math.fsum(math.log1p(psi[j]) for j in span)
    elif roots == "ind":
        if G is None:
            raise ValueError("roots='ind' needs the dependency graph")
        log_sum = math.log(independent_weight(span, G, psi))
    else:
        log_sum = math.log(family_sum(roots, psi))
    return (math.log(xi) + log_sum) / math.log(2)


def step_bound(T0: float, delta: float, s: float) -> int:
    """ceil((T0 + s) / delta)."""
    if not delta > 0:
        raise ConditionFailed(f"delta must be positive, got {delta}")
    return math.ceil((T0 + s) / delta - 1e-12)


def best_uniform_psi(
    gammas: Mapping, R: CausalityGraph, variant: str = SIMPLE, grid: Sequence[float] | None = None
) -> tuple[float, ConditionReport]:
    """Constant psi from a log grid minimizing the largest zeta (symmetric instances)."""
    grid = grid or [10 ** (k / 20) for k in range(-80, 41)]
    best = None
    for value in grid:
        rep = evaluate(gammas, {f: value for f in R.nodes}, R, variant)
        if best is None or rep.max_zeta < best[1].max_zeta:
            best = (value, rep)
    return best


@dataclass
class LLLReport:
    passed: bool
    values: dict
    lower_bound: float | None


def check_general_lll(probs: Mapping, deps: Mapping, psi: Mapping) -> LLLReport:
    """(mu(A_i)/psi_i) * sum over S subset of {i} u D(i) of prod psi <= 1 for every event.

    On success the report carries the non-constructive lower bound
    prod_i 1/(1 + psi_i) on the probability that no event occurs.
    """
    values = {}
    for i, p in probs.items():
        block = {i} | set(deps.get(i, ()))
        values[i] = p / psi[i] * subset_sum(psi[j] for j in block)
    passed = all(v <= 1 + STRICT for v in values.values())
    lower = math.prod(1.0 / (1.0 + psi[i]) for i in probs) if passed else None
    return LLLReport(passed, values, lower)


# ---------------------------------------------------------------------------
# branching process over witness forests


def _as_family(family: Iterable[Iterable]) -> list[frozenset]:
    return [frozenset(S) for S in family]


def forest_probability(forest: WitnessForest, psi: Mapping, roots: Iterable[Iterable], lists: Mapping) -> float:
    """Probability that the branching process produces exactly ``forest``."""
    roots = _as_family(roots)
    root_labels = [n.label for n in forest.roots]
    if len(set(root_labels)) != len(root_labels) or frozenset(root_labels) not in roots:
        raise FlawwalkError("forest roots are not an element of Roots")
    p = 1.0 / family_sum(roots, psi)
    for node in forest.nodes():
        fam = _as_family(lists.get(node.label, ()))
        kids = [c.label for c in node.children]
        if len(set(kids)) != len(kids) or frozenset(kids) not in fam:
            raise FlawwalkError(f"children of {node.label!r} are not an element of List")
        p *= psi[node.label] / family_sum(fam, psi)
    return p


def _birth(family: list[frozenset], psi: Mapping, rng: random.Random) -> frozenset:
    ground = sorted(set().union(*family), key=repr) if family else []
    x = {g: psi[g] / (1.0 + psi[g]) for g in ground}
    members = set(family)
    while True:
        S = frozenset(g for g in ground if rng.random() < x[g])
        if S in members:
            return S


def sample_branching_forest(
    psi: Mapping,
    roots: Iterable[Iterable],
    lists: Mapping,
    rng: random.Random,
    max_vertices: int,
    key: Callable | None = None,
) -> WitnessForest | None:
    """Run the rejection-sampling process; ``None`` once it exceeds ``max_vertices``."""
    roots = _as_family(roots)
    fams = {f: _as_family(v) for f, v in lists.items()}
    top = [ForestNode(label) for label in _birth(roots, psi, rng)]
    count = len(top)
    if count > max_vertices:
        return None
    frontier = list(top)
    while frontier:
        node = frontier.pop()
        kids = [ForestNode(label) for label in _birth(fams.get(node.label, [frozenset()]), psi, rng)]
        count += len(kids)
        if count > max_vertices:
            return None
        node.children = kids
        frontier.extend(kids)
    return WitnessForest(top, flavor="branching", key=key)


def enumerate_forests(
    roots: Iterable[Iterable], lists: Mapping, n_vertices: int, key: Callable | None = None
) -> list[WitnessForest]:
    """Every forest with exactly ``n_vertices`` vertices allowed by Roots and List."""
    roots = _as_family(roots)
    fams = {f: _as_family(v) for f, v in lists.items()}
    out: list[WitnessForest] = []

    def expand(pending: list[ForestNode], count: int, top: list[ForestNode]):
        if not pending:
            if count == n_vertices:
                out.append(WitnessForest([n.copy() for n in top], flavor="branching", key=key))
            return
        node, rest = pending[0], pending[1:]
        for S in fams.get(node.label, [frozenset()]):
            if count + len(S) > n_vertices:
                continue
            node.children = [ForestNode(g) for g in sorted(S, key=key or repr)]
            expand(rest + node.children, count + len(S), top)
        node.children = []

    for R0 in roots:
        if len(R0) > n_vertices:
            continue
        top = [ForestNode(g) for g in sorted(R0, key=key or repr)]
        expand(list(top), len(top), top)
    return out


@dataclass
class BoundChain:
    lhs: float
    rhs: float
    identity_sum: float
    max_zeta: float


def bound_chain(gammas: Mapping, psi: Mapping, roots, lists: Mapping, t: int) -> BoundChain:
    """Sum of prod gamma over t-vertex forests against (max zeta)^t * sum_{S in Roots} Q(S).

    ``identity_sum`` re-expresses the left side through p_phi and the zetas;
    it must equal ``lhs`` up to rounding.
    """
    zetas = {f: gammas[f] / psi[f] * family_sum(lists.get(f, [()]), psi) for f in gammas}
    zmax = max(zetas.values())
    root_sum = family_sum(roots, psi)
    lhs = ident = 0.0
    for phi in enumerate_forests(roots, lists, t):
        labels = [v.label for v in phi.nodes()]
        lhs += math.prod(gammas[l] for l in labels)
        ident += forest_probability(phi, psi, roots, lists) * root_sum * math.prod(zetas[l] for l in labels)
    return BoundChain(lhs, zmax ** t * root_sum, ident, zmax)
