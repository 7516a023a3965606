"""Causality digraphs, dependency graphs and independent-subset enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, Iterator, Mapping

from .core import ExplicitInstance, FlawInstance, ImplicitInstanceError

WITNESSED = "witnessed"
DECLARED = "declared"


@dataclass
class CausalityGraph:
    """Digraph on flaws.  ``provenance[(i, j)]`` says how arc i->j is known."""

    nodes: tuple
    arcs: dict[Hashable, frozenset] = field(default_factory=dict)
    provenance: dict[tuple, str] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Hashable, Iterable], nodes=None, provenance=DECLARED):
        nodes = tuple(nodes) if nodes is not None else tuple(mapping)
        arcs = {f: frozenset(mapping.get(f, ())) for f in nodes}
        prov = {(i, j): provenance for i in nodes for j in arcs[i]}
        return cls(nodes, arcs, prov)

    def out(self, flaw) -> frozenset:
        """Gamma_R(flaw)."""
        return self.arcs.get(flaw, frozenset())

    def __getitem__(self, flaw) -> frozenset:
        return self.out(flaw)

    def has_arc(self, i, j) -> bool:
        return j in self.out(i)

    def arc_list(self) -> list[tuple]:
        return [(i, j) for i in self.nodes for j in self.nodes if j in self.out(i)]

    def contains(self, other: "CausalityGraph") -> bool:
        """True when every arc of ``other`` is an arc of this graph."""
        return all(self.has_arc(i, j) for i, j in other.arc_list())

    def with_arcs(self, extra: Iterable[tuple]) -> "CausalityGraph":
        arcs = {f: set(nb) for f, nb in self.arcs.items()}
        prov = dict(self.provenance)
        for i, j in extra:
            arcs.setdefault(i, set()).add(j)
            prov.setdefault((i, j), DECLARED)
        return CausalityGraph(self.nodes, {f: frozenset(v) for f, v in arcs.items()}, prov)

    def to_text(self) -> str:
        return "".join(f"{i} -> {j} {self.provenance.get((i, j), DECLARED)}\n" for i, j in self.arc_list())


def build_causality(instance: FlawInstance) -> CausalityGraph:
    """Exact potential causality digraph by scanning every arc.

    f_i causes f_j on an arc sigma -> tau labelled i when tau is in f_j and
    either f_i = f_j or sigma is not in f_j.
    """
    if not isinstance(instance, ExplicitInstance):
        raise ImplicitInstanceError("build_causality needs an explicit instance; use a declared graph")
    arcs: dict = {f: set() for f in instance.order}
    for i in instance.order:
        for s in instance.flaws[i]:
            before = set(instance.present_flaws(s))
            for t, _ in instance.actions(i, s):
                for j in instance.present_flaws(t):
                    if j == i or j not in before:
                        arcs[i].add(j)
    prov = {(i, j): WITNESSED for i, nb in arcs.items() for j in nb}
    return CausalityGraph(instance.order, {f: frozenset(v) for f, v in arcs.items()}, prov)


class DependencyGraph:
    """Undirected graph on flaws: {f, g} is an edge iff f->g and g->f are arcs of R.

    Self-loops of R are dropped; a flaw is never dependent on itself.
    """

    def __init__(self, nodes: Iterable, adjacency: Mapping[Hashable, Iterable] | None = None):
        self.nodes = tuple(nodes)
        self.adj: dict = {f: set() for f in self.nodes}
        for f, nb in (adjacency or {}).items():
            for g in nb:
                if g != f:
                    self.adj.setdefault(f, set()).add(g)
                    self.adj.setdefault(g, set()).add(f)

    def neighbors(self, f) -> set:
        return self.adj.get(f, set())

    def adjacent(self, f, g) -> bool:
        return g in self.adj.get(f, ())

    def edges(self) -> list[tuple]:
        seen = []
        pos = {f: k for k, f in enumerate(self.nodes)}
        for f in self.nodes:
            for g in self.adj[f]:
                if pos.get(f, 0) < pos.get(g, 0):
                    seen.append((f, g))
        return seen

    def is_independent(self, subset: Iterable) -> bool:
        subset = list(subset)
        return not any(self.adjacent(a, b) for k, a in enumerate(subset) for b in subset[k + 1:])

    def to_text(self) -> str:
        return "".join(f"{f} -- {g}\n" for f, g in self.edges())


def dependency_graph(R: CausalityGraph) -> DependencyGraph:
    adj = {i: {j for j in R.out(i) if j != i and R.has_arc(j, i)} for i in R.nodes}
    return DependencyGraph(R.nodes, adj)


def independent_subsets(S: Iterable, G: DependencyGraph) -> Iterator[frozenset]:
    """Every subset of S that is independent in G, each exactly once (including the empty set)."""
    items = list(dict.fromkeys(S))

    def rec(k: int, chosen: frozenset, blocked: frozenset):
        if k == len(items):
            yield chosen
            return
        v = items[k]
        yield from rec(k + 1, chosen, blocked)
        if v not in blocked:
            yield from rec(k + 1, chosen | {v}, blocked | G.neighbors(v))

    yield from rec(0, frozenset(), frozenset())


def independent_weight(S: Iterable, G: DependencyGraph, weight: Mapping) -> float:
    """Sum over independent subsets of S of the product of their weights.

    Uses vertex elimination: W(S) = W(S - v) + w_v * W(S - v - N(v)).
    """
    items = tuple(dict.fromkeys(S))

    @lru_cache(maxsize=None)
    def rec(rest: frozenset) -> float:
        if not rest:
            return 1.0
        v = min(rest, key=items.index)
        without = rest - {v}
        return rec(without) + weight[v] * rec(without - G.neighbors(v))

    return rec(frozenset(items))
