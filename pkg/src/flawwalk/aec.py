"""Acyclic edge coloring of graphs of bounded degeneracy.

States are proper edge colorings with no bichromatic 4-cycle over a palette
of 2(Delta-1) + Q colors, Q = ceil(16 sqrt(d Delta)).  Flaws are bichromatic
even cycles (length >= 6), discovered lazily.  Addressing a cycle keeps its
two designated adjacent edges and recolors the rest in cycle order, each
edge drawing uniformly among its 4-available colors.  The recursive walk
runs with the edge-intersection relation: cycles sharing an edge depend on
each other.

Edges are numbered by sorted ``(u, v)`` with ``u < v``; colors are
``0 .. P-1`` and the color order prefers higher numbers.
"""

from __future__ import annotations

import hashlib
import math
import random
from array import array
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import kernels
from .causality import DependencyGraph, independent_weight
from .conditions import STRICT
from .core import FlawInstance, FlawwalkError, InstanceError, make_rng
from .walks import BUDGET, RECURSIVE, WalkConfig, run_walk


class GraphFormatError(InstanceError):
    """Malformed edge-list input."""


class WorkBudgetExceeded(FlawwalkError):
    """An exhaustive search exceeded its work budget."""


class DivergentSeries(FlawwalkError):
    """The cycle-weight series of the coloring condition does not converge."""


# ---------------------------------------------------------------------------
# graphs


class SimpleGraph:
    """Undirected simple graph on vertices ``0 .. n-1``."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        norm = set()
        for u, v in edges:
            if u == v:
                raise InstanceError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceError(f"edge ({u}, {v}) outside 0..{n - 1}")
            e = (min(u, v), max(u, v))
            if e in norm:
                raise InstanceError(f"repeated edge {e}")
            norm.add(e)
        self.n = n
        self.edges: list[tuple[int, int]] = sorted(norm)
        self.index = {e: k for k, e in enumerate(self.edges)}
        self.eu = array("i", (u for u, _ in self.edges))
        self.ev = array("i", (v for _, v in self.edges))
        incident: list[list[int]] = [[] for _ in range(n)]
        for k, (u, v) in enumerate(self.edges):
            incident[u].append(k)
            incident[v].append(k)
        self.incident = incident
        self.inc_off = array("i", [0])
        self.inc = array("i")
        for lst in incident:
            self.inc.extend(lst)
            self.inc_off.append(len(self.inc))
        self.adj = [set() for _ in range(n)]
        for u, v in self.edges:
            self.adj[u].add(v)
            self.adj[v].add(u)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def edge_id(self, u: int, v: int) -> int:
        return self.index[(min(u, v), max(u, v))]

    def other(self, e: int, x: int) -> int:
        return self.ev[e] if self.eu[e] == x else self.eu[e]

    def __repr__(self):
        return f"SimpleGraph(n={self.n}, m={self.m})"


def parse_edge_list(text: str) -> SimpleGraph:
    """``u v`` per line; labels are 1-based when 0 never occurs and 1 does."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two vertex labels")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: vertex labels must be integers") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex label")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at {u}")
        pairs.append((u, v, lineno))
    labels = {x for u, v, _ in pairs for x in (u, v)}
    shift = 1 if labels and 0 not in labels and 1 in labels else 0
    n = max(labels, default=-1) + 1 - shift
    seen = set()
    for u, v, lineno in pairs:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"line {lineno}: repeated edge {u} {v}")
        seen.add(key)
    return SimpleGraph(n, [(u - shift, v - shift) for u, v, _ in pairs])


def load_edge_list(path: str | Path) -> SimpleGraph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(graph: SimpleGraph) -> str:
    return "".join(f"{u} {v}\n" for u, v in graph.edges)


@dataclass
class Orientation:
    degeneracy: int
    order: list[int]
    out: list[list[int]]

    def max_out_degree(self) -> int:
        return max((len(o) for o in self.out), default=0)


def degeneracy_orient(graph: SimpleGraph) -> Orientation:
    """Peel minimum-degree vertices; each removed vertex points at its remaining neighbors."""
    deg = [len(a) for a in graph.adj]
    buckets: list[set[int]] = [set() for _ in range(max(deg, default=0) + 1)]
    for x, k in enumerate(deg):
        buckets[k].add(x)
    removed = [False] * graph.n
    order, out = [], [[] for _ in range(graph.n)]
    d = 0
    low = 0
    for _ in range(graph.n):
        low = max(0, low - 1)
        while not buckets[low]:
            low += 1
        x = min(buckets[low])
        buckets[low].discard(x)
        d = max(d, low)
        removed[x] = True
        order.append(x)
        for y in sorted(graph.adj[x]):
            if not removed[y]:
                out[x].append(y)
                buckets[deg[y]].discard(y)
                deg[y] -= 1
                buckets[deg[y]].add(y)
    return Orientation(d, order, out)


def random_degenerate_graph(
    n: int, d: int, max_degree: int, rng: random.Random | int | None, density: float = 1.0
) -> SimpleGraph:
    """Each vertex links to at most ``d`` earlier vertices, so the degeneracy is at most ``d``."""
    rng = make_rng(rng)
    deg = [0] * n
    edges = []
    for x in range(1, n):
        cands = [y for y in range(x) if deg[y] < max_degree]
        k = min(d, len(cands), max_degree)
        k = sum(1 for _ in range(k) if rng.random() < density)
        for y in rng.sample(cands, k):
            edges.append((y, x))
            deg[x] += 1
            deg[y] += 1
    return SimpleGraph(n, edges)


# ---------------------------------------------------------------------------
# colorings


def palette_q(d: int, max_degree: int) -> int:
    """Q = ceil(16 sqrt(d Delta)), computed in integers."""
    target = 256 * d * max_degree
    if target == 0:
        return 0
    r = math.isqrt(target)
    return r if r * r == target else r + 1


def palette_size(d: int, max_degree: int, q: int | None = None) -> int:
    q = palette_q(d, max_degree) if q is None else q
    return max(0, 2 * (max_degree - 1)) + q


def palette_bound(d: int, max_degree: int) -> int:
    """ceil((2 + 16 sqrt(d/Delta)) Delta)."""
    if max_degree == 0:
        return 0
    return 2 * max_degree + palette_q(d, max_degree)


class Coloring:
    """Edge colors plus a vertex-by-color lookup table; ``-1`` means uncolored."""

    __slots__ = ("colors", "table", "P")

    def __init__(self, colors: array, table: array, P: int):
        self.colors = colors
        self.table = table
        self.P = P

    @classmethod
    def empty(cls, graph: SimpleGraph, P: int) -> "Coloring":
        return cls(array("i", [-1]) * graph.m, array("i", [-1]) * (graph.n * P), P)

    @classmethod
    def from_colors(cls, graph: SimpleGraph, colors: Sequence[int], P: int) -> "Coloring":
        col = cls.empty(graph, P)
        for e, c in enumerate(colors):
            if c >= 0:
                col.assign(graph, e, c)
        return col

    def copy(self) -> "Coloring":
        return Coloring(array("i", self.colors), array("i", self.table), self.P)

    def assign(self, graph: SimpleGraph, e: int, c: int) -> None:
        P = self.P
        u, v = graph.eu[e], graph.ev[e]
        old = self.colors[e]
        if old >= 0:
            if self.table[u * P + old] == e:
                self.table[u * P + old] = -1
            if self.table[v * P + old] == e:
                self.table[v * P + old] = -1
        self.colors[e] = c
        if c >= 0:
            self.table[u * P + c] = e
            self.table[v * P + c] = e

    def __eq__(self, other):
        return isinstance(other, Coloring) and self.colors == other.colors

    def __hash__(self):
        return hash(self.colors.tobytes())

    def __repr__(self):
        return f"Coloring({list(self.colors)})"


def four_available(graph: SimpleGraph, coloring: Coloring, e: int) -> list[int]:
    """Colors for ``e`` that keep the coloring proper and close no bichromatic 4-cycle through ``e``."""
    return kernels.four_available(
        e, graph.eu, graph.ev, graph.inc_off, graph.inc, coloring.colors, coloring.table, coloring.P
    )


def greedy_initial(graph: SimpleGraph, P: int) -> Coloring:
    """Color edges in index order, each with its highest-numbered 4-available color."""
    col = Coloring.empty(graph, P)
    for e in range(graph.m):
        avail = four_available(graph, col, e)
        if not avail:
            raise FlawwalkError(f"no 4-available color for edge {graph.edges[e]} with {P} colors")
        col.assign(graph, e, avail[-1])
    return col


# ---------------------------------------------------------------------------
# cycles


def canonical_cycle(graph: SimpleGraph, edges: Sequence[int]) -> tuple[int, ...]:
    """Rotate/reflect a cycle's edge sequence to start at its least edge, heading to the lesser neighbor."""
    k = len(edges)
    s = min(range(k), key=edges.__getitem__)
    fwd, back = edges[(s + 1) % k], edges[(s - 1) % k]
    if fwd <= back:
        return tuple(edges[(s + i) % k] for i in range(k))
    return tuple(edges[(s - i) % k] for i in range(k))


def cycle_key(cycle: Sequence[int]) -> tuple:
    """Flaw order: shorter cycles first, then by sorted edge list."""
    return (len(cycle), tuple(sorted(cycle)))


def find_bichromatic_cycles(
    graph: SimpleGraph, coloring: Coloring, restrict_to_edges: Iterable[int] | None = None
) -> list[tuple[int, ...]]:
    """Every bichromatic cycle (or every one meeting ``restrict_to_edges``), greatest first."""
    seeds = array("i", range(graph.m) if restrict_to_edges is None else sorted(set(restrict_to_edges)))
    raw = kernels.bichromatic_cycles(
        seeds, graph.eu, graph.ev, graph.inc_off, graph.inc, coloring.colors, coloring.table, coloring.P
    )
    found = {canonical_cycle(graph, c) for c in raw}
    return sorted(found, key=cycle_key)


def cycle_vertices(graph: SimpleGraph, cycle: Sequence[int]) -> list[int]:
    """Vertices of the cycle in traversal order, starting at the vertex shared by its last and first edge."""
    first, last = cycle[0], cycle[-1]
    shared = {graph.eu[first], graph.ev[first]} & {graph.eu[last], graph.ev[last]}
    x = min(shared)
    out = []
    for e in cycle:
        out.append(x)
        x = graph.other(e, x)
    return out


# ---------------------------------------------------------------------------
# independent validators (no kernels)


def color_classes(graph: SimpleGraph, colors: Sequence[int]) -> dict[int, list[int]]:
    classes: dict[int, list[int]] = {}
    for e, c in enumerate(colors):
        classes.setdefault(c, []).append(e)
    return classes


def is_proper(graph: SimpleGraph, colors: Sequence[int]) -> bool:
    if len(colors) != graph.m or any(c < 0 for c in colors):
        return False
    for x in range(graph.n):
        seen = [colors[e] for e in graph.incident[x]]
        if len(set(seen)) != len(seen):
            return False
    return True


def bichromatic_cycle_lengths(graph: SimpleGraph, colors: Sequence[int]) -> list[int]:
    """Lengths of cycles using exactly two colors, by a union-find pass per color pair."""
    classes = color_classes(graph, colors)
    palette = sorted(classes)
    lengths = []
    for i, a in enumerate(palette):
        for b in palette[i + 1:]:
            parent: dict[int, int] = {}
            size: dict[int, int] = {}

            def find(x):
                while parent.setdefault(x, x) != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for e in classes[a] + classes[b]:
                ru, rv = find(graph.eu[e]), find(graph.ev[e])
                if ru == rv:
                    # a proper two-colored component closing up is a single cycle
                    lengths.append(size.get(ru, 0) + 1)
                else:
                    parent[ru] = rv
                    size[rv] = size.get(rv, 0) + size.get(ru, 0) + 1
    return lengths


def is_acyclic_coloring(graph: SimpleGraph, colors: Sequence[int]) -> bool:
    return is_proper(graph, colors) and not bichromatic_cycle_lengths(graph, colors)


def in_state_space(graph: SimpleGraph, colors: Sequence[int]) -> bool:
    """Proper with no bichromatic 4-cycle."""
    return is_proper(graph, colors) and 4 not in bichromatic_cycle_lengths(graph, colors)


# ---------------------------------------------------------------------------
# the flaws/actions instance


@dataclass
class AecMonitor:
    """Online assertion counters for one solve."""

    colorings: int = 0
    forbidden_violations: int = 0
    atomicity_violations: int = 0
    action_count_violations: int = 0
    state_violations: int = 0
    min_available: int | None = None
    max_forbidden: int = 0
    cycles_addressed: int = 0
    max_cycle_length: int = 0

    def record_available(self, P: int, n_avail: int, limit: int) -> None:
        self.colorings += 1
        forbidden = P - n_avail
        self.max_forbidden = max(self.max_forbidden, forbidden)
        if forbidden > limit:
            self.forbidden_violations += 1
        if self.min_available is None or n_avail < self.min_available:
            self.min_available = n_avail

    @property
    def violations(self) -> int:
        return (
            self.forbidden_violations + self.atomicity_violations
            + self.action_count_violations + self.state_violations
        )


class _SharesEdge:
    """Gamma_R(C) for the edge-intersection relation, as a membership test."""

    def __init__(self, cycle):
        self.edges = frozenset(cycle)

    def __contains__(self, other) -> bool:
        return not self.edges.isdisjoint(other)


class AecInstance(FlawInstance):
    def __init__(
        self,
        graph: SimpleGraph,
        q: int | None = None,
        *,
        check_states: bool = False,
        monitor: AecMonitor | None = None,
    ):
        self.graph = graph
        self.name = "aec"
        self.orientation = degeneracy_orient(graph)
        self.d = self.orientation.degeneracy
        self.max_degree = graph.max_degree
        self.Q = palette_q(self.d, self.max_degree) if q is None else q
        self.P = palette_size(self.d, self.max_degree, self.Q)
        self.forbidden_limit = max(0, 2 * (self.max_degree - 1))
        self.check_states = check_states
        self.monitor = monitor or AecMonitor()
        self._initial = None

    # -- contract ------------------------------------------------------------
    def is_flawed(self, flaw, state) -> bool:
        c = state.colors
        a, b = c[flaw[0]], c[flaw[1]]
        return a != b and a >= 0 and b >= 0 and all(
            c[e] == (a if k % 2 == 0 else b) for k, e in enumerate(flaw)
        )

    def present_flaws(self, state) -> list:
        return find_bichromatic_cycles(self.graph, state)

    def flaw_key(self, flaw):
        return cycle_key(flaw)

    def declared_neighborhood(self, flaw):
        return _SharesEdge(flaw)

    def guard_flaws(self, flaw, state, neighborhood) -> list:
        if neighborhood is None or isinstance(neighborhood, _SharesEdge):
            return find_bichromatic_cycles(self.graph, state, flaw)
        return super().guard_flaws(flaw, state, neighborhood)

    def sample_action(self, flaw, state, rng):
        return self.recolor(state, flaw, rng)

    def sample_initial(self, rng):
        if self._initial is None:
            self._initial = greedy_initial(self.graph, self.P)
        return self._initial.copy()

    def declared_span(self):
        return set(self.present_flaws(self.sample_initial(None)))

    def log2_ratio_bound(self) -> float:
        """log2 of max theta/mu: theta is a point mass and |Omega| <= P^|E|."""
        return self.graph.m * math.log2(self.P) if self.P > 1 else 0.0

    def digest(self, state) -> str:
        return hashlib.sha1(state.colors.tobytes()).hexdigest()[:16]

    def describe_flaw(self, flaw):
        return list(flaw)

    def gamma(self, flaw) -> float:
        """Q^-(|C|-2)."""
        return float(self.Q) ** -(len(flaw) - 2)

    # -- action --------------------------------------------------------------
    def recolor(self, state: Coloring, cycle: Sequence[int], rng: random.Random) -> Coloring:
        """Keep the first two edges of ``cycle``, recolor the rest in order uniformly among 4-available colors."""
        graph, mon = self.graph, self.monitor
        tau = state.copy()
        for e in cycle[2:]:
            tau.assign(graph, e, -1)
        for e in cycle[2:]:
            avail = four_available(graph, tau, e)
            mon.record_available(self.P, len(avail), self.forbidden_limit)
            if len(avail) < self.Q:
                mon.action_count_violations += 1
            if not avail:
                raise FlawwalkError(f"edge {graph.edges[e]} has no 4-available color")
            tau.assign(graph, e, avail[rng.randrange(len(avail))])
        mon.cycles_addressed += 1
        mon.max_cycle_length = max(mon.max_cycle_length, len(cycle))
        if predecessor(graph, tau, cycle) != state:
            mon.atomicity_violations += 1
        if self.check_states and not in_state_space(graph, tau.colors):
            mon.state_violations += 1
        return tau


def predecessor(graph: SimpleGraph, tau: Coloring, cycle: Sequence[int]) -> Coloring:
    """The unique state that addressing ``cycle`` could have led from: re-extend the first two colors around it."""
    a, b = tau.colors[cycle[0]], tau.colors[cycle[1]]
    sigma = tau.copy()
    for k in range(2, len(cycle)):
        sigma.assign(graph, cycle[k], -1)
    for k in range(2, len(cycle)):
        sigma.assign(graph, cycle[k], a if k % 2 == 0 else b)
    return sigma


# ---------------------------------------------------------------------------
# solving


@dataclass
class AecResult:
    coloring: Coloring | None
    steps: int
    outcome: str
    palette: int
    d: int
    max_degree: int
    Q: int
    monitor: AecMonitor
    seed: int | None
    trajectory: object = field(default=None, repr=False)

    @property
    def solved(self) -> bool:
        return self.coloring is not None

    def stats(self) -> dict:
        mon = self.monitor
        return {
            "steps": self.steps,
            "outcome": self.outcome,
            "palette": self.palette,
            "d": self.d,
            "Delta": self.max_degree,
            "Q": self.Q,
            "cycles_addressed": mon.cycles_addressed,
            "max_cycle": mon.max_cycle_length,
            "max_forbidden": mon.max_forbidden,
            "forbidden_violations": mon.forbidden_violations,
            "atomicity_violations": mon.atomicity_violations,
            "action_count_violations": mon.action_count_violations,
            "state_violations": mon.state_violations,
        }


def aec_solve(
    graph: SimpleGraph,
    seed: int | None = None,
    budget: int = 1_000_000,
    *,
    q: int | None = None,
    engine: str = RECURSIVE,
    check_states: bool = False,
    record: str = "none",
) -> AecResult:
    inst = AecInstance(graph, q, check_states=check_states)
    if graph.m == 0:
        return AecResult(Coloring.empty(graph, inst.P), 0, "sink", inst.P, inst.d, inst.max_degree,
                         inst.Q, inst.monitor, seed)
    initial = inst.sample_initial(None)
    traj = run_walk(inst, engine, WalkConfig(seed=seed, max_steps=budget, record=record, initial=initial))
    if traj.outcome == BUDGET:
        return AecResult(None, len(traj), BUDGET, inst.P, inst.d, inst.max_degree, inst.Q,
                         inst.monitor, seed, traj)
    if not is_acyclic_coloring(graph, traj.final.colors):
        raise FlawwalkError("walk stopped at a coloring that is not acyclic")
    return AecResult(traj.final, len(traj), traj.outcome, inst.P, inst.d, inst.max_degree, inst.Q,
                     inst.monitor, seed, traj)


def format_coloring(graph: SimpleGraph, coloring: Coloring) -> str:
    return "".join(f"{u} {v} -> {c}\n" for (u, v), c in zip(graph.edges, coloring.colors))


# ---------------------------------------------------------------------------
# cycle counting and the convergence condition


def count_cycles_through_edge(graph: SimpleGraph, e: int, k: int, work_budget: int = 10_000_000) -> int:
    """Number of k-cycles containing edge ``e`` (exhaustive path search)."""
    if k < 3:
        raise ValueError("cycles have length at least 3")
    u, v = graph.eu[e], graph.ev[e]
    work = 0
    count = 0
    on_path = [False] * graph.n
    on_path[u] = True
    # paths u = x0, x1, ..., x_{k-1} = v of k-1 edges that avoid the edge uv itself
    stack = [(u, 0, iter(sorted(graph.adj[u])))]
    while stack:
        x, depth, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            on_path[x] = False
            continue
        work += 1
        if work > work_budget:
            raise WorkBudgetExceeded(f"cycle count through edge {e} exceeded {work_budget} steps")
        if depth == k - 2:
            if nxt == v:
                count += 1
            continue
        if nxt == v or on_path[nxt]:
            continue
        on_path[nxt] = True
        stack.append((nxt, depth + 1, iter(sorted(graph.adj[nxt]))))
    on_path[u] = False
    return count


def cycle_count_bound(d: int, max_degree: int, k: int) -> float:
    """2 (4 d Delta)^((k-2)/2)."""
    return 2.0 * (4.0 * d * max_degree) ** ((k - 2) / 2)


def standard_psi(d: int, max_degree: int) -> Callable[[int], float]:
    """psi(k) = (8 d Delta)^(-(k-2)/2)."""
    base = 8.0 * d * max_degree
    return lambda k: base ** (-(k - 2) / 2)


@dataclass
class AecConditionReport:
    d: int
    max_degree: int
    Q: int
    series: float
    bounds: dict

    @property
    def max_bound(self) -> float:
        return max(self.bounds.values())

    @property
    def passed(self) -> bool:
        return self.max_bound <= 1 - STRICT

    @property
    def delta(self) -> float:
        return 1.0 - self.max_bound

    def to_text(self) -> str:
        lines = [f"# d={self.d} Delta={self.max_degree} Q={self.Q} series={self.series:.12g}",
                 "k\tzeta_bound"]
        lines += [f"{k}\t{b:.12g}" for k, b in self.bounds.items()]
        lines.append(f"delta={self.delta:.12g}")
        lines.append("verdict=" + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def aec_condition_check(
    d: int, max_degree: int, Q: int, psi: Callable[[int], float] | None = None, k_max: int = 64
) -> AecConditionReport:
    """Per-length upper bounds on zeta for cycle flaws, using the cycle-count bound for g(k).

    bound(k) = (1 / (psi(k) Q^(k-2))) * (1 + sum_{j>=3} g(2j) psi(2j))^k
    """
    psi = psi or standard_psi(d, max_degree)
    terms = []
    j = 3
    prev = None
    while True:
        term = cycle_count_bound(d, max_degree, 2 * j) * psi(2 * j)
        if not math.isfinite(term):
            raise DivergentSeries("series term overflowed")
        terms.append(term)
        if prev is not None and j >= 40 and term >= prev:
            raise DivergentSeries(f"series terms stop decreasing at j={j}")
        if term <= 1e-18 * math.fsum(terms) or j > 20000:
            if term > 1e-12 * math.fsum(terms):
                raise DivergentSeries("series did not converge")
            break
        prev = term
        j += 1
    series = math.fsum(terms)
    bounds = {}
    for k in range(6, k_max + 1, 2):
        bounds[k] = math.exp(k * math.log1p(series) - math.log(psi(k)) - (k - 2) * math.log(Q)) if Q > 0 else math.inf
    return AecConditionReport(d, max_degree, Q, series, bounds)


def aec_T0(instance: AecInstance, state: Coloring | None = None) -> float:
    """log2 ratio bound + log2 of the independent-set weight of U(sigma_1) under the standard weights."""
    state = state or instance.sample_initial(None)
    span = instance.present_flaws(state)
    psi_fn = standard_psi(instance.d, instance.max_degree)
    psi = {c: psi_fn(len(c)) for c in span}
    adjacency = {c: [o for o in span if o != c and not set(c).isdisjoint(o)] for c in span}
    G = DependencyGraph(span, adjacency)
    return instance.log2_ratio_bound() + math.log2(independent_weight(span, G, psi))
