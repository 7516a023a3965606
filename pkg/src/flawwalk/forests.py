"""Witness forests: Break Forests for the permutation walk, Recursive Forests
for the recursive walk, and the reconstruction of witness sequences from them.

A flaw order is passed as a key function; sorting ascending by the key lists
flaws greatest first (same convention as ``FlawInstance.flaw_key``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Sequence

from .core import FlawwalkError, Trajectory

BREAK = "break"
RECURSIVE = "recursive"


class ForestError(FlawwalkError):
    """A forest or break sequence is malformed."""


@dataclass
class ForestNode:
    label: Hashable
    children: list["ForestNode"] = field(default_factory=list)

    def copy(self) -> "ForestNode":
        return ForestNode(self.label, [c.copy() for c in self.children])


def _label_text(label) -> str:
    if isinstance(label, tuple):
        return "[" + ",".join(map(str, label)) + "]"
    return str(label)


@dataclass
class WitnessForest:
    roots: list[ForestNode]
    flavor: str = BREAK
    key: Callable | None = None

    def nodes(self) -> Iterator[ForestNode]:
        """Vertices in preorder of the stored (not canonical) order."""
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def __len__(self) -> int:
        return sum(1 for _ in self.nodes())

    def _sorted(self, nodes: Sequence[ForestNode]) -> list[ForestNode]:
        key = self.key
        if key is None:
            return sorted(nodes, key=lambda n: repr(n.label))
        return sorted(nodes, key=lambda n: key(n.label))

    def canonical(self) -> str:
        """Single-line encoding invariant under reordering trees and siblings."""

        def enc(node: ForestNode) -> str:
            kids = self._sorted(node.children)
            inner = ",".join(enc(k) for k in kids)
            return _label_text(node.label) + (f"({inner})" if kids else "")

        return "|".join(enc(r) for r in self._sorted(self.roots))

    def to_text(self) -> str:
        lines: list[str] = []

        def walk(node: ForestNode, depth: int):
            lines.append("  " * depth + _label_text(node.label))
            for k in self._sorted(node.children):
                walk(k, depth + 1)

        for r in self._sorted(self.roots):
            walk(r, 0)
        return "\n".join(lines) + ("\n" if lines else "")

    def check_distinct(self) -> None:
        groups = [self.roots] + [n.children for n in self.nodes()]
        for g in groups:
            labels = [n.label for n in g]
            if len(set(labels)) != len(labels):
                raise ForestError(f"repeated label among siblings/roots: {labels}")


# ---------------------------------------------------------------------------
# permutation walk


def break_sequence(traj: Trajectory) -> list[frozenset]:
    """B_0*, ..., B_{t-1}* of a full-level permutation-walk trajectory.

    B_i holds the flaws introduced by step i (B_0 = U(sigma_1)); a flaw is
    dropped from B_i when it disappears before being addressed (O_i) or stays
    present without ever being addressed (N_i).
    """
    if traj.engine != "permutation":
        raise ForestError("break sequences are defined for permutation-walk trajectories")
    U = [frozenset(s) for s in traj.present_sets()]
    w = traj.witness
    t = len(w)
    out = []
    for i in range(t):
        B = U[0] if i == 0 else U[i] - (U[i - 1] - {w[i - 1]})
        kept = set()
        for f in B:
            for j in range(i + 1, t + 1):
                if w[j - 1] == f:
                    kept.add(f)
                    break
                if f not in U[j]:
                    break
        out.append(frozenset(kept))
    return out


def break_forest(seq: Sequence[Iterable], key: Callable) -> WitnessForest:
    """Lay down B_0* as roots, then give the greatest open vertex the children B_i*."""
    if not seq:
        return WitnessForest([], BREAK, key)
    roots = [ForestNode(f) for f in sorted(seq[0], key=key)]
    frontier = list(roots)
    for i in range(1, len(seq)):
        if not frontier:
            raise ForestError(f"break sequence step {i}: no vertex left to expand")
        v = min(frontier, key=lambda n: key(n.label))
        frontier.remove(v)
        v.children = [ForestNode(f) for f in sorted(seq[i], key=key)]
        frontier.extend(v.children)
    return WitnessForest(roots, BREAK, key)


# ---------------------------------------------------------------------------
# recursive walk


def recursive_forest(traj: Trajectory) -> WitnessForest:
    """One vertex per ADDRESS invocation, children = the invocations it made."""
    if traj.engine != "recursive":
        raise ForestError("recursive forests are defined for recursive-walk trajectories")
    nodes = [ForestNode(s.flaw) for s in traj.steps]
    roots = []
    for k, s in enumerate(traj.steps):
        if s.parent < 0:
            roots.append(nodes[k])
        elif s.parent >= k:
            raise ForestError(f"step {k}: parent {s.parent} does not precede it")
        else:
            nodes[s.parent].children.append(nodes[k])
    return WitnessForest(roots, RECURSIVE, traj.key)


# ---------------------------------------------------------------------------


def reconstruct_witness(forest: WitnessForest, key: Callable | None = None) -> tuple:
    """The witness sequence encoded by ``forest`` under flaw order ``key``."""
    key = key or forest.key
    if key is None:
        raise ForestError("a flaw order is needed to reconstruct the witness sequence")
    forest.check_distinct()
    out = []
    if forest.flavor == RECURSIVE:
        stack = sorted(forest.roots, key=lambda n: key(n.label), reverse=True)
        while stack:
            node = stack.pop()
            out.append(node.label)
            stack.extend(sorted(node.children, key=lambda n: key(n.label), reverse=True))
        return tuple(out)
    if forest.flavor != BREAK:
        raise ForestError(f"cannot reconstruct a {forest.flavor!r} forest")
    frontier = list(forest.roots)
    while frontier:
        labels = [n.label for n in frontier]
        if len(set(labels)) != len(labels):
            raise ForestError(f"open vertices share a label: {labels}")
        v = min(frontier, key=lambda n: key(n.label))
        frontier.remove(v)
        out.append(v.label)
        frontier.extend(v.children)
    return tuple(out)


def forest_of(traj: Trajectory) -> WitnessForest:
    if traj.engine == "recursive":
        return recursive_forest(traj)
    return break_forest(break_sequence(traj), traj.key)


def check_recursive_structure(forest: WitnessForest, G, R, span: Iterable) -> list[str]:
    """Problems with the independence structure of a recursive forest (empty when fine)."""
    problems = []
    span = set(span)
    roots = [n.label for n in forest.roots]
    if not set(roots) <= span:
        problems.append(f"roots {roots} not within the span")
    if not G.is_independent(roots):
        problems.append(f"roots {roots} not independent")
    for node in forest.nodes():
        kids = [c.label for c in node.children]
        if not set(kids) <= set(R.out(node.label)):
            problems.append(f"children of {node.label!r} leave Gamma_R")
        if not G.is_independent(kids):
            problems.append(f"children of {node.label!r} not independent")
    return problems
