"""CNF formulas as flaws: resampling the variables of a violated clause.

Each clause is a flaw (the assignments violating it form a subcube), the
measure is uniform on {0,1}^n, and addressing a clause draws fresh uniform
values for its variables.  Assignments are ``bytes`` of 0/1 values, index
``v - 1`` for variable ``v``.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from array import array
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import kernels
from .causality import DECLARED, CausalityGraph
from .conditions import ConditionReport, evaluate
from .core import ExplicitInstance, FlawInstance, FlawwalkError, InstanceError, make_rng
from .walks import BUDGET, RECURSIVE, WalkConfig, run_walk


class DimacsError(InstanceError):
    """Malformed DIMACS input."""


@dataclass
class CnfInstance:
    n: int
    clauses: list[tuple[int, ...]]
    name: str = "cnf"

    def __post_init__(self):
        if self.n < 0:
            raise InstanceError("variable count must be non-negative")
        norm = []
        for k, c in enumerate(self.clauses):
            if not c:
                raise InstanceError(f"clause {k + 1} is empty")
            lits = tuple(dict.fromkeys(int(l) for l in c))
            for l in lits:
                if l == 0 or abs(l) > self.n:
                    raise InstanceError(f"clause {k + 1}: literal {l} out of range 1..{self.n}")
            norm.append(lits)
        self.clauses = norm

    def variables(self, c: int) -> tuple[int, ...]:
        """vbl(c) in increasing variable order."""
        return tuple(sorted({abs(l) for l in self.clauses[c]}))

    def is_tautology(self, c: int) -> bool:
        lits = set(self.clauses[c])
        return any(-l in lits for l in lits)

    def satisfied(self, assign: Sequence[int]) -> bool:
        """Independent clause-by-clause check (does not use the kernels)."""
        return all(
            any((assign[abs(l) - 1] == 1) == (l > 0) for l in clause) for clause in self.clauses
        )

    def to_dimacs(self) -> str:
        out = [f"p cnf {self.n} {len(self.clauses)}"]
        out += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(out) + "\n"


def parse_dimacs(text: str, name: str = "cnf") -> CnfInstance:
    n = m = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if n is not None:
                raise DimacsError(f"line {lineno}: second header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: expected 'p cnf <vars> <clauses>'")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: header counts must be integers") from None
            if n < 0 or m < 0:
                raise DimacsError(f"line {lineno}: negative header count")
            continue
        if n is None:
            raise DimacsError(f"line {lineno}: clause before the 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > n:
                raise DimacsError(f"line {lineno}: literal {lit} exceeds {n} variables")
            else:
                current.append(lit)
    if n is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    if len(clauses) != m:
        raise DimacsError(f"header declares {m} clauses, found {len(clauses)}")
    return CnfInstance(n, clauses, name)


def load_dimacs(path: str | Path) -> CnfInstance:
    path = Path(path)
    return parse_dimacs(path.read_text(), name=path.stem)


def random_kcnf(n: int, m: int, k: int, rng: random.Random | int | None) -> CnfInstance:
    """m clauses over k distinct variables each, random signs."""
    rng = make_rng(rng)
    clauses = []
    for _ in range(m):
        vs = sorted(rng.sample(range(1, n + 1), k))
        clauses.append(tuple(v if rng.getrandbits(1) else -v for v in vs))
    return CnfInstance(n, clauses, f"rand-{k}cnf-{n}-{m}")


def format_solution(assign: Sequence[int]) -> str:
    lits = [str(v + 1 if b else -(v + 1)) for v, b in enumerate(assign)]
    return "v " + " ".join(lits + ["0"]) + "\n"


class MTInstance(FlawInstance):
    """Clause flaws with uniform resampling of the violated clause's variables."""

    def __init__(self, cnf: CnfInstance, order: Sequence[int] | None = None):
        self.cnf = cnf
        self.name = cnf.name
        m = len(cnf.clauses)
        self.order = tuple(order) if order is not None else tuple(range(m))
        if sorted(self.order) != list(range(m)):
            raise InstanceError("clause order must be a permutation of the clauses")
        self._rank = {c: k for k, c in enumerate(self.order)}
        self._identity_order = self.order == tuple(range(m))
        self._offsets = array("i", [0])
        self._lits = array("i")
        for c in cnf.clauses:
            self._lits.extend(c)
            self._offsets.append(len(self._lits))
        self._vbl = [cnf.variables(c) for c in range(m)]
        by_var: dict[int, list[int]] = {}
        for c, vs in enumerate(self._vbl):
            for v in vs:
                by_var.setdefault(v, []).append(c)
        self._nbrs = []
        for c, vs in enumerate(self._vbl):
            nb = set()
            for v in vs:
                nb.update(by_var[v])
            self._nbrs.append(frozenset(nb))
        self._nbr_arrays = [array("i", sorted(nb, key=self._rank.__getitem__)) for nb in self._nbrs]

    # -- contract ------------------------------------------------------------
    def is_flawed(self, flaw, state) -> bool:
        return bool(kernels.unsat_among(self._offsets, self._lits, state, array("i", [flaw])))

    def present_flaws(self, state) -> list:
        out = kernels.unsat_clauses(self._offsets, self._lits, state)
        if not self._identity_order:
            out.sort(key=self._rank.__getitem__)
        return list(out)

    def flaw_key(self, flaw):
        return self._rank[flaw]

    def declared_neighborhood(self, flaw):
        return self._nbrs[flaw]

    def guard_flaws(self, flaw, state, neighborhood) -> list:
        if neighborhood is None or neighborhood is self._nbrs[flaw]:
            return list(kernels.unsat_among(self._offsets, self._lits, state, self._nbr_arrays[flaw]))
        cand = array("i", sorted(neighborhood, key=self._rank.__getitem__))
        return list(kernels.unsat_among(self._offsets, self._lits, state, cand))

    def actions(self, flaw, state):
        vs = self._vbl[flaw]
        p = 2.0 ** -len(vs)
        out = []
        for bits in itertools.product((0, 1), repeat=len(vs)):
            t = bytearray(state)
            for v, b in zip(vs, bits):
                t[v - 1] = b
            out.append((bytes(t), p))
        return out

    def sample_action(self, flaw, state, rng):
        t = bytearray(state)
        for v in self._vbl[flaw]:
            t[v - 1] = rng.getrandbits(1)
        return bytes(t)

    def measure(self, state) -> float:
        return 2.0 ** -self.cnf.n

    def sample_initial(self, rng):
        return bytes(rng.getrandbits(1) for _ in range(self.cnf.n))

    def declared_span(self):
        return {c for c in range(len(self.cnf.clauses)) if not self.cnf.is_tautology(c)}

    def declared_ratio(self) -> float:
        return 1.0

    def digest(self, state) -> str:
        if len(state) <= 64:
            return "".join(map(str, state))
        return hashlib.sha1(state).hexdigest()

    def describe_flaw(self, flaw):
        return flaw

    # -- analytics -----------------------------------------------------------
    def gammas(self) -> dict:
        """gamma_c = mu(f_c) = 2^-|vbl(c)| (0 for tautologies, which never occur)."""
        return {
            c: (0.0 if self.cnf.is_tautology(c) else 2.0 ** -len(self._vbl[c]))
            for c in range(len(self.cnf.clauses))
        }

    def causality(self) -> CausalityGraph:
        """Clauses sharing a variable, each clause included in its own neighborhood."""
        nodes = list(self.order)
        arcs = {c: self._nbrs[c] for c in nodes}
        prov = {(c, d): DECLARED for c in nodes for d in arcs[c]}
        return CausalityGraph(nodes, arcs, prov)

    def condition(self, psi, variant: str = "simple") -> ConditionReport:
        if not isinstance(psi, dict):
            psi = {c: float(psi) for c in self.order}
        return evaluate(self.gammas(), psi, self.causality(), variant)

    def to_explicit(self, max_vars: int = 12) -> ExplicitInstance:
        n = self.cnf.n
        if n > max_vars:
            raise FlawwalkError(f"{self.name}: {n} variables is too many to enumerate")
        taut = [c for c in range(len(self.cnf.clauses)) if self.cnf.is_tautology(c)]
        if taut:
            raise InstanceError(f"{self.name}: tautological clauses {taut} have empty flaws")
        states = [bytes(bits) for bits in itertools.product((0, 1), repeat=n)]
        label = {s: "".join(map(str, s)) or "e" for s in states}
        flaw_name = {c: f"c{c + 1}" for c in range(len(self.cnf.clauses))}
        flaws = {flaw_name[c]: [] for c in self.order}
        arcs = {}
        for s in states:
            for c in self.present_flaws(s):
                flaws[flaw_name[c]].append(label[s])
                arcs[(flaw_name[c], label[s])] = [(label[t], p) for t, p in self.actions(c, s)]
        mu = {label[s]: 2.0 ** -n for s in states}
        relation = {flaw_name[c]: [flaw_name[d] for d in self._nbrs[c]] for c in self.order}
        return ExplicitInstance(
            [label[s] for s in states], flaws, arcs, mu, dict(mu),
            order=[flaw_name[c] for c in self.order], relation=relation, name=self.name,
        )


def mt_instance(cnf: CnfInstance, order: Sequence[int] | None = None) -> MTInstance:
    return MTInstance(cnf, order)


@dataclass
class SatResult:
    assignment: bytes | None
    steps: int
    outcome: str
    condition: ConditionReport | None
    seed: int | None
    trajectory: object = field(default=None, repr=False)

    @property
    def solved(self) -> bool:
        return self.assignment is not None


def solve_sat(
    cnf: CnfInstance,
    engine: str = RECURSIVE,
    psi: float | dict | None = 0.5,
    seed: int | None = None,
    max_steps: int = 1_000_000,
    record: str = "none",
) -> SatResult:
    """Run a walk on the resampling instance; the assignment is verified before it is returned."""
    inst = MTInstance(cnf)
    report = inst.condition(psi) if psi is not None and cnf.clauses else None
    traj = run_walk(inst, engine, WalkConfig(seed=seed, max_steps=max_steps, record=record))
    if traj.outcome == BUDGET:
        return SatResult(None, len(traj), BUDGET, report, seed, traj)
    if not cnf.satisfied(traj.final):
        raise FlawwalkError("walk stopped at an assignment that violates a clause")
    return SatResult(traj.final, len(traj), traj.outcome, report, seed, traj)
