"""Flaw charges and the regeneration / atomicity / harmonicity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable

from .core import TOL, ExplicitInstance, FlawInstance, FlawwalkError, ImplicitInstanceError

REGENERATIVE = "regenerative"
GENERAL = "general"
UNIFORM_IMPROVED = "uniform-improved"
MODES = (REGENERATIVE, GENERAL, UNIFORM_IMPROVED)


class ModeUnjustified(FlawwalkError):
    """The requested charge mode is not justified by the instance."""


def _explicit(instance: FlawInstance) -> ExplicitInstance:
    if not isinstance(instance, ExplicitInstance):
        raise ImplicitInstanceError(f"{instance.name}: operation needs an explicit instance")
    return instance


def lam(instance: FlawInstance, i, sigma) -> float:
    """max over tau in A(i, sigma) of rho_i(sigma, tau) * mu(sigma) / mu(tau)."""
    ms = instance.measure(sigma)
    return max(p * ms / instance.measure(t) for t, p in instance.actions(i, sigma))


def in_degrees(instance: ExplicitInstance, i) -> dict:
    """b_i^tau for every tau reachable by an arc labelled i."""
    b: dict = {}
    for s in instance.flaws[i]:
        for t, _ in instance.actions(i, s):
            b[t] = b.get(t, 0) + 1
    return b


def is_atomic(instance: FlawInstance) -> bool:
    inst = _explicit(instance)
    return all(max(in_degrees(inst, i).values()) <= 1 for i in inst.order)


def is_uniform(instance: ExplicitInstance) -> bool:
    target = 1.0 / len(instance.states)
    return all(abs(m - target) <= TOL for m in instance.mu.values())


def theta_is_mu(instance: ExplicitInstance) -> bool:
    return all(abs(instance.theta[s] - instance.mu[s]) <= TOL for s in instance.states)


@dataclass
class RegenerationCheck:
    flaw: Hashable
    passed: bool
    deviation: float


def check_regeneration(instance: FlawInstance, i) -> RegenerationCheck:
    """Compare (1/mu(f_i)) sum_{sigma in f_i} mu(sigma) rho_i(sigma, tau) with mu(tau) for all tau."""
    inst = _explicit(instance)
    mass = inst.measure_of_flaw(i)
    inflow: dict = {t: [] for t in inst.states}
    for s in inst.flaws[i]:
        for t, p in inst.actions(i, s):
            inflow[t].append(inst.mu[s] * p)
    dev = max(abs(math.fsum(inflow[t]) / mass - inst.mu[t]) for t in inst.states)
    return RegenerationCheck(i, dev <= TOL, dev)


def regenerates(instance: FlawInstance) -> bool:
    inst = _explicit(instance)
    return all(check_regeneration(inst, i).passed for i in inst.order)


def harmonic_rho(instance: FlawInstance, i, sigma) -> list[tuple]:
    """rho_i(sigma, tau) proportional to mu(tau) over A(i, sigma)."""
    targets = [t for t, _ in instance.actions(i, sigma)]
    total = math.fsum(instance.measure(t) for t in targets)
    return [(t, instance.measure(t) / total) for t in targets]


def harmonic_instance(instance: ExplicitInstance) -> ExplicitInstance:
    arcs = {(i, s): harmonic_rho(instance, i, s) for (i, s) in instance.arcs}
    return instance.with_rho(arcs, name=f"{instance.name}-harmonic")


def inverse_degree_rho(instance: ExplicitInstance, i, sigma) -> list[tuple]:
    """rho_i(sigma, tau) = (b_i^tau * sum_{tau' in A(i, sigma)} 1/b_i^tau')^-1."""
    b = in_degrees(instance, i)
    targets = [t for t, _ in instance.actions(i, sigma)]
    norm = math.fsum(1.0 / b[t] for t in targets)
    return [(t, 1.0 / (b[t] * norm)) for t in targets]


def inverse_degree_instance(instance: ExplicitInstance) -> ExplicitInstance:
    """The instance with the in-degree-weighted transition rule used for uniform measures."""
    arcs = {(i, s): inverse_degree_rho(instance, i, s) for (i, s) in instance.arcs}
    return instance.with_rho(arcs, name=f"{instance.name}-indegree")


def uniform_charge(instance: FlawInstance, i) -> float:
    """phi_i = max over arcs (sigma, tau) labelled i of b_i^tau / a_i^sigma."""
    inst = _explicit(instance)
    if not is_uniform(inst):
        raise ModeUnjustified(f"{inst.name}: uniform charge needs a uniform measure")
    b = in_degrees(inst, i)
    best = 0.0
    for s in inst.flaws[i]:
        acts = inst.actions(i, s)
        a = len(acts)
        best = max(best, max(b[t] for t, _ in acts) / a)
    return best


def regenerative_justified(instance: ExplicitInstance) -> tuple[bool, str]:
    if not regenerates(instance):
        bad = [i for i in instance.order if not check_regeneration(instance, i).passed]
        return False, f"no regeneration at {bad}"
    if theta_is_mu(instance) or is_atomic(instance):
        return True, ""
    return False, "theta != mu and the action digraph is not atomic"


@dataclass
class FlawCharge:
    flaw: Hashable
    b: int
    a: int
    lam_max: float
    mu_f: float
    gamma: float
    phi: float | None = None


@dataclass
class ChargeTable:
    mode: str
    rows: dict = field(default_factory=dict)

    def gamma(self, flaw) -> float:
        return self.rows[flaw].gamma

    def gammas(self) -> dict:
        return {f: r.gamma for f, r in self.rows.items()}

    def to_text(self) -> str:
        out = [f"# mode={self.mode}", "flaw\tb\ta\tgamma\tphi\tmode"]
        for f, r in self.rows.items():
            phi = "-" if r.phi is None else f"{r.phi:.10g}"
            out.append(f"{f}\t{r.b}\t{r.a}\t{r.gamma:.10g}\t{phi}\t{self.mode}")
        return "\n".join(out) + "\n"


def flaw_charges(instance: ExplicitInstance, i) -> FlawCharge:
    b = max(in_degrees(instance, i).values())
    a = min(len(instance.actions(i, s)) for s in instance.flaws[i])
    lam_max = max(lam(instance, i, s) for s in instance.flaws[i])
    phi = uniform_charge(instance, i) if is_uniform(instance) else None
    return FlawCharge(i, b, a, lam_max, instance.measure_of_flaw(i), b * lam_max, phi)


def charge(instance: FlawInstance, i, mode: str, table: ChargeTable | None = None) -> float:
    """gamma_i under ``mode`` (regenerative: mu(f_i); general: b_i max lambda; uniform-improved: phi_i)."""
    inst = _explicit(instance)
    row = table.rows[i] if table is not None and i in table.rows else flaw_charges(inst, i)
    if mode == REGENERATIVE:
        ok, why = regenerative_justified(inst)
        if not ok:
            raise ModeUnjustified(f"{inst.name}: regenerative mode unjustified ({why})")
        return row.mu_f
    if mode == GENERAL:
        return row.b * row.lam_max
    if mode == UNIFORM_IMPROVED:
        return uniform_charge(inst, i)
    raise ValueError(f"unknown charge mode {mode!r}")


def charge_table(instance: FlawInstance, mode: str = "auto") -> ChargeTable:
    """Charges for every flaw.  ``auto`` picks regenerative when justified, else general."""
    inst = _explicit(instance)
    if mode == "auto":
        mode = REGENERATIVE if regenerative_justified(inst)[0] else GENERAL
    elif mode == REGENERATIVE:
        ok, why = regenerative_justified(inst)
        if not ok:
            raise ModeUnjustified(f"{inst.name}: regenerative mode unjustified ({why})")
    table = ChargeTable(mode)
    for i in inst.order:
        row = flaw_charges(inst, i)
        if mode == REGENERATIVE:
            row.gamma = row.mu_f
        elif mode == UNIFORM_IMPROVED:
            row.gamma = uniform_charge(inst, i)
        table.rows[i] = row
    return table


@dataclass
class AtomicHarmonicReport:
    passed: bool
    precondition: str | None
    rho_deviation: float = 0.0
    mass_deviation: float = 0.0


def check_atomic_harmonic(instance: FlawInstance) -> AtomicHarmonicReport:
    """On atomic, regenerating instances: rho is harmonic and sum_{A(i,sigma)} mu = mu(sigma)/mu(f_i)."""
    inst = _explicit(instance)
    if not is_atomic(inst):
        return AtomicHarmonicReport(False, "action digraph is not atomic")
    bad = [i for i in inst.order if not check_regeneration(inst, i).passed]
    if bad:
        return AtomicHarmonicReport(False, f"no regeneration at flaws {bad}")
    rho_dev = mass_dev = 0.0
    for i in inst.order:
        mass = inst.measure_of_flaw(i)
        for s in inst.flaws[i]:
            declared = dict(inst.actions(i, s))
            for t, p in harmonic_rho(inst, i, s):
                rho_dev = max(rho_dev, abs(declared[t] - p))
            total = math.fsum(inst.mu[t] for t in declared)
            mass_dev = max(mass_dev, abs(total - inst.mu[s] / mass))
    return AtomicHarmonicReport(rho_dev <= TOL and mass_dev <= TOL, None, rho_dev, mass_dev)
