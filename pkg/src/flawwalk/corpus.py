"""Small explicit instances used by the oracle checks, the CLI and the tests.

Each builder returns an :class:`ExplicitInstance`; the same instances ship as
text files under ``flawwalk/data`` (regenerate with ``write_corpus``).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .core import ExplicitInstance, format_instance, parse_instance
from .sat import CnfInstance, MTInstance


def _bits(n: int) -> list[str]:
    return [format(k, f"0{n}b") for k in range(2 ** n)]


def toy_a() -> ExplicitInstance:
    """Two bits, flaw i = bit i is 0, addressed by resampling bit i; uniform start."""
    states = _bits(2)
    flaws = {"f1": [s for s in states if s[0] == "0"], "f2": [s for s in states if s[1] == "0"]}
    arcs = {}
    for s in flaws["f1"]:
        arcs[("f1", s)] = [("0" + s[1], 0.5), ("1" + s[1], 0.5)]
    for s in flaws["f2"]:
        arcs[("f2", s)] = [(s[0] + "0", 0.5), (s[0] + "1", 0.5)]
    mu = {s: 0.25 for s in states}
    return ExplicitInstance(states, flaws, arcs, mu, dict(mu), name="toy-a")


def toy_b() -> ExplicitInstance:
    """Two bits, flaw i = bit i is 0, addressed by setting bit i to 1; start at 00."""
    states = _bits(2)
    flaws = {"f1": [s for s in states if s[0] == "0"], "f2": [s for s in states if s[1] == "0"]}
    arcs = {}
    for s in flaws["f1"]:
        arcs[("f1", s)] = [("1" + s[1], 1.0)]
    for s in flaws["f2"]:
        arcs[("f2", s)] = [(s[0] + "1", 1.0)]
    mu = {s: 0.25 for s in states}
    theta = {s: (1.0 if s == "00" else 0.0) for s in states}
    return ExplicitInstance(states, flaws, arcs, mu, theta, name="toy-b")


def full_resample() -> ExplicitInstance:
    """Both flaws jump to a fresh sample of a non-uniform measure."""
    states = ["a", "b", "c"]
    mu = {"a": 0.5, "b": 0.25, "c": 0.25}
    flaws = {"f1": ["a"], "f2": ["a", "b"]}
    arcs = {(f, s): [(t, mu[t]) for t in states] for f, m in flaws.items() for s in m}
    return ExplicitInstance(states, flaws, arcs, mu, dict(mu), name="full-resample")


def gadget() -> ExplicitInstance:
    """One flaw on six uniform states where two targets have in-degree 2."""
    states = [str(k) for k in range(6)]
    flaws = {"f": ["0", "1", "5"]}
    arcs = {
        ("f", "0"): [("2", 0.5), ("3", 0.5)],
        ("f", "1"): [("3", 0.5), ("2", 0.5)],
        ("f", "5"): [("4", 1.0)],
    }
    mu = {s: 1 / 6 for s in states}
    return ExplicitInstance(states, flaws, arcs, mu, dict(mu), name="gadget")


def biased_bits() -> ExplicitInstance:
    """Two independent biased bits; flaw i = bit i is 0, resampled from its own marginal."""
    p = (2 / 3, 3 / 4)
    states = _bits(2)

    def weight(s):
        w = 1.0
        for k, ch in enumerate(s):
            w *= p[k] if ch == "1" else 1 - p[k]
        return w

    mu = {s: weight(s) for s in states}
    flaws = {"f1": [s for s in states if s[0] == "0"], "f2": [s for s in states if s[1] == "0"]}
    arcs = {}
    for s in flaws["f1"]:
        arcs[("f1", s)] = [("0" + s[1], 1 - p[0]), ("1" + s[1], p[0])]
    for s in flaws["f2"]:
        arcs[("f2", s)] = [(s[0] + "0", 1 - p[1]), (s[0] + "1", p[1])]
    return ExplicitInstance(states, flaws, arcs, mu, dict(mu), name="biased-bits")


def biased_resample() -> ExplicitInstance:
    """A flaw that moves to the other states in proportion to their measure (no regeneration)."""
    states = ["0", "1", "2"]
    mu = {"0": 0.5, "1": 1 / 3, "2": 1 / 6}
    flaws = {"f": ["0"]}
    arcs = {("f", "0"): [("1", 2 / 3), ("2", 1 / 3)]}
    return ExplicitInstance(states, flaws, arcs, mu, dict(mu), name="biased-resample")


def mt_cnf(clauses, n: int, name: str) -> ExplicitInstance:
    return MTInstance(CnfInstance(n, [tuple(c) for c in clauses], name)).to_explicit()


BUILDERS = {
    "toy-a": toy_a,
    "toy-b": toy_b,
    "full-resample": full_resample,
    "gadget": gadget,
    "biased-bits": biased_bits,
    "biased-resample": biased_resample,
    "mt-x": lambda: mt_cnf([(1,)], 1, "mt-x"),
    "mt-x-y": lambda: mt_cnf([(1,), (2,)], 2, "mt-x-y"),
    "mt-xy-nxy": lambda: mt_cnf([(1, 2), (-1, 2)], 2, "mt-xy-nxy"),
    "mt-3var": lambda: mt_cnf([(1, 2), (-2, 3), (-1, -3)], 3, "mt-3var"),
}


def build(name: str) -> ExplicitInstance:
    return BUILDERS[name]()


def names() -> list[str]:
    return list(BUILDERS)


def data_path(name: str):
    return resources.files("flawwalk") / "data" / f"{name}.inst"


def load(name: str) -> ExplicitInstance:
    """A shipped corpus instance by name."""
    return parse_instance(data_path(name).read_text())


def write_corpus(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for name in BUILDERS:
        path = directory / f"{name}.inst"
        path.write_text(format_instance(build(name)))
        out.append(path)
    return out
