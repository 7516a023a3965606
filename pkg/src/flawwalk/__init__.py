"""Focused stochastic local search in the flaws/actions framework.

Walk engines, flaw charges, convergence conditions, witness forests, exact
oracles for small explicit instances, and two applications: k-SAT
resampling and acyclic edge coloring.
"""

from .core import (
    ExplicitInstance,
    FlawInstance,
    FlawwalkError,
    InstanceError,
    Trajectory,
    format_instance,
    load_instance,
    parse_instance,
    present_flaws,
    sample_initial,
    span,
)
from .walks import WalkConfig, permutation_walk, recursive_walk, run_walk
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "ExplicitInstance",
    "FlawInstance",
    "FlawwalkError",
    "InstanceError",
    "Trajectory",
    "WalkConfig",
    "format_instance",
    "load_instance",
    "parse_instance",
    "permutation_walk",
    "present_flaws",
    "recursive_walk",
    "run_walk",
    "sample_initial",
    "span",
]
