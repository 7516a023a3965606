"""Backend selection for the hot kernels.

The compiled module ``flawwalk._ckernels`` is used when it was built;
otherwise the pure-Python twin in ``flawwalk._pykernels`` is used.  Setting
``FLAWWALK_KERNELS=python`` in the environment forces the fallback.

Callers look functions up on this module at call time, so
:func:`use_backend` switches every consumer at once (benchmarks rely on it).
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_FUNCTIONS = ("unsat_clauses", "unsat_among", "four_available", "bichromatic_cycles")

BACKEND = "python"


def available_backends() -> list[str]:
    return ["cython", "python"] if _ckernels is not None else ["python"]


def use_backend(name: str) -> None:
    """Bind the module-level kernel functions to backend ``name``."""
    global BACKEND
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; reinstall the package")
        source = _ckernels
    elif name == "python":
        source = _pykernels
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    for fn in _FUNCTIONS:
        globals()[fn] = getattr(source, fn)
    BACKEND = name


def backend_module(name: str):
    return _ckernels if name == "cython" else _pykernels


use_backend(
    "python"
    if os.environ.get("FLAWWALK_KERNELS", "").lower() == "python" or _ckernels is None
    else "cython"
)
