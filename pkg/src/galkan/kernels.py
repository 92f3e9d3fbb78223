"""Backend selection for the hot kernels.

The compiled extension is preferred; when it cannot be imported (no compiler
at install time, exotic platform) the numpy fallback is used transparently.
``use_backend`` switches explicitly, which the benchmark and the backend
parity tests rely on.
"""
from __future__ import annotations

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

_NAMES = ("associativity_witness", "closure_mask", "extend_hom", "local_elimination")

BACKEND = "python"


def available_backends():
    return ["compiled", "python"] if _ckernels is not None else ["python"]


def use_backend(name):
    """Route kernel calls to ``"compiled"`` or ``"python"``; returns the previous name."""
    global BACKEND
    if name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        module = _ckernels
    elif name == "python":
        module = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    previous = BACKEND
    for fn in _NAMES:
        globals()[fn] = getattr(module, fn)
    BACKEND = name
    return previous


use_backend("compiled" if _ckernels is not None else "python")
