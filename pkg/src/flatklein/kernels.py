"""Backend selection for the batch evaluation kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation is used.  Setting ``FLATKLEIN_PURE_PYTHON=1`` forces the
fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py


def _load_compiled() -> ModuleType | None:
    if os.environ.get("FLATKLEIN_PURE_PYTHON", "") not in ("", "0"):
        return None
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()
_active: ModuleType = _compiled if _compiled is not None else _kernels_py

BACKEND = "cython" if _compiled is not None else "python"


def available_backends() -> list[str]:
    return ["cython", "python"] if _compiled is not None else ["python"]


def get_backend(name: str | None = None) -> ModuleType:
    if name is None:
        return _active
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def locate(*args):
    return _active.locate(*args)


def evaluate_pieces(*args):
    return _active.evaluate_pieces(*args)


def jacobian_pieces(*args):
    return _active.jacobian_pieces(*args)
