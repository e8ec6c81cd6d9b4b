"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
NumPy fallback is used.  Set ``BLDSIM_BACKEND=numpy`` (or ``compiled``) to
force a choice, e.g. for the backend-equivalence benchmark.
"""

from __future__ import annotations

import os

from . import _kernels_np

try:
    from . import _kernels  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    _kernels = None
    HAVE_COMPILED = False

_FORCED = os.environ.get("BLDSIM_BACKEND", "").strip().lower()


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (or the active default)."""
    choice = name if name is not None else (_FORCED or None)
    if choice in (None, "", "auto"):
        return _kernels if HAVE_COMPILED else _kernels_np
    if choice == "numpy":
        return _kernels_np
    if choice == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel requested but the extension is not built")
        return _kernels
    raise ValueError(f"unknown backend {choice!r}")


_active = get_backend()
BACKEND_NAME: str = _active.BACKEND_NAME
run_em_steps = _active.run_em_steps
