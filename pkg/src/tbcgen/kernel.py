"""Evaluation backend selection.

The compiled kernel is preferred when the extension built; otherwise the
pure-Python kernel takes over with identical semantics. Set
``TBCGEN_BACKEND=python`` or ``TBCGEN_BACKEND=compiled`` to force a choice
(the benchmark uses this to compare both).
"""

from __future__ import annotations

import os

_requested = os.environ.get("TBCGEN_BACKEND", "auto").strip().lower()

if _requested in ("auto", "", "compiled", "c"):
    try:
        from . import _kernel_c as _impl

        BACKEND = "compiled"
    except ImportError:
        if _requested in ("compiled", "c"):
            raise ImportError(
                "TBCGEN_BACKEND=compiled but the tbcgen._kernel_c extension "
                "is not built"
            ) from None
        from . import _kernel_py as _impl

        BACKEND = "python"
elif _requested == "python":
    from . import _kernel_py as _impl

    BACKEND = "python"
else:
    raise ImportError(f"unknown TBCGEN_BACKEND value {_requested!r}")

run_program = _impl.run_program


def backend_name() -> str:
    """Which kernel is active: 'compiled' or 'python'."""
    return BACKEND
