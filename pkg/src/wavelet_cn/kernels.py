"""Kernel selection.

The compiled extension is used when it imports; otherwise the pure-Python
module takes over.  Setting ``WAVELET_CN_PURE_PYTHON=1`` forces the
fallback.
"""

import os

from . import _kernels_py as pure

compiled = None
if os.environ.get("WAVELET_CN_PURE_PYTHON", "").strip() in ("", "0"):
    try:
        from . import _kernels as compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else pure
COMPILED = compiled is not None
BACKEND = "compiled" if COMPILED else "python"
BIG = pure.BIG

zp_scan = active.zp_scan
fpt_scan = active.fpt_scan


def implementation(name=None):
    """Return the kernel module by name ('compiled', 'python') or the active one."""
    if name is None:
        return active
    if name == "python":
        return pure
    if name == "compiled":
        if compiled is None:
            raise ImportError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown kernel implementation {name!r}")
