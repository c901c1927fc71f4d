"""Kernel backend selection.

The hot inner loops (deferred acceptance, immediate acceptance, priority
adjustment, blocking detection, deviation scans) exist twice: a compiled
Cython extension and a pure-Python twin with identical signatures and
bit-identical outputs.  The compiled backend is picked at import when
available; set SCHOOLMATCH_BACKEND=py (or =c) to force a choice.
"""

import os

_requested = os.environ.get("SCHOOLMATCH_BACKEND", "auto").lower()

if _requested not in ("auto", "c", "py", "python"):
    raise ValueError(f"SCHOOLMATCH_BACKEND must be auto, c, or py, got {_requested!r}")

if _requested in ("py", "python"):
    from . import pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _requested == "c":
            raise
        from . import pykernels as _impl

BACKEND_NAME = _impl.BACKEND_NAME
MECH_DA = _impl.MECH_DA
MECH_BOSTON = _impl.MECH_BOSTON
da = _impl.da
boston = _impl.boston
fpf_adjust = _impl.fpf_adjust
blocking_mask = _impl.blocking_mask
improving_mask = _impl.improving_mask
