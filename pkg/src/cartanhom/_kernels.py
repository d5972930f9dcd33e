"""Kernel backend selection.

The compiled extension is used when it was built and imports cleanly;
setting ``CARTANHOM_PURE_PYTHON=1`` forces the reference implementation.
"""
import os

BACKEND = "python"

if os.environ.get("CARTANHOM_PURE_PYTHON", "") not in ("", "0"):
    from ._pykernels import *  # noqa: F401,F403
else:
    try:
        from ._ckernels import *  # noqa: F401,F403

        BACKEND = "cython"
    except ImportError:
        from ._pykernels import *  # noqa: F401,F403
