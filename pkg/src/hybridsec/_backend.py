"""Kernel backend selection.

The compiled Cython extension is used when importable. Setting the
environment variable ``HYBRIDSEC_BACKEND=python`` forces the numpy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
kernels = _pykernels

if os.environ.get("HYBRIDSEC_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as kernels  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        kernels = _pykernels

phase_project = kernels.phase_project
ins_solve = kernels.ins_solve
