"""Backend selection for the hot loops.

The compiled Cython module is used when it was built; otherwise the pure-Python
twin is loaded. Setting ``TFDENS_PURE_PYTHON=1`` forces the fallback.
"""

import os

if os.environ.get("TFDENS_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as _impl
        BACKEND = "python"

tf_rk4_log = _impl.tf_rk4_log
bohr_shell_sum = _impl.bohr_shell_sum

__all__ = ["BACKEND", "tf_rk4_log", "bohr_shell_sum"]
