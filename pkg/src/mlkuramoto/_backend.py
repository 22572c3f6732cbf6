"""Pick the compiled kernels when importable, else the numpy fallback.

Set ``MLKURAMOTO_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

if _compiled is not None and not os.environ.get("MLKURAMOTO_PURE_PYTHON"):
    kernels = _compiled
else:
    kernels = _kernels_py


def available():
    """Names of the kernel implementations that can be loaded."""
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get(name):
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


# Above this size a BLAS matvec beats the compiled scalar loop for dense RK4.
DENSE_CROSSOVER = 200


def dense_rk4(n):
    """RK4 kernel for an n-node dense system under the active backend."""
    if kernels is _compiled and n >= DENSE_CROSSOVER:
        return _kernels_py.rk4_dense
    return kernels.rk4_dense
