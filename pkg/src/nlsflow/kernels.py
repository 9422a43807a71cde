"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when
``NLSFLOW_PURE_PYTHON`` is set to a non-empty value, the numpy fallback is
loaded.  Both expose ``direct_cubic`` and ``nonresonant_sum``.
"""

import os

from nlsflow import _kernels_py

try:
    if os.environ.get("NLSFLOW_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from nlsflow import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _kernels_py

direct_cubic = _impl.direct_cubic
nonresonant_sum = _impl.nonresonant_sum


def backends():
    """Available implementations keyed by name (for tests and benchmarks)."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
