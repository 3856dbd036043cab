"""Backend selection for the structure-constant kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
Setting ``STARQUANT_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _pykernels

python_impl = _pykernels

try:
    from . import _ckernels as compiled_impl
except ImportError:  # extension not built
    compiled_impl = None

if compiled_impl is not None and not os.environ.get("STARQUANT_PURE_PYTHON"):
    _impl = compiled_impl
    BACKEND = "cython"
else:
    _impl = python_impl
    BACKEND = "python"

associator = _impl.associator
associator_jacobian = _impl.associator_jacobian
two_term_operator = _impl.two_term_operator


def available_backends():
    """Mapping of backend name to kernel module, compiled first when present."""
    out = {}
    if compiled_impl is not None:
        out["cython"] = compiled_impl
    out["python"] = python_impl
    return out
