"""Kernel selection: compiled extension when available, else pure Python.

Set ``TODA_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("TODA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

closed_subsets = _impl.closed_subsets
count_closed_bruteforce = _impl.count_closed_bruteforce


def poly_mul(keys1, coefs1, keys2, coefs2):
    """Packed-key sparse product; exact for any coefficient size."""
    if _impl is not _kernels_py:
        try:
            return _impl.poly_mul(keys1, coefs1, keys2, coefs2)
        except OverflowError:
            pass
    return _kernels_py.poly_mul(keys1, coefs1, keys2, coefs2)
