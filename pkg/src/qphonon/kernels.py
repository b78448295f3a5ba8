"""Backend selection for the hot simulation kernels.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is loaded. Set ``QPHONON_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

if os.environ.get("QPHONON_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pykernels as _impl

BACKEND = "cython" if _impl.__name__.endswith("_ckernels") else "numpy"

apply_1q = _impl.apply_1q
apply_2q = _impl.apply_2q
depolarize_pair = _impl.depolarize_pair
pauli_expval_sv = _impl.pauli_expval_sv
pauli_expval_dm = _impl.pauli_expval_dm

__all__ = [
    "BACKEND",
    "apply_1q",
    "apply_2q",
    "depolarize_pair",
    "pauli_expval_sv",
    "pauli_expval_dm",
]
