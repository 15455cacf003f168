"""Kernel dispatch: compiled extension when available, numpy otherwise.

`BACKEND` records which implementation serves the d <= 2 hot paths; larger
dimensions always use the batched eigendecomposition in `_kernels_py`.
"""

import numpy as np

from . import _kernels_py

try:
    from . import _kernels_cy

    BACKEND = "compiled"
except ImportError:
    _kernels_cy = None
    BACKEND = "numpy"

expm_batch = _kernels_py.expm_batch


def _compiled_ok(a, u):
    return (
        _kernels_cy is not None
        and a.ndim == 3
        and a.dtype == np.complex128
        and u.dtype == np.complex128
        and a.flags.c_contiguous
        and u.flags.c_contiguous
    )


def expmul_batch(a, u, t):
    """exp(t*a) @ u over a (n, d, d) batch of skew-Hermitian generators."""
    d = a.shape[-1]
    if d == 1 and _compiled_ok(a, u):
        return _kernels_cy.expmul_d1(a, u, t)
    if d == 2 and _compiled_ok(a, u):
        return _kernels_cy.expmul_d2(a, u, t)
    return _kernels_py.expmul_batch(a, u, t)
