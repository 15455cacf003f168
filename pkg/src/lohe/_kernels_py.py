"""Pure-numpy exponential kernels for batches of skew-Hermitian matrices.

For d = 1 and d = 2 the exponential is evaluated in closed form (the
spectral decomposition worked out analytically), for larger d through a
batched Hermitian eigendecomposition of iA.  Either way the result is
unitary up to roundoff.
"""

import numpy as np

_SINC_CUTOFF = 1e-30


def _dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def _expm_d1(a, t):
    return np.exp(t * a)


def _expm_d2(a, t):
    # a = i*phi*I + b with b traceless skew-Hermitian, b^2 = -r^2 I.
    p = a[..., 0, 0].imag
    q = a[..., 1, 1].imag
    z = a[..., 0, 1]
    phi = 0.5 * (p + q)
    delta = 0.5 * (p - q)
    r = np.sqrt(delta * delta + (z * z.conj()).real)
    c = np.cos(r * t)
    safe = np.where(r > _SINC_CUTOFF, r, 1.0)
    s = np.where(r > _SINC_CUTOFF, np.sin(r * t) / safe, t)
    ph = np.exp(1j * phi * t)
    out = np.empty(np.broadcast_shapes(a.shape), dtype=np.complex128)
    out[..., 0, 0] = ph * (c + 1j * s * delta)
    out[..., 0, 1] = ph * (s * z)
    out[..., 1, 0] = ph * (-s * np.conj(z))
    out[..., 1, 1] = ph * (c - 1j * s * delta)
    return out


def _expm_eigh(a, t):
    lam, w = np.linalg.eigh(1j * a)
    phase = np.exp(-1j * t * lam)
    return (w * phase[..., None, :]) @ _dagger(w)


def expm_batch(a, t=1.0):
    """exp(t*a) for a single or stacked skew-Hermitian a."""
    d = a.shape[-1]
    if d == 1:
        return _expm_d1(a, t)
    if d == 2:
        return _expm_d2(a, t)
    return _expm_eigh(a, t)


def expmul_batch(a, u, t):
    """exp(t*a) @ u for stacked skew-Hermitian a and matching u."""
    return expm_batch(a, t) @ u
