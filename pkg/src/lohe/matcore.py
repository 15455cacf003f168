"""Complex small-matrix primitives.

Norms, skew-Hermitian exponentials, polar retraction to the unitary group,
and seeded sampling of Haar unitaries and Gaussian skew-Hermitian
generators.  Matrices are complex128 ndarrays of shape (d, d); every
routine also accepts a stacked batch (..., d, d) and then maps over the
leading axes.
"""

from __future__ import annotations

import hashlib

import numpy as np

from . import _kernels

# Construction tolerance for accepting a matrix as unitary; freshly sampled
# or retracted values must meet the tighter bound.
UNITARY_TOL = 1e-8
FRESH_UNITARY_TOL = 1e-12
SKEW_TOL = 1e-12


class NumericsError(RuntimeError):
    """A numerical routine left its validity envelope (no convergence,
    singular input, unitarity drift)."""


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(m, -1, -2))


def frobenius_norm(m: np.ndarray):
    """sqrt(trace(M* M)); reduces over the last two axes."""
    m = np.asarray(m)
    return np.sqrt(np.sum((m * m.conj()).real, axis=(-2, -1)))


def operator_norm(m: np.ndarray):
    """Largest singular value; reduces over the last two axes."""
    s = np.linalg.svd(np.asarray(m), compute_uv=False)
    return s[..., 0]


def unitary_defect(u: np.ndarray):
    """Frobenius distance of U*U from the identity."""
    u = np.asarray(u)
    d = u.shape[-1]
    return frobenius_norm(dagger(u) @ u - np.eye(d))


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    defect = np.max(unitary_defect(u))
    if not defect <= tol:
        raise ValueError(f"matrix is not unitary: ||U*U - I||_2 = {defect:.3e} > {tol:.1e}")


def skew_defect(a: np.ndarray):
    return frobenius_norm(np.asarray(a) + dagger(a))


def check_skew(a: np.ndarray, tol: float = SKEW_TOL) -> None:
    defect = np.max(skew_defect(a))
    if not defect <= tol:
        raise ValueError(f"matrix is not skew-Hermitian: ||A + A*||_2 = {defect:.3e} > {tol:.1e}")


def expm_skew(a: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(t*A) for skew-Hermitian A, via the spectral decomposition of the
    Hermitian matrix iA (closed form for d <= 2).  Result is unitary up to
    roundoff."""
    a = np.asarray(a, dtype=np.complex128)
    try:
        return _kernels.expm_batch(a, float(t))
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"eigendecomposition failed in expm_skew: {exc}") from exc


def retract_unitary(m: np.ndarray) -> np.ndarray:
    """Unitary polar factor Q of M = Q P (P Hermitian positive definite).

    Raises NumericsError for (numerically) singular M, where the polar
    factor is not unique.
    """
    m = np.asarray(m, dtype=np.complex128)
    try:
        w, s, vh = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"SVD failed in retract_unitary: {exc}") from exc
    smin = np.min(s[..., -1])
    smax = np.max(s[..., 0])
    if smin <= 1e-13 * max(smax, 1.0):
        raise NumericsError("no unique polar factor: input is numerically singular")
    return w @ vh


def coupling_kernel(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Attractive coupling K(U, V) = U V* - V U*, a skew-Hermitian matrix."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape[-1] != v.shape[-1] or u.shape[-2] != v.shape[-2]:
        raise ValueError(f"dimension mismatch: {u.shape[-2:]} vs {v.shape[-2:]}")
    return u @ dagger(v) - v @ dagger(u)


class Rng:
    """Counter-based pseudorandom stream (Philox) with an explicit 64-bit
    seed.  Identical seed gives an identical sample stream on every
    platform.  Streams are never shared: derive independent children with
    :meth:`split`.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.generator = np.random.Generator(np.random.Philox(key=self.seed))

    def split(self, *labels) -> "Rng":
        """Child stream whose seed is derived from this seed and the labels."""
        h = hashlib.blake2b(digest_size=8)
        h.update(self.seed.to_bytes(8, "little"))
        for label in labels:
            h.update(repr(label).encode())
        return Rng(int.from_bytes(h.digest(), "little"))

    def __repr__(self):
        return f"Rng(seed={self.seed})"


def sample_haar(rng: Rng, d: int, size: int | None = None) -> np.ndarray:
    """Haar-distributed unitary matrices: QR of a complex Ginibre matrix
    with the R-diagonal phase correction."""
    if d < 1:
        raise ValueError("d must be >= 1")
    n = 1 if size is None else int(size)
    g = rng.generator
    x = (g.standard_normal((n, d, d)) + 1j * g.standard_normal((n, d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(x)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[:, None, :]
    return q[0] if size is None else q


def sample_gaussian_su(rng: Rng, d: int, sigma: float = 1.0,
                       size: int | None = None) -> np.ndarray:
    """Gaussian skew-Hermitian matrices: real and imaginary parts of each
    strictly-lower entry and the imaginary part of each diagonal entry are
    independent N(0, sigma^2); the upper triangle follows from A = -A*."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    n = 1 if size is None else int(size)
    g = rng.generator
    re = g.normal(0.0, sigma, (n, d, d))
    im = g.normal(0.0, sigma, (n, d, d))
    lower = np.tril(re + 1j * im, -1)
    a = lower - dagger(lower)
    idx = np.arange(d)
    a[:, idx, idx] = 1j * im[:, idx, idx]
    return a[0] if size is None else a
