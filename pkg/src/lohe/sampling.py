"""Seeded construction of initial ensembles from scenario settings."""

from __future__ import annotations

import numpy as np

from .matcore import Rng, expm_skew, frobenius_norm, sample_gaussian_su, sample_haar
from .model import Ensemble

HAMILTONIAN_MODES = ("zero", "identical", "gaussian")
INIT_MODES = ("haar", "cluster")


def sample_states(rng: Rng, d: int, n: int, init_mode: str = "haar",
                  cluster_radius: float = 0.5) -> np.ndarray:
    """Initial unitary states: fully disordered (Haar), or a cluster
    U_j = exp(r xi_j B_j / ||B_j||_2) U_c around a Haar center U_c, with
    B_j Gaussian skew-Hermitian and xi_j uniform in [0, 1]."""
    if init_mode == "haar":
        return sample_haar(rng, d, size=n)
    if init_mode != "cluster":
        raise ValueError(f"unknown init_mode {init_mode!r}")
    if cluster_radius <= 0:
        raise ValueError("cluster radius must be positive")
    center = sample_haar(rng.split("center"), d)
    directions = sample_gaussian_su(rng.split("directions"), d, 1.0, size=n)
    norms = frobenius_norm(directions)
    norms = np.where(norms > 0, norms, 1.0)
    xi = rng.split("radii").generator.uniform(0.0, 1.0, n)
    scale = (cluster_radius * xi / norms)[:, None, None]
    u = np.empty((n, d, d), dtype=np.complex128)
    for j in range(n):
        u[j] = expm_skew(directions[j] * scale[j]) @ center
    return u


def sample_generators(rng: Rng, d: int, n: int, hamiltonian_mode: str = "gaussian",
                      sigma: float = 1.0) -> np.ndarray:
    """Frequency generators A_j = -iH_j: zero, one shared Gaussian draw, or
    independent Gaussian draws of width sigma."""
    if hamiltonian_mode == "zero":
        return np.zeros((n, d, d), dtype=np.complex128)
    if hamiltonian_mode == "identical":
        a = sample_gaussian_su(rng.split("shared"), d, sigma)
        return np.broadcast_to(a, (n, d, d)).copy()
    if hamiltonian_mode == "gaussian":
        return sample_gaussian_su(rng.split("independent"), d, sigma, size=n)
    raise ValueError(f"unknown hamiltonian_mode {hamiltonian_mode!r}")


def sample_ensemble(rng: Rng, d: int, n: int, kappa: float,
                    hamiltonian_mode: str = "gaussian", sigma: float = 1.0,
                    init_mode: str = "haar", cluster_radius: float = 0.5) -> Ensemble:
    u = sample_states(rng.split("states"), d, n, init_mode, cluster_radius)
    a = sample_generators(rng.split("generators"), d, n, hamiltonian_mode, sigma)
    return Ensemble(u, a, kappa)
