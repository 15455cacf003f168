"""Right-hand sides of the coupled unitary-oscillator system, the
frozen-field drift, and the d = 1 (Kuramoto) and d = 2 (swarming on S^3)
reductions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matcore import (
    UNITARY_TOL,
    check_skew,
    check_unitary,
    dagger,
)

# Pauli basis used by the d = 2 parametrization U = e^{-i theta}(i x.sigma + x4 I).
SIGMA = np.array([
    [[1, 0], [0, -1]],
    [[0, -1j], [1j, 0]],
    [[0, 1], [1, 0]],
], dtype=np.complex128)


@dataclass(frozen=True)
class Oscillator:
    """One oscillator: unitary state u and skew-Hermitian generator a."""

    u: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        if self.u.shape != self.a.shape or self.u.ndim != 2:
            raise ValueError("u and a must be square matrices of equal dimension")

    @property
    def d(self) -> int:
        return self.u.shape[0]


@dataclass
class Ensemble:
    """N oscillators sharing a coupling strength kappa.

    u: (N, d, d) unitary states, a: (N, d, d) skew-Hermitian generators.
    """

    u: np.ndarray
    a: np.ndarray
    kappa: float
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.u = np.ascontiguousarray(self.u, dtype=np.complex128)
        self.a = np.ascontiguousarray(self.a, dtype=np.complex128)
        if self.u.ndim != 3 or self.u.shape[-1] != self.u.shape[-2]:
            raise ValueError("u must have shape (N, d, d)")
        if self.a.shape != self.u.shape:
            raise ValueError("a must match u in shape")
        if self.n < 1:
            raise ValueError("ensemble must contain at least one oscillator")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.validate:
            check_unitary(self.u, UNITARY_TOL)
            check_skew(self.a, 1e-10)

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def d(self) -> int:
        return self.u.shape[-1]

    def oscillator(self, j: int) -> Oscillator:
        return Oscillator(self.u[j], self.a[j])

    def mean_u(self) -> np.ndarray:
        return self.u.mean(axis=0)

    def copy(self) -> "Ensemble":
        return Ensemble(self.u.copy(), self.a.copy(), self.kappa, validate=False)

    def permuted(self, perm) -> "Ensemble":
        perm = np.asarray(perm)
        return Ensemble(self.u[perm], self.a[perm], self.kappa, validate=False)


def generator_batch(u: np.ndarray, a: np.ndarray, kappa: float,
                    mean: np.ndarray | None = None) -> np.ndarray:
    """Drift generators A_j + (kappa/2)(<U> U_j* - U_j <U>*) in centroid
    form; algebraically equal to the pairwise coupling sum."""
    if mean is None:
        mean = u.mean(axis=0)
    return a + (0.5 * kappa) * (mean @ dagger(u) - u @ np.conj(mean.T))


def lohe_generators(e: Ensemble) -> np.ndarray:
    """Per-oscillator skew-Hermitian generators of the coupled flow."""
    return generator_batch(e.u, e.a, e.kappa)


def frozen_field_generator(osc, field_mean: np.ndarray, kappa: float) -> np.ndarray:
    """Drift generator of one oscillator against a frozen ensemble mean:
    A + (kappa/2)(<V> U* - U <V>*)."""
    u, a = (osc.u, osc.a) if isinstance(osc, Oscillator) else osc
    if field_mean.shape != u.shape:
        raise ValueError("field mean dimension does not match the oscillator")
    return a + (0.5 * kappa) * (field_mean @ dagger(u) - u @ np.conj(field_mean.T))


# ---------------------------------------------------------------------------
# d = 1 reduction: phases on the circle.

@dataclass
class KuramotoState:
    thetas: np.ndarray
    nus: np.ndarray
    kappa: float

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        self.nus = np.asarray(self.nus, dtype=float)
        if self.thetas.shape != self.nus.shape:
            raise ValueError("thetas and nus must have equal length")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")


def kuramoto_rhs(s: KuramotoState) -> np.ndarray:
    """theta_dot_j = nu_j + (kappa/N) sum_k sin(theta_k - theta_j)."""
    diff = s.thetas[None, :] - s.thetas[:, None]
    return s.nus + (s.kappa / s.thetas.size) * np.sin(diff).sum(axis=1)


def principal_angle(z: np.ndarray) -> np.ndarray:
    """Principal argument in (-pi, pi]."""
    ang = np.angle(z)
    return np.where(ang <= -np.pi, np.pi, ang)


def lohe_d1_phase(e: Ensemble, tol: float = 1e-8):
    """Phase form of a d = 1 ensemble: returns (thetas, theta_dots).

    With U_j = e^{-i theta_j} and A_j = -i nu_j the coupled flow is the
    classical sinusoidally coupled phase model; theta_dots is obtained from
    the generators and must coincide with kuramoto_rhs.
    """
    if e.d != 1:
        raise ValueError("phase reduction requires d = 1")
    mod = np.abs(e.u[:, 0, 0])
    if np.max(np.abs(mod - 1.0)) > tol:
        raise ValueError("states are not unit-modulus complex numbers")
    thetas = principal_angle(np.conj(e.u[:, 0, 0]))
    gen = lohe_generators(e)[:, 0, 0]
    theta_dots = np.real(1j * gen)
    return thetas, theta_dots


def kuramoto_from_d1(e: Ensemble) -> KuramotoState:
    """Matching phase-model state of a d = 1 ensemble."""
    thetas, _ = lohe_d1_phase(e)
    nus = -e.a[:, 0, 0].imag
    return KuramotoState(thetas, nus, e.kappa)


# ---------------------------------------------------------------------------
# d = 2 reduction: phase + four-vector on S^3.

@dataclass
class SwarmState:
    """Augmented d = 2 state: four-vectors x_j, 4x4 skew-symmetric
    frequency matrices Omega_j, phases and scalar frequencies."""

    xs: np.ndarray
    omegas: np.ndarray
    thetas: np.ndarray
    nus: np.ndarray
    kappa: float

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.omegas = np.asarray(self.omegas, dtype=float)
        self.thetas = np.asarray(self.thetas, dtype=float)
        self.nus = np.asarray(self.nus, dtype=float)
        n = self.xs.shape[0]
        if self.xs.shape != (n, 4) or self.omegas.shape != (n, 4, 4):
            raise ValueError("xs must be (N, 4) and omegas (N, 4, 4)")
        if self.thetas.shape != (n,) or self.nus.shape != (n,):
            raise ValueError("thetas and nus must have length N")
        if np.max(np.abs(self.omegas + self.omegas.swapaxes(-1, -2))) > 1e-12:
            raise ValueError("omegas must be skew-symmetric")
        if np.min(np.linalg.norm(self.xs, axis=1)) <= 0:
            raise ValueError("four-vectors must be nonzero")


def swarming_rhs(s: SwarmState):
    """Velocities (x_dots, theta_dots) of the augmented d = 2 system.

    ||x_j||^2 theta_dot_j = nu_j + (kappa/N) sum_k sin(theta_k - theta_j) <x_j|x_k>
    ||x_j||^2 x_dot_j = Omega_j x_j
        + (kappa/N) sum_k cos(theta_k - theta_j)(||x_j||^2 x_k - <x_j|x_k> x_j)
    """
    n = s.xs.shape[0]
    norm2 = np.einsum("ja,ja->j", s.xs, s.xs)
    if np.min(norm2) <= 0:
        raise ValueError("four-vectors must be nonzero")
    inner = s.xs @ s.xs.T                              # <x_j|x_k>
    dth = s.thetas[None, :] - s.thetas[:, None]        # theta_k - theta_j
    theta_dots = (s.nus + (s.kappa / n) * (np.sin(dth) * inner).sum(axis=1)) / norm2
    free = np.einsum("jab,jb->ja", s.omegas, s.xs)
    cos = np.cos(dth)
    coup = norm2[:, None] * (cos @ s.xs) - (cos * inner).sum(axis=1)[:, None] * s.xs
    x_dots = (free + (s.kappa / n) * coup) / norm2[:, None]
    return x_dots, theta_dots


def pauli_compose(theta: float, x: np.ndarray) -> np.ndarray:
    """U = e^{-i theta}(i sum_k x^k sigma_k + x^4 I)."""
    x = np.asarray(x, dtype=float)
    m = 1j * np.einsum("k,kab->ab", x[:3], SIGMA) + x[3] * np.eye(2)
    return np.exp(-1j * theta) * m


def pauli_decompose(u: np.ndarray):
    """Inverse of pauli_compose on U(2): returns (theta, x) with ||x|| = 1.

    The parametrization is two-to-one; the branch is fixed by taking theta
    in (-pi/2, pi/2] from the phase of det(U)^{1/2}.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2):
        raise ValueError("pauli_decompose requires a 2x2 matrix")
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    theta = -0.5 * np.angle(det)        # det U = e^{-2 i theta}
    flip = False
    if theta <= -np.pi / 2:
        theta += np.pi
        flip = True
    m = np.exp(1j * theta) * u
    x = np.empty(4)
    x[3] = np.real(m[0, 0] + m[1, 1]) / 2
    x[0] = np.imag(m[0, 0] - m[1, 1]) / 2
    x[1] = np.real(m[0, 1] - m[1, 0]) / 2
    x[2] = np.imag(m[0, 1] + m[1, 0]) / 2
    if flip:
        x = -x
    return theta, x


def pauli_h_components(h: np.ndarray):
    """Split a 2x2 Hermitian H into (nu, omega) with H = sum omega^n sigma_n + nu I."""
    h = np.asarray(h, dtype=np.complex128)
    nu = np.real(h[0, 0] + h[1, 1]) / 2
    omega = np.array([np.real(np.trace(h @ SIGMA[k])) / 2 for k in range(3)])
    return nu, omega


def omega_matrix(omega: np.ndarray) -> np.ndarray:
    """4x4 skew-symmetric generator of the four-vector free rotation induced
    by H = sum omega^n sigma_n."""
    w1, w2, w3 = np.asarray(omega, dtype=float)
    return np.array([
        [0.0, w3, -w2, -w1],
        [-w3, 0.0, w1, -w2],
        [w2, -w1, 0.0, -w3],
        [w1, w2, w3, 0.0],
    ])


def swarm_from_ensemble(e: Ensemble) -> SwarmState:
    """Augmented representation of a d = 2 ensemble."""
    if e.d != 2:
        raise ValueError("swarming reduction requires d = 2")
    n = e.n
    xs = np.empty((n, 4))
    thetas = np.empty(n)
    omegas = np.empty((n, 4, 4))
    nus = np.empty(n)
    for j in range(n):
        thetas[j], xs[j] = pauli_decompose(e.u[j])
        nu, w = pauli_h_components(1j * e.a[j])  # H = iA
        nus[j] = nu
        omegas[j] = omega_matrix(w)
    return SwarmState(xs, omegas, thetas, nus, e.kappa)
