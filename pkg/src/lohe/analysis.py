"""Synchronization diagnostics and the theorem-side curves they are tested
against: support diameter, frequency spread, the dispersion functional, the
cubic barrier roots and ODE, decay envelopes, and the mean-field error
bound."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matcore import dagger
from .transport import PointCloud, _sq_dist_matrix

SQRT_2_3 = np.sqrt(2.0 / 3.0)
ETA_MAX = (2.0 / 3.0) ** 1.5  # largest eta with two nonnegative cubic roots


@dataclass
class DiagnosticSeries:
    """Time-indexed named columns (D, Lambda, JN, envelopes, bounds...)."""

    times: np.ndarray
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != self.times.shape:
                raise ValueError(f"column {name!r} does not match the time grid")
            self.columns[name] = col

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def to_csv(self):
        """CSV form: a t column followed by the named columns in insertion
        order."""
        from .csvio import CsvReport

        names = list(self.columns)
        rows = [[float(self.times[k])] + [float(self.columns[n][k]) for n in names]
                for k in range(self.times.size)]
        return CsvReport(["t"] + names, rows)


@dataclass(frozen=True)
class CubicRoots:
    """The two nonnegative roots of z^3/2 - z + eta, bracketing sqrt(2/3)."""

    eta: float
    zeta1: float
    zeta2: float


def _pairwise_max_dist(x: np.ndarray) -> float:
    sq = _sq_dist_matrix(x, x)
    np.fill_diagonal(sq, 0.0)  # self-distances are exactly zero
    return float(np.sqrt(np.max(sq)))


def diameter(cloud: PointCloud) -> float:
    """Largest pairwise ||U_i - U_j||_2 over the cloud."""
    return _pairwise_max_dist(cloud.u)


def frequency_spread(cloud: PointCloud) -> float:
    """Largest pairwise ||A_i - A_j||_2; a constant of the coupled motion."""
    return _pairwise_max_dist(cloud.a)


def lambda_functional(cloud: PointCloud) -> float:
    """Mean squared dispersion (1/N^2) sum_ij ||U_i - U_j||_2^2, diagonal
    terms included (product-measure convention)."""
    norms = np.sum((cloud.u * cloud.u.conj()).real, axis=(-2, -1))
    mean = cloud.u.mean(axis=0)
    return float(max(2.0 * norms.mean() - 2.0 * np.sum((mean * mean.conj()).real), 0.0))


def _cubic(z, eta):
    return 0.5 * z**3 - z + eta


def _bisect_newton(lo: float, hi: float, eta: float) -> float:
    flo = _cubic(lo, eta)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = _cubic(mid, eta)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    for _ in range(4):
        deriv = 1.5 * z * z - 1.0
        if deriv == 0.0:
            break
        z -= _cubic(z, eta) / deriv
    return z


def zeta_roots(eta: float) -> CubicRoots:
    """Both nonnegative roots of z^3/2 - z + eta = 0 for eta in
    [0, (2/3)^{3/2}): zeta1 < sqrt(2/3) < zeta2."""
    if not 0.0 <= eta < ETA_MAX:
        raise ValueError("no two nonnegative roots: eta must lie in [0, (2/3)^{3/2})")
    if eta == 0.0:
        return CubicRoots(0.0, 0.0, np.sqrt(2.0))
    z1 = _bisect_newton(0.0, SQRT_2_3, eta)
    z2 = _bisect_newton(SQRT_2_3, np.sqrt(2.0), eta)
    return CubicRoots(eta, z1, z2)


def barrier_ode(alpha: float, kappa: float, y0: float, t_grid) :
    """Dominating scalar ODE y' = alpha - kappa*y + (kappa/2) y^3 solved by
    classical RK4 on the given grid (internal substeps of at most 1e-3).

    Returns (y values on the grid, first grid time with y <= sqrt(2/3), or
    None if never reached).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if alpha < 0 or kappa <= 0 or y0 < 0:
        raise ValueError("outside barrier regime: need alpha >= 0, kappa > 0, y0 >= 0")
    eta = alpha / kappa
    if eta >= ETA_MAX:
        raise ValueError("outside barrier regime: alpha/kappa must be below (2/3)^{3/2}")
    z2 = zeta_roots(eta).zeta2
    if y0 >= z2:
        raise ValueError("outside barrier regime: y0 must lie below the largest root")

    def rhs(y):
        return alpha - kappa * y + 0.5 * kappa * y**3

    ys = np.empty_like(t_grid)
    y = float(y0)
    prev = t_grid[0]
    if prev != 0.0:
        raise ValueError("t_grid must start at 0")
    ys[0] = y
    for i in range(1, t_grid.size):
        span = t_grid[i] - prev
        n_sub = max(1, int(np.ceil(span / 1e-3)))
        h = span / n_sub
        for _ in range(n_sub):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
            y += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i] = y
        prev = t_grid[i]
    if np.max(ys) >= z2:
        raise ValueError("barrier solution escaped the invariant interval")
    crossing = np.nonzero(ys <= SQRT_2_3)[0]
    first_crossing = float(t_grid[crossing[0]]) if crossing.size else None
    return ys, first_crossing


def sync_envelopes(d0: float, kappa: float, t):
    """Closed-form lower and upper envelopes for the squared support
    diameter D(t)^2 under identical Hamiltonians:

        D0^2 e^{-2 kt} (1 - D0^2 (1 - e^{-2 kt})/2)
            <= D(t)^2 <= 2 D0^2 / ((2 - D0^2) e^{2 kt} + D0^2).
    """
    if not 0.0 <= d0 < np.sqrt(2.0):
        raise ValueError("outside small-support regime: need 0 <= D(0) < sqrt(2)")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    dec = np.exp(-2.0 * kappa * t)
    lower = d0**2 * dec * (1.0 - 0.5 * d0**2 * (1.0 - dec))
    upper = 2.0 * d0**2 / ((2.0 - d0**2) / dec + d0**2)
    return lower, upper


def thm31_bound(d: int, n: int, t):
    """Mean-field error bound (8d/5N)(e^{10t} - 1) for the coupled-run
    discrepancy functional."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be >= 1")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    out = (8.0 * d / (5.0 * n)) * (np.expm1(10.0 * t))
    return float(out) if out.ndim == 0 else out


def practical_sync_limit(alpha: float, kappa: float) -> float:
    """Asymptotic dispersion level 3*alpha/(2*kappa), valid in the regime
    kappa > (3/2)^{3/2} * alpha > 0."""
    if not alpha > 0:
        raise ValueError("regime violation: alpha must be positive")
    if not kappa > (1.5 ** 1.5) * alpha:
        raise ValueError("regime violation: kappa must exceed (3/2)^{3/2} * alpha")
    return 1.5 * alpha / kappa


def aux_identity_check(u1: np.ndarray, u2: np.ndarray, cloud: PointCloud):
    """Both sides of the auxiliary trace identity behind the contraction
    estimates, with <.> the empirical mean over the cloud:

        trace((U1-U2)*(U2 <V*> U2 - U1 <V*> U1))
          + trace((U2* <V> U2* - U1* <V> U1*)(U1-U2))
        = -4 ||U1-U2||_2^2
          + trace(<(V-U2)(V-U2)*>(U1-U2)(U1-U2)*)
          + trace(<(V-U1)(V-U1)*>(U1-U2)(U1-U2)*).

    Returns (lhs, rhs, |lhs - rhs|).
    """
    if u1.shape != u2.shape or u1.shape[-1] != cloud.d:
        raise ValueError("dimension mismatch")
    m = cloud.u.mean(axis=0)
    ms = np.conj(m.T)
    diff = u1 - u2
    lhs = np.trace(dagger(diff) @ (u2 @ ms @ u2 - u1 @ ms @ u1)) \
        + np.trace((dagger(u2) @ m @ dagger(u2) - dagger(u1) @ m @ dagger(u1)) @ diff)
    w = diff @ dagger(diff)
    s1 = (cloud.u - u1)
    s2 = (cloud.u - u2)
    cov1 = np.einsum("jab,jcb->ac", s1, s1.conj()) / cloud.n
    cov2 = np.einsum("jab,jcb->ac", s2, s2.conj()) / cloud.n
    rhs = -4.0 * np.sum((diff * diff.conj()).real) \
        + np.trace(cov2 @ w) + np.trace(cov1 @ w)
    lhs = complex(lhs).real
    rhs = complex(rhs).real
    return lhs, rhs, abs(lhs - rhs)
