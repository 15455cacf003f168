"""Monge-Kantorovich distances of exponent 1 and 2 between equal-size
empirical measures of (U, A) points, by exact assignment.

For uniform-weight clouds of equal size the optimal coupling is a
permutation, so the distance reduces to a linear assignment problem,
solved exactly (Jonker-Volgenant, O(n^3)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .matcore import frobenius_norm
from .model import Ensemble, Oscillator


@dataclass
class PointCloud:
    """Uniform-weight empirical measure on (U, A) pairs; a may be omitted
    for unitary-only clouds (then A = 0)."""

    u: np.ndarray
    a: np.ndarray | None = None

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.complex128)
        if self.u.ndim != 3 or self.u.shape[0] < 1:
            raise ValueError("u must be a nonempty (N, d, d) stack")
        if self.a is None:
            self.a = np.zeros_like(self.u)
        else:
            self.a = np.asarray(self.a, dtype=np.complex128)
            if self.a.shape != self.u.shape:
                raise ValueError("a must match u in shape")

    @classmethod
    def from_ensemble(cls, e: Ensemble) -> "PointCloud":
        return cls(e.u, e.a)

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def d(self) -> int:
        return self.u.shape[-1]


@dataclass
class CostMatrix:
    costs: np.ndarray

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float)
        if self.costs.ndim != 2 or self.costs.shape[0] != self.costs.shape[1]:
            raise ValueError("cost matrix must be square")
        if not np.all(np.isfinite(self.costs)) or np.min(self.costs) < -1e-12:
            raise ValueError("costs must be finite and nonnegative")

    @property
    def n(self) -> int:
        return self.costs.shape[0]


def pair_cost(p: Oscillator, q: Oscillator, exponent: int = 2) -> float:
    """Ground cost between two points: ||U_p - U_q||_2^2 + ||A_p - A_q||_2^2
    for exponent 2, the sum of the two norms for exponent 1."""
    if p.d != q.d:
        raise ValueError("dimension mismatch between points")
    du = frobenius_norm(p.u - q.u)
    da = frobenius_norm(p.a - q.a)
    if exponent == 2:
        return float(du * du + da * da)
    if exponent == 1:
        return float(du + da)
    raise ValueError("exponent must be 1 or 2")


def _sq_dist_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # ||x_i - y_j||_2^2 via the Gram expansion; clip tiny negatives.
    nx = np.sum((x * x.conj()).real, axis=(-2, -1))
    ny = np.sum((y * y.conj()).real, axis=(-2, -1))
    g = np.einsum("iab,jab->ij", x.conj(), y).real
    return np.maximum(nx[:, None] + ny[None, :] - 2.0 * g, 0.0)


def cost_matrix(a: PointCloud, b: PointCloud, exponent: int = 2) -> CostMatrix:
    if a.d != b.d:
        raise ValueError("dimension mismatch between clouds")
    if a.n != b.n:
        raise ValueError("equal-size clouds required")
    u_sq = _sq_dist_matrix(a.u, b.u)
    a_sq = _sq_dist_matrix(a.a, b.a)
    if exponent == 2:
        return CostMatrix(u_sq + a_sq)
    if exponent == 1:
        return CostMatrix(np.sqrt(u_sq) + np.sqrt(a_sq))
    raise ValueError("exponent must be 1 or 2")


def assignment_solve(c: CostMatrix):
    """Minimising permutation and its total cost (exact)."""
    rows, cols = linear_sum_assignment(c.costs)
    perm = np.empty(c.n, dtype=int)
    perm[rows] = cols
    total = float(c.costs[rows, cols].sum())
    return perm, total


def mk_distance(a: PointCloud, b: PointCloud, exponent: int = 2) -> float:
    """Optimal-transport distance between two equal-size uniform clouds:
    sqrt of the minimal mean squared cost for exponent 2, the minimal mean
    cost for exponent 1."""
    c = cost_matrix(a, b, exponent)
    _, total = assignment_solve(c)
    mean_cost = total / a.n
    return float(np.sqrt(mean_cost)) if exponent == 2 else float(mean_cost)
