"""Kinetic machinery: a large-ensemble reference run that freezes the mean
field, the frozen-field characteristic flow, the coupled-run discrepancy
functional J_N, the identical-Hamiltonian gauge transform, and the
mean-field fluctuation bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrate import StepperConfig, Trajectory, integrate
from .matcore import Rng, coupling_kernel, expm_skew, frobenius_norm, sample_haar
from .model import Ensemble, generator_batch


class GridMismatchError(ValueError):
    """A characteristic run asked for the field at a time that was never
    recorded by the reference run."""


@dataclass
class FieldTrajectory:
    """Recorded ensemble means <U>(t) of a reference run, at every time the
    stepper evaluates generators (step starts, midpoints for cf2, and
    t_end)."""

    times: np.ndarray
    means: np.ndarray
    kappa: float
    d: int

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.means = np.asarray(self.means, dtype=np.complex128)
        if self.means.shape != (self.times.size, self.d, self.d):
            raise ValueError("means must have shape (len(times), d, d)")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        norms = np.linalg.svd(self.means, compute_uv=False)[..., 0]
        if norms.size and np.max(norms) > 1.0 + 1e-10:
            raise ValueError("a mean of unitaries must have operator norm <= 1")

    def mean_at(self, t: float) -> np.ndarray:
        idx = int(np.searchsorted(self.times, t - 1e-9))
        if idx >= self.times.size or abs(self.times[idx] - t) > 1e-9:
            raise GridMismatchError(
                f"field has no value at t = {t!r}; characteristic grid must be "
                "a subgrid of the reference evaluation times")
        return self.means[idx]


def reference_field(e0: Ensemble, cfg: StepperConfig) -> FieldTrajectory:
    """Integrate the coupled system and record <U> at every generator
    evaluation time, plus the final mean at t_end."""
    times: list[float] = []
    means: list[np.ndarray] = []

    def gen(e, t):
        m = e.u.mean(axis=0)
        times.append(t)
        means.append(m)
        return generator_batch(e.u, e.a, e.kappa, mean=m)

    traj = integrate(e0, cfg, generator_fn=gen)
    times.append(float(traj.times[-1]))
    means.append(traj.final.mean_u())
    return FieldTrajectory(np.asarray(times), np.asarray(means), e0.kappa, e0.d)


def flow_characteristics(initials: Ensemble, field: FieldTrajectory,
                         cfg: StepperConfig) -> Trajectory:
    """Integrate each oscillator independently in the frozen field: the
    drift is A_j + (kappa/2)(<V>(t) U_j* - U_j <V>(t)*) with <V> read off
    the reference grid at exactly the stepper's evaluation times."""
    if initials.d != field.d:
        raise ValueError("dimension mismatch between initials and field")

    def gen(e, t):
        return generator_batch(e.u, e.a, e.kappa, mean=field.mean_at(t))

    return integrate(initials, cfg, generator_fn=gen)


@dataclass
class CoupledRun:
    """An interacting run and a frozen-field characteristic run started
    from the same initial oscillators on the same grid."""

    interacting: Trajectory
    characteristic: Trajectory

    def __post_init__(self):
        ti, tc = self.interacting.times, self.characteristic.times
        if ti.shape != tc.shape or np.max(np.abs(ti - tc)) > 1e-12:
            raise ValueError("coupled runs must share the time grid")
        e_i, e_c = self.interacting.snapshots[0], self.characteristic.snapshots[0]
        if e_i.u.shape != e_c.u.shape:
            raise ValueError("coupled runs must share N and d")
        if np.max(np.abs(e_i.u - e_c.u)) > 0 or np.max(np.abs(e_i.a - e_c.a)) > 0:
            raise ValueError("coupled runs must start from identical oscillators")


def coupled_run(e0: Ensemble, field: FieldTrajectory, cfg: StepperConfig) -> CoupledRun:
    """Run the interacting system and its mean-field characteristics from
    the same initial data."""
    return CoupledRun(interacting=integrate(e0, cfg),
                      characteristic=flow_characteristics(e0, field, cfg))


def jn_series(run: CoupledRun):
    """Discrepancy functional on the recorded grid:

        J_N(t_k) = (1/N) sum_j (||U_j - V_j||_2^2 + ||A_j - B_j||_2^2)

    with U from the characteristic run and V from the interacting run.
    Zero at t = 0 for diagonally coupled runs, and an upper bound for the
    squared exponent-2 transport distance between the two clouds.
    """
    from .analysis import DiagnosticSeries

    times = run.interacting.times
    values = np.empty(times.size)
    for k, (ei, ec) in enumerate(zip(run.interacting.snapshots,
                                     run.characteristic.snapshots)):
        du = frobenius_norm(ec.u - ei.u)
        da = frobenius_norm(ec.a - ei.a)
        values[k] = float(np.mean(du * du + da * da))
    return DiagnosticSeries(times, {"JN": values})


def gauge_transform(traj: Trajectory, a0: np.ndarray) -> Trajectory:
    """Left-translate each snapshot by exp(-t_k * a0).  For a run whose
    oscillators all carry the common generator a0, the transformed states
    solve the zero-Hamiltonian dynamics, so the returned snapshots carry
    zero generators."""
    for s in traj.snapshots:
        if np.max(np.abs(s.a - a0)) > 1e-12:
            raise ValueError("gauge transform requires all oscillators to share a0")
    zero = np.zeros_like(traj.snapshots[0].a)
    snapshots = []
    for t, s in zip(traj.times, traj.snapshots):
        rot = expm_skew(a0, -float(t))
        snapshots.append(Ensemble(rot @ s.u, zero, s.kappa))
    return Trajectory(traj.times.copy(), snapshots)


def field_to_csv(field: FieldTrajectory):
    """CSV form of a field trajectory: one row per time, the d^2 complex
    entries flattened row-major as interleaved (re, im) pairs."""
    from .csvio import CsvReport

    d = field.d
    header = ["t"]
    for i in range(d):
        for j in range(d):
            header += [f"u{i}{j}_re", f"u{i}{j}_im"]
    rows = []
    for t, m in zip(field.times, field.means):
        row = [float(t)]
        for v in m.reshape(-1):
            row += [float(v.real), float(v.imag)]
        rows.append(row)
    return CsvReport(header, rows)


def field_from_csv(text: str, kappa: float) -> FieldTrajectory:
    """Inverse of field_to_csv (kappa is not part of the CSV contract)."""
    lines = text.strip().splitlines()
    ncols = len(lines[0].split(","))
    d = int(round(np.sqrt((ncols - 1) / 2)))
    if 1 + 2 * d * d != ncols:
        raise ValueError("column count does not match a square complex layout")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    times = data[:, 0]
    flat = data[:, 1::2] + 1j * data[:, 2::2]
    return FieldTrajectory(times, flat.reshape(-1, d, d), kappa, d)


@dataclass(frozen=True)
class FluctuationResult:
    estimate: float
    bound: float
    std_error: float
    max_coupling_norm: float


def field_fluctuation_bound_check(rng: Rng, d: int, n: int,
                                  samples: int = 1000) -> FluctuationResult:
    """Monte-Carlo estimate of E || (1/N) sum_k V(U_k) ||_2^2 against the
    bound 16d/N, where V(U_k) is the coupling fluctuation of sample k
    around the ensemble average of the sampling measure (here Haar, whose
    ensemble mean vanishes):

        V(U_k) = int (K(W, U_1) - K(U_k, U_1)) Haar(dW) = -K(U_k, U_1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    vals = np.empty(samples)
    max_norm = 0.0
    for i in range(samples):
        us = sample_haar(rng, d, size=n)
        u1 = us[0]
        v = -coupling_kernel(us, u1)
        max_norm = max(max_norm, float(np.max(frobenius_norm(v))))
        s = v.mean(axis=0)
        vals[i] = float(np.sum((s * s.conj()).real))
    estimate = float(vals.mean())
    std_error = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return FluctuationResult(estimate, 16.0 * d / n, std_error, max_norm)
