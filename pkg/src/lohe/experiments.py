"""End-to-end verification experiments behind the CLI subcommands.

Each runner returns (CsvReport, checks) where `checks` maps named
assertions about the certified bounds and identities to booleans; a False
entry makes the CLI exit with status 2.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .analysis import (
    barrier_ode,
    diameter,
    frequency_spread,
    lambda_functional,
    practical_sync_limit,
    sync_envelopes,
    thm31_bound,
    zeta_roots,
)
from .config import ConfigError, ScenarioConfig
from .csvio import CsvReport
from .integrate import StepperConfig, integrate, split_integrate
from .matcore import Rng, frobenius_norm
from .meanfield import (
    coupled_run,
    field_fluctuation_bound_check,
    gauge_transform,
    jn_series,
    reference_field,
)
from .model import (
    SIGMA,
    Ensemble,
    KuramotoState,
    SwarmState,
    kuramoto_from_d1,
    kuramoto_rhs,
    lohe_d1_phase,
    omega_matrix,
    pauli_compose,
    pauli_decompose,
    swarming_rhs,
)
from .sampling import sample_ensemble, sample_generators, sample_states
from .transport import PointCloud, mk_distance

DEFAULT_FLUCTUATION_NS = (8, 16, 32, 64, 128, 256, 512)


def _stepper(cfg: ScenarioConfig, t_end: float | None = None,
             record_every: int | None = None) -> StepperConfig:
    return StepperConfig(
        method=cfg.method,
        dt=cfg.dt,
        t_end=cfg.t_end if t_end is None else t_end,
        record_every=cfg.record_every if record_every is None else record_every,
        retract_every=cfg.retract_every,
    )


def _run_jobs(jobs, fn, threads: int):
    if threads <= 1:
        return [fn(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def _wrap_angle(x):
    """Map angles to (-pi, pi]."""
    y = np.remainder(x + np.pi, 2.0 * np.pi) - np.pi
    return np.where(y == -np.pi, np.pi, y)


# ---------------------------------------------------------------------------
# simulate

def run_simulate(cfg: ScenarioConfig):
    """Integrate one scenario and report D(t), Lambda(t); for zero or
    identical Hamiltonians with D(0) < sqrt(2), append the closed-form
    decay envelopes computed from the measured D(0) and check containment."""
    rng = Rng(cfg.seed)
    e0 = sample_ensemble(rng.split("init"), cfg.d, cfg.n, cfg.kappa,
                         cfg.hamiltonian_mode, cfg.sigma,
                         cfg.init_mode, cfg.cluster_radius)
    traj = integrate(e0, _stepper(cfg))
    clouds = [PointCloud.from_ensemble(s) for s in traj.snapshots]
    d_vals = np.array([diameter(c) for c in clouds])
    l_vals = np.array([lambda_functional(c) for c in clouds])

    header = ["t", "D", "Lambda"]
    cols = [traj.times, d_vals, l_vals]
    checks = {}
    identical = cfg.hamiltonian_mode in ("zero", "identical")
    if identical and cfg.kappa > 0 and d_vals[0] < np.sqrt(2.0):
        lower, upper = sync_envelopes(float(d_vals[0]), cfg.kappa, traj.times)
        header += ["env_lower", "env_upper"]
        cols += [lower, upper]
        d_sq = d_vals**2
        checks["envelope_containment"] = bool(
            np.all(d_sq >= lower - 1e-3) and np.all(d_sq <= upper + 1e-3))
    rows = [[float(c[k]) for c in cols] for k in range(traj.times.size)]
    return CsvReport(header, rows), checks


# ---------------------------------------------------------------------------
# converge

def run_converge(cfg: ScenarioConfig, threads: int = 1):
    """Mean-field convergence experiment: for each N and repetition, couple
    an interacting run with a frozen-field characteristic run from shared
    initials and record J_N along the grid together with the exact
    squared transport distance between the two clouds."""
    if cfg.n_list is None:
        raise ConfigError("config key 'n_list' is required for converge")
    n_max = max(cfg.n_list)
    p = cfg.p_reference if cfg.p_reference is not None else 8 * n_max
    if p < 8 * n_max:
        raise ConfigError("config key 'p_reference' must be at least 8*max(n_list)")

    rng = Rng(cfg.seed)
    ref = sample_ensemble(rng.split("reference"), cfg.d, p, cfg.kappa,
                          cfg.hamiltonian_mode, cfg.sigma,
                          cfg.init_mode, cfg.cluster_radius)
    stepper = _stepper(cfg)
    field = reference_field(ref, stepper)

    def one(job):
        n, rep = job
        e0 = sample_ensemble(rng.split("rep", n, rep), cfg.d, n, cfg.kappa,
                             cfg.hamiltonian_mode, cfg.sigma,
                             cfg.init_mode, cfg.cluster_radius)
        run = coupled_run(e0, field, stepper)
        jn = jn_series(run)["JN"]
        mk2 = np.empty_like(jn)
        for k, (ei, ec) in enumerate(zip(run.interacting.snapshots,
                                         run.characteristic.snapshots)):
            dist = mk_distance(PointCloud.from_ensemble(ec),
                               PointCloud.from_ensemble(ei), exponent=2)
            mk2[k] = dist * dist
        times = run.interacting.times
        return times, jn, mk2

    jobs = [(n, rep) for n in cfg.n_list for rep in range(cfg.repetitions)]
    results = _run_jobs(jobs, one, threads)

    mk2_below_jn = True
    jn_below_bound = True
    rows = []
    jn_final_means = []
    times = results[0][0]
    for i, n in enumerate(cfg.n_list):
        block = results[i * cfg.repetitions:(i + 1) * cfg.repetitions]
        jn_all = np.stack([r[1] for r in block])
        mk2_all = np.stack([r[2] for r in block])
        bound = thm31_bound(cfg.d, n, times)
        mk2_below_jn &= bool(np.all(mk2_all <= jn_all + 1e-10))
        jn_below_bound &= bool(np.all(jn_all <= bound[None, :] + 1e-12))
        jn_mean = jn_all.mean(axis=0)
        mk2_mean = mk2_all.mean(axis=0)
        jn_final_means.append(jn_mean[-1])
        for k in range(times.size):
            rows.append([n, float(times[k]), float(jn_mean[k]),
                         float(bound[k]), float(mk2_mean[k])])

    slope = float(np.polyfit(np.log(np.asarray(cfg.n_list, dtype=float)),
                             np.log(np.asarray(jn_final_means)), 1)[0])
    checks = {
        "mk2_below_jn": mk2_below_jn,
        "jn_below_bound": jn_below_bound,
        "slope": slope,
        "slope_in_range": bool(-1.3 <= slope <= -0.7),
    }
    report = CsvReport(["N", "t", "JN_mean", "thm31_bound", "mk2_sq"], rows)
    return report, checks


# ---------------------------------------------------------------------------
# practical synchronization

def _barrier_crossing(alpha: float, kappa: float, y0: float) -> float:
    horizon = 1.0
    while horizon <= 64.0:
        grid = np.linspace(0.0, horizon, max(2, int(horizon / 1e-2) + 1))
        _, crossing = barrier_ode(alpha, kappa, y0, grid)
        if crossing is not None:
            return crossing
        horizon *= 2.0
    raise ConfigError("barrier solution does not cross sqrt(2/3) within the horizon")


def run_practical_sync(cfg: ScenarioConfig):
    """Coupling-strength sweep: one long run per kappa from shared initial
    data with frequency spread rescaled to exactly alpha; records the
    terminal dispersion against the asymptotic level 3*alpha/(2*kappa)."""
    if cfg.kappa_list is None or cfg.alpha is None:
        raise ConfigError("config keys 'kappa_list' and 'alpha' are required "
                          "for practical-sync")
    alpha = cfg.alpha
    rng = Rng(cfg.seed)
    u0 = sample_states(rng.split("states"), cfg.d, cfg.n,
                       cfg.init_mode, cfg.cluster_radius)
    a0 = sample_generators(rng.split("generators"), cfg.d, cfg.n, "gaussian", cfg.sigma)
    spread = frequency_spread(PointCloud(u0, a0))
    if spread <= 0:
        raise ConfigError("sampled frequency spread is zero; cannot rescale to alpha")
    a0 = a0 * (alpha / spread)

    d0 = diameter(PointCloud(u0))
    plans = []
    for kappa in cfg.kappa_list:
        try:
            limit = practical_sync_limit(alpha, kappa)   # regime guard
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if d0 >= zeta_roots(alpha / kappa).zeta2:
            raise ConfigError(
                f"measured D(0) = {d0:.3f} is outside the invariant region "
                f"for kappa = {kappa}")
        crossing = _barrier_crossing(alpha, kappa, d0)
        t_end = 5.0 * crossing + 12.0 / kappa
        t_end = max(cfg.dt, np.ceil(t_end / cfg.dt) * cfg.dt)
        plans.append((kappa, limit, t_end))

    rows = []
    sqrt_finals = []
    for kappa, limit, t_end in plans:
        e0 = Ensemble(u0.copy(), a0.copy(), kappa)
        stepper = _stepper(cfg, t_end=t_end, record_every=round(t_end / cfg.dt))
        traj = integrate(e0, stepper)
        lam = lambda_functional(PointCloud.from_ensemble(traj.final))
        sqrt_lam = float(np.sqrt(lam))
        sqrt_finals.append(sqrt_lam)
        rows.append([float(kappa), float(alpha), float(lam), sqrt_lam, float(limit)])

    tol = [0.05 * alpha / kappa for kappa, _, _ in plans]
    below = all(row[3] <= row[4] + t for row, t in zip(rows, tol))
    decreasing = all(b < a for a, b in zip(sqrt_finals, sqrt_finals[1:]))
    checks = {"sqrt_lambda_below_limit": bool(below),
              "sqrt_lambda_decreasing_in_kappa": bool(decreasing)}
    report = CsvReport(
        ["kappa", "alpha", "lambda_final", "sqrt_lambda_final", "limit_3a_over_2k"],
        rows)
    return report, checks


# ---------------------------------------------------------------------------
# reduction checks

def _rk2_midpoint(y0, rhs, dt, n_steps, record_every):
    """Classical explicit-midpoint integration of a flat ODE, recording on
    the same schedule as the group integrator."""
    times = [0.0]
    states = [y0]
    y = y0
    for n in range(n_steps):
        half = y + 0.5 * dt * rhs(y)
        y = y + dt * rhs(half)
        if (n + 1) % record_every == 0 or n + 1 == n_steps:
            times.append((n + 1) * dt)
            states.append(y)
    return np.asarray(times), states


def _check_kuramoto(cfg: ScenarioConfig, rng: Rng):
    n = 8
    e0 = sample_ensemble(rng, 1, n, cfg.kappa, "gaussian", cfg.sigma, "haar")
    stepper = _stepper(cfg, record_every=max(1, cfg.record_every))
    traj = integrate(e0, stepper)
    state0 = kuramoto_from_d1(e0)

    def rhs(thetas):
        return kuramoto_rhs(KuramotoState(thetas, state0.nus, cfg.kappa))

    _, thetas = _rk2_midpoint(state0.thetas, rhs, cfg.dt, stepper.n_steps,
                              stepper.record_every)
    err = 0.0
    for snap, th in zip(traj.snapshots, thetas):
        phase, _ = lohe_d1_phase(snap)
        err = max(err, float(np.max(np.abs(_wrap_angle(phase - th)))))
    return err


def _check_swarming(cfg: ScenarioConfig, rng: Rng):
    n = 8
    gen = rng.generator
    xs = gen.standard_normal((n, 4))
    xs /= np.linalg.norm(xs, axis=1)[:, None]
    omegas_vec = gen.normal(0.0, cfg.sigma, (n, 3))
    u0 = np.stack([pauli_compose(0.0, x) for x in xs])
    # A_j = -i sum_n w^n sigma_n  (nu_j = 0 keeps the phases at zero)
    a0 = np.stack([-1j * np.einsum("k,kab->ab", w, SIGMA) for w in omegas_vec])
    t_end = min(cfg.t_end, 0.1)
    stepper = _stepper(cfg, t_end=t_end, record_every=max(1, cfg.record_every))
    traj = integrate(Ensemble(u0, a0, cfg.kappa), stepper)

    omegas = np.stack([omega_matrix(w) for w in omegas_vec])
    nus = np.zeros(n)

    def rhs(state):
        x = state[:, :4]
        th = state[:, 4]
        xd, thd = swarming_rhs(SwarmState(x, omegas, th, nus, cfg.kappa))
        return np.hstack([xd, thd[:, None]])

    y0 = np.hstack([xs, np.zeros((n, 1))])
    _, states = _rk2_midpoint(y0, rhs, cfg.dt, stepper.n_steps, stepper.record_every)

    err = 0.0
    norm_err = 0.0
    for snap, st in zip(traj.snapshots, states):
        for j in range(n):
            th, x = pauli_decompose(snap.u[j])
            err = max(err, abs(th - st[j, 4]), float(np.max(np.abs(x - st[j, :4]))))
        norm_err = max(norm_err, float(np.max(np.abs(
            np.linalg.norm(st[:, :4], axis=1) - 1.0))))
    return err, norm_err


def _check_splitting(cfg: ScenarioConfig, rng: Rng):
    n = 16
    u0 = sample_states(rng.split("states"), 2, n, "cluster", cfg.cluster_radius)
    a0 = sample_generators(rng.split("generators"), 2, n, "identical", cfg.sigma)
    t_end = min(cfg.t_end, 1.0)
    e0 = Ensemble(u0, a0, cfg.kappa)
    stepper = _stepper(cfg, t_end=t_end, record_every=10 ** 9)
    direct = integrate(e0, stepper).final
    split = split_integrate(e0, stepper)
    return float(np.max(frobenius_norm(direct.u - split.u)))


def _check_gauge(cfg: ScenarioConfig, rng: Rng):
    n = 16
    u0 = sample_states(rng.split("states"), 2, n, "cluster", cfg.cluster_radius)
    a0 = sample_generators(rng.split("generators"), 2, n, "identical", cfg.sigma)
    t_end = min(cfg.t_end, 1.0)
    stepper = _stepper(cfg, t_end=t_end, record_every=max(1, cfg.record_every))
    traj_h = integrate(Ensemble(u0, a0, cfg.kappa), stepper)
    traj_0 = integrate(Ensemble(u0, np.zeros_like(a0), cfg.kappa), stepper)
    gauged = gauge_transform(traj_h, a0[0])
    err = 0.0
    for sg, s0 in zip(gauged.snapshots, traj_0.snapshots):
        err = max(err, float(np.max(frobenius_norm(sg.u - s0.u))))
    return err


def run_reduction_checks(cfg: ScenarioConfig):
    """Cross-integration checks of the special-case reductions: the d = 1
    phase model, the d = 2 swarming system (norm conservation and
    trajectory match), the identical-Hamiltonian splitting, and the gauge
    transform.  Horizons are capped per check (0.1 for swarming, 1 for
    splitting and gauge)."""
    rng = Rng(cfg.seed)
    tol = 1e-6
    swarm_err, norm_err = _check_swarming(cfg, rng.split("swarming"))
    entries = [
        ("kuramoto_equivalence", _check_kuramoto(cfg, rng.split("kuramoto")), tol),
        ("swarming_reduction", swarm_err, tol),
        ("swarming_norm_conservation", norm_err, tol),
        ("splitting_composition", _check_splitting(cfg, rng.split("splitting")), tol),
        ("gauge_transform", _check_gauge(cfg, rng.split("gauge")), tol),
    ]
    rows = [[name, float(err), t, err <= t] for name, err, t in entries]
    checks = {name: bool(err <= t) for name, err, t in entries}
    return CsvReport(["check_name", "max_error", "tolerance", "pass"], rows), checks


# ---------------------------------------------------------------------------
# field fluctuation

def run_field_fluctuation(cfg: ScenarioConfig):
    """Monte-Carlo check of the coupling-fluctuation bound 16d/N for Haar
    samples, over d in {1, 2, 3} and a sweep of ensemble sizes; the
    estimate must scale like 1/N."""
    ns = cfg.n_list if cfg.n_list is not None else DEFAULT_FLUCTUATION_NS
    samples = max(cfg.repetitions, 2)
    rng = Rng(cfg.seed)
    rows = []
    below = True
    slopes = {}
    kernel_bound_ok = True
    for d in (1, 2, 3):
        estimates = []
        for n in ns:
            res = field_fluctuation_bound_check(rng.split("mc", d, n), d, n, samples)
            estimates.append(res.estimate)
            below &= res.estimate <= res.bound + 3.0 * res.std_error
            kernel_bound_ok &= res.max_coupling_norm <= 4.0 * np.sqrt(d) + 1e-12
            rows.append([d, n, res.estimate, res.std_error, res.bound])
        slope = float(np.polyfit(np.log(np.asarray(ns, dtype=float)),
                                 np.log(np.asarray(estimates)), 1)[0])
        slopes[f"slope_d{d}"] = slope
    slope_ok = all(-1.15 <= s <= -0.85 for s in slopes.values())
    checks = {"estimate_below_bound": bool(below),
              "coupling_norm_below_4sqrtd": bool(kernel_bound_ok),
              "slope_in_range": bool(slope_ok), **slopes}
    report = CsvReport(["d", "N", "estimate", "std_error", "bound"], rows)
    return report, checks
