import numpy as np
import pytest

from lohe.matcore import (
    NumericsError,
    Rng,
    expm_skew,
    frobenius_norm,
    unitary_defect,
)
from lohe.integrate import StepperConfig, Trajectory, integrate, split_integrate, step
from lohe.model import Ensemble
from lohe.sampling import sample_ensemble
from lohe.transport import PointCloud
from lohe.analysis import diameter

EPS = np.finfo(float).eps


def make_ensemble(seed, d, n, kappa=1.0, hmode="gaussian", init="haar", radius=0.5):
    return sample_ensemble(Rng(seed), d, n, kappa, hmode, 1.0, init, radius)


class TestStep:
    def test_zero_generators_identity(self):
        e = make_ensemble(1, 2, 4, kappa=0.0, hmode="zero")
        e1 = step(e, 0.1, method="lie_euler")
        assert np.abs(e1.u - e.u).max() < 1e-15

    def test_constant_generator_exact(self):
        # kappa = 0: one Lie-Euler step is the exact flow exp(dt A) U
        e = make_ensemble(2, 3, 5, kappa=0.0)
        dt = 0.37
        e1 = step(e, dt, method="lie_euler")
        want = np.stack([expm_skew(e.a[j], dt) @ e.u[j] for j in range(e.n)])
        assert np.abs(e1.u - want).max() < 1e-13

    def test_a_components_unchanged(self):
        e = make_ensemble(3, 2, 4)
        e1 = step(e, 0.01, method="cf2")
        assert np.array_equal(e1.a, e.a)

    def test_unitarity_growth_per_step(self):
        # defect growth per step stays below 10 * eps * d
        for d in (2, 4):
            e = make_ensemble(4, d, 8, kappa=2.0)
            u = e.u
            worst = 0.0
            cur = Ensemble(u, e.a, e.kappa)
            before = float(unitary_defect(cur.u).max())
            for _ in range(200):
                cur = step(cur, 1e-2, method="cf2")
                after = float(unitary_defect(cur.u).max())
                worst = max(worst, after - before)
                before = after
            assert worst <= 10 * EPS * d


class TestIntegrate:
    def test_single_step_two_snapshots(self):
        e = make_ensemble(5, 2, 3)
        traj = integrate(e, StepperConfig("cf2", 0.1, 0.1))
        assert len(traj.snapshots) == 2
        assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(0.1)

    def test_free_flow_matches_exact(self):
        # N = 1, kappa = 0, CF2: U(t) = exp(tA) U0 to 1e-10
        e = make_ensemble(6, 2, 1, kappa=0.0)
        t_end = 1.0
        traj = integrate(e, StepperConfig("cf2", 1e-3, t_end, record_every=1000))
        want = expm_skew(e.a[0], t_end) @ e.u[0]
        assert frobenius_norm(traj.final.u[0] - want) < 1e-10

    def test_identical_h_diameter_decays(self):
        e = make_ensemble(7, 2, 16, kappa=1.0, hmode="zero", init="cluster", radius=0.5)
        traj = integrate(e, StepperConfig("cf2", 1e-2, 4.0, record_every=40))
        dvals = [diameter(PointCloud.from_ensemble(s)) for s in traj.snapshots]
        assert all(b < a for a, b in zip(dvals, dvals[1:]))

    def test_recorded_snapshots_unitary(self):
        e = make_ensemble(8, 3, 6, kappa=1.5)
        traj = integrate(e, StepperConfig("cf2", 1e-2, 2.0, record_every=20))
        for s in traj.snapshots:
            assert unitary_defect(s.u).max() <= 1e-8

    def test_post_retraction_defect(self):
        e = make_ensemble(9, 2, 8, kappa=1.0)
        traj = integrate(e, StepperConfig("cf2", 1e-2, 1.28, record_every=64,
                                          retract_every=64))
        # records land right after retraction steps
        assert unitary_defect(traj.final.u).max() <= 1e-12

    def test_time_reversal_zero_coupling(self):
        e = make_ensemble(10, 2, 5, kappa=0.0)
        cur = e
        n_steps, dt = 200, 5e-3
        for _ in range(n_steps):
            cur = step(cur, dt, method="cf2")
        for _ in range(n_steps):
            cur = step(cur, -dt, method="cf2")
        assert np.abs(cur.u - e.u).max() < 1e-9

    def test_permutation_equivariance(self):
        e = make_ensemble(11, 2, 7, kappa=1.0)
        perm = Rng(12).generator.permutation(e.n)
        cfg = StepperConfig("cf2", 1e-2, 0.2, record_every=20)
        direct = integrate(e, cfg).final.u[perm]
        permuted = integrate(e.permuted(perm), cfg).final.u
        assert np.abs(direct - permuted).max() < 1e-13

    def test_drift_abort(self):
        # inject state drift through the generator callback's live view
        e = make_ensemble(13, 2, 3, kappa=0.0, hmode="zero")

        def leaky_gen(ens, t):
            ens.u *= 1.001  # simulates an exploding update
            return np.zeros_like(ens.u)

        with pytest.raises(NumericsError):
            integrate(e, StepperConfig("lie_euler", 1e-2, 2.0, retract_every=64),
                      generator_fn=leaky_gen)

    def test_cf2_second_order(self):
        # global error vs a dt/8 reference has log-log slope 2.0 +- 0.15
        e = make_ensemble(14, 2, 6, kappa=1.5)
        t_end = 0.5
        dts = [2e-2, 1e-2, 5e-3]
        ref = integrate(e, StepperConfig("cf2", dts[-1] / 8, t_end,
                                         record_every=10**6)).final.u
        errs = []
        for dt in dts:
            got = integrate(e, StepperConfig("cf2", dt, t_end,
                                             record_every=10**6)).final.u
            errs.append(float(np.max(frobenius_norm(got - ref))))
        slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
        assert 1.85 <= slope <= 2.15

    def test_lie_euler_first_order(self):
        e = make_ensemble(15, 2, 6, kappa=1.5)
        t_end = 0.5
        dts = [2e-2, 1e-2, 5e-3]
        ref = integrate(e, StepperConfig("cf2", 1e-4, t_end,
                                         record_every=10**6)).final.u
        errs = []
        for dt in dts:
            got = integrate(e, StepperConfig("lie_euler", dt, t_end,
                                             record_every=10**6)).final.u
            errs.append(float(np.max(frobenius_norm(got - ref))))
        slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
        assert 0.85 <= slope <= 1.15


class TestSplitIntegrate:
    def test_zero_coupling_is_pure_rotation(self):
        e = make_ensemble(16, 2, 4, kappa=0.0, hmode="identical")
        cfg = StepperConfig("cf2", 1e-2, 1.0)
        got = split_integrate(e, cfg)
        want = np.stack([expm_skew(e.a[0], 1.0) @ e.u[j] for j in range(e.n)])
        assert np.abs(got.u - want).max() < 1e-12

    def test_zero_hamiltonian_equals_direct(self):
        e = make_ensemble(17, 2, 6, kappa=1.0, hmode="zero")
        cfg = StepperConfig("cf2", 1e-2, 1.0)
        direct = integrate(e, cfg).final.u
        split = split_integrate(e, cfg).u
        assert np.abs(direct - split).max() < 1e-12

    def test_matches_direct_integration(self):
        e = make_ensemble(18, 2, 16, kappa=1.0, hmode="identical", init="cluster")
        cfg = StepperConfig("cf2", 1e-3, 1.0, record_every=1000)
        direct = integrate(e, cfg).final.u
        split = split_integrate(e, cfg).u
        assert float(np.max(frobenius_norm(direct - split))) < 1e-6

    def test_rejects_mixed_hamiltonians(self):
        e = make_ensemble(19, 2, 4, kappa=1.0, hmode="gaussian")
        with pytest.raises(ValueError):
            split_integrate(e, StepperConfig("cf2", 1e-2, 0.1))


class TestStepperConfig:
    def test_invalid_method(self):
        with pytest.raises(ValueError):
            StepperConfig("rk4", 0.1, 1.0)

    def test_t_end_not_multiple(self):
        with pytest.raises(ValueError):
            StepperConfig("cf2", 0.3, 1.0)

    def test_trajectory_requires_increasing_times(self):
        e = make_ensemble(20, 2, 2)
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 0.0]), [e, e])
