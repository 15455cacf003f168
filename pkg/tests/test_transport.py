import itertools

import numpy as np
import pytest

from lohe.matcore import Rng, sample_gaussian_su, sample_haar
from lohe.model import Oscillator
from lohe.transport import (
    CostMatrix,
    PointCloud,
    assignment_solve,
    cost_matrix,
    mk_distance,
    pair_cost,
)


def brute_force_assignment(costs):
    """Oracle: exhaustive minimum over all permutations."""
    n = costs.shape[0]
    best = np.inf
    for perm in itertools.permutations(range(n)):
        total = sum(costs[i, perm[i]] for i in range(n))
        best = min(best, total)
    return best


def random_cloud(seed, n, d=2):
    rng = Rng(seed)
    return PointCloud(sample_haar(rng, d, size=n),
                      sample_gaussian_su(rng.split("a"), d, size=n))


class TestPairCost:
    def test_identical_points(self):
        rng = Rng(1)
        p = Oscillator(sample_haar(rng, 3), sample_gaussian_su(rng, 3))
        assert pair_cost(p, p, 2) == 0.0
        assert pair_cost(p, p, 1) == 0.0

    def test_hand_value(self):
        p = Oscillator(np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex))
        q = Oscillator(np.diag([-1.0 + 0j, 1.0]), np.zeros((2, 2), dtype=complex))
        assert pair_cost(p, q, 2) == pytest.approx(4.0, abs=1e-14)

    def test_triangle_inequality_exponent_one(self):
        rng = Rng(2)
        for _ in range(30):
            d = int(rng.generator.integers(1, 4))
            pts = [Oscillator(sample_haar(rng, d), sample_gaussian_su(rng, d))
                   for _ in range(3)]
            ab = pair_cost(pts[0], pts[1], 1)
            bc = pair_cost(pts[1], pts[2], 1)
            ac = pair_cost(pts[0], pts[2], 1)
            assert ac <= ab + bc + 1e-12

    def test_dimension_mismatch(self):
        p = Oscillator(np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex))
        q = Oscillator(np.eye(3, dtype=complex), np.zeros((3, 3), dtype=complex))
        with pytest.raises(ValueError):
            pair_cost(p, q, 2)

    def test_matches_cost_matrix(self):
        a = random_cloud(3, 5)
        b = random_cloud(4, 5)
        for exponent in (1, 2):
            c = cost_matrix(a, b, exponent).costs
            for i in range(5):
                for j in range(5):
                    want = pair_cost(Oscillator(a.u[i], a.a[i]),
                                     Oscillator(b.u[j], b.a[j]), exponent)
                    assert c[i, j] == pytest.approx(want, abs=1e-11)


class TestAssignment:
    def test_zero_diagonal(self):
        c = CostMatrix(np.ones((4, 4)) - np.eye(4))
        perm, total = assignment_solve(c)
        assert np.array_equal(perm, np.arange(4))
        assert total == 0.0

    def test_swap_optimal(self):
        c = CostMatrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
        perm, total = assignment_solve(c)
        assert np.array_equal(perm, [1, 0])
        assert total == 0.0

    def test_matches_brute_force(self):
        g = Rng(5).generator
        for _ in range(20):
            costs = g.uniform(0.0, 1.0, (7, 7))
            _, total = assignment_solve(CostMatrix(costs))
            assert total == pytest.approx(brute_force_assignment(costs), abs=1e-12)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            CostMatrix(np.zeros((2, 3)))


class TestMkDistance:
    def test_identical_clouds(self):
        a = random_cloud(6, 6)
        assert mk_distance(a, a, 2) < 1e-12
        assert mk_distance(a, a, 1) < 1e-12

    def test_singletons_reduce_to_pair_distance(self):
        a = random_cloud(7, 1)
        b = random_cloud(8, 1)
        pa = Oscillator(a.u[0], a.a[0])
        pb = Oscillator(b.u[0], b.a[0])
        assert mk_distance(a, b, 2) == pytest.approx(np.sqrt(pair_cost(pa, pb, 2)), abs=1e-12)
        assert mk_distance(a, b, 1) == pytest.approx(pair_cost(pa, pb, 1), abs=1e-12)

    def test_matches_brute_force(self):
        for seed in range(5):
            a = random_cloud(100 + seed, 5)
            b = random_cloud(200 + seed, 5)
            c = cost_matrix(a, b, 2).costs
            want = np.sqrt(brute_force_assignment(c) / 5)
            assert mk_distance(a, b, 2) == pytest.approx(want, abs=1e-12)

    def test_symmetry(self):
        a = random_cloud(9, 6)
        b = random_cloud(10, 6)
        for exponent in (1, 2):
            assert mk_distance(a, b, exponent) == pytest.approx(
                mk_distance(b, a, exponent), abs=1e-12)

    def test_permutation_invariance(self):
        a = random_cloud(11, 8)
        b = random_cloud(12, 8)
        perm = Rng(13).generator.permutation(8)
        shuffled = PointCloud(a.u[perm], a.a[perm])
        assert mk_distance(a, b, 2) == pytest.approx(
            mk_distance(shuffled, b, 2), abs=1e-12)

    def test_triangle_inequality(self):
        for seed in range(10):
            a = random_cloud(300 + seed, 6)
            b = random_cloud(400 + seed, 6)
            c = random_cloud(500 + seed, 6)
            for exponent in (1, 2):
                ab = mk_distance(a, b, exponent)
                bc = mk_distance(b, c, exponent)
                ac = mk_distance(a, c, exponent)
                assert ac <= ab + bc + 1e-10

    def test_identity_of_indiscernibles(self):
        a = random_cloud(14, 6)
        perm = Rng(15).generator.permutation(6)
        same = PointCloud(a.u[perm], a.a[perm])
        assert mk_distance(a, same, 2) < 1e-12
        b = random_cloud(16, 6)
        assert mk_distance(a, b, 2) > 1e-3

    def test_hoelder_ordering(self):
        # pointwise c1 <= sqrt(2) sqrt(c2) gives MK1 <= sqrt(2) MK2;
        # for unitary-only clouds the plain ordering MK1 <= MK2 holds.
        for seed in range(10):
            a = random_cloud(600 + seed, 6)
            b = random_cloud(700 + seed, 6)
            assert mk_distance(a, b, 1) <= np.sqrt(2) * mk_distance(a, b, 2) + 1e-10
            au = PointCloud(a.u)
            bu = PointCloud(b.u)
            assert mk_distance(au, bu, 1) <= mk_distance(au, bu, 2) + 1e-10

    def test_unequal_sizes_rejected(self):
        with pytest.raises(ValueError, match="equal-size"):
            mk_distance(random_cloud(17, 3), random_cloud(18, 4), 2)
