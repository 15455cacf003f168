import numpy as np
import pytest

from lohe import _kernels, _kernels_py
from lohe.matcore import Rng, sample_gaussian_su, sample_haar, unitary_defect


@pytest.mark.parametrize("d", [1, 2])
def test_dispatch_matches_numpy(d):
    rng = Rng(500 + d)
    a = sample_gaussian_su(rng, d, size=200)
    u = sample_haar(rng, d, size=200)
    got = _kernels.expmul_batch(a, u, 0.123)
    want = _kernels_py.expmul_batch(a, u, 0.123)
    assert np.abs(got - want).max() < 1e-14


@pytest.mark.parametrize("d", [1, 2, 3])
def test_closed_forms_match_eigh(d):
    rng = Rng(510 + d)
    a = sample_gaussian_su(rng, d, size=50)
    got = _kernels_py.expm_batch(a, 0.7)
    want = _kernels_py._expm_eigh(a, 0.7)
    assert np.abs(got - want).max() < 1e-13


def test_expm_batch_unitary():
    rng = Rng(520)
    for d in (1, 2, 4):
        a = sample_gaussian_su(rng, d, size=32)
        assert unitary_defect(_kernels.expm_batch(a, 1.0)).max() < 1e-13


def test_zero_norm_generator_d2():
    # the sinc branch at r = 0: exp of a pure-phase generator
    a = np.array([[[0.5j, 0.0], [0.0, 0.5j]]])
    u = np.eye(2, dtype=complex)[None]
    out = _kernels.expmul_batch(np.ascontiguousarray(a), np.ascontiguousarray(u), 2.0)
    assert np.allclose(out[0], np.exp(1j) * np.eye(2), atol=1e-14)


def test_backend_reported():
    assert _kernels.BACKEND in ("compiled", "numpy")
