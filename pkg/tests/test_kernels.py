import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmaps import _kernels as K

backends = ["numpy"] + (["numba"] if K.HAVE_NUMBA else [])


def _herm(seed, n):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return z + z.conj().T


@pytest.mark.parametrize("backend", backends)
@given(st.integers(0, 2**32), st.integers(1, 12))
@settings(max_examples=30)
def test_jacobi_matches_lapack(backend, seed, n):
    a = _herm(seed, n)
    w, v = K.jacobi_eigh(a, backend=backend)
    assert np.allclose(w, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-11)
    assert np.abs(a @ v - v * w).max() < 1e-10
    assert np.abs(v.conj().T @ v - np.eye(n)).max() < 1e-12


@pytest.mark.parametrize("backend", backends)
@pytest.mark.parametrize("shapes", [[(3, 4)], [(2, 3), (4, 2)], [(2, 2), (3, 3), (2, 4)]])
def test_kron_apply_matches_dense(backend, shapes):
    rng = np.random.default_rng(0)
    fs = [rng.normal(size=s) + 1j * rng.normal(size=s) for s in shapes]
    dense = fs[0]
    for f in fs[1:]:
        dense = np.kron(dense, f)
    x = rng.normal(size=dense.shape[1]) + 0j
    assert np.abs(K.kron_apply(fs, x, backend=backend) - dense @ x).max() < 1e-12


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree_on_group_law():
    from qmaps.so3 import haar_spoints

    p, r = haar_spoints(1000, 1), haar_spoints(1000, 2)
    assert np.abs(K.s_mul_batch(p, r, "numba") - K.s_mul_batch(p, r, "numpy")).max() < 1e-14
    assert np.abs(K.s_inv_batch(p, "numba") - K.s_inv_batch(p, "numpy")).max() < 1e-14


def test_unknown_backend():
    with pytest.raises(ValueError):
        K.jacobi_eigh(np.eye(2), backend="gpu")


def test_environment_switch_selects_numpy():
    env = dict(os.environ, QMAPS_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from qmaps import _kernels; print(_kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
