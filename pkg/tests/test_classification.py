import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmaps.classification import (
    HaarSampler,
    classify_state,
    random_density,
    random_unitary,
    rho_q,
    validate_density,
)
from qmaps.errors import NotADensityMatrix, SamplerExhausted


@given(st.floats(0.01, 0.99), st.integers(0, 10**6))
def test_rho_q_family_recovered_up_to_conjugation(q, seed):
    u = random_unitary(seed)
    rho = u @ rho_q(q) @ u.conj().T
    res = classify_state(rho)
    assert res.q == pytest.approx(q, abs=1e-9)
    assert res.residual(rho) < 1e-12
    assert np.abs(res.u.conj().T @ res.u - np.eye(2)).max() < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_pure_state_snaps_to_zero(seed):
    u = random_unitary(seed)
    res = classify_state(u @ rho_q(0.0) @ u.conj().T)
    assert res.q == 0.0
    assert res.residual(u @ rho_q(0.0) @ u.conj().T) < 1e-12


def test_tracial_state_snaps_to_one():
    res = classify_state(np.eye(2) / 2)
    assert res.q == 1.0
    assert np.array_equal(res.u, np.eye(2))


@pytest.mark.parametrize("seed", range(5))
def test_random_densities_are_valid(seed):
    rho = random_density(seed)
    validate_density(rho)
    assert classify_state(rho).residual(rho) < 1e-12


@pytest.mark.parametrize(
    "rho",
    [np.eye(2), np.array([[0.5, 0.5j], [0.5j, 0.5]]), np.diag([1.5, -0.5]), np.eye(3) / 3],
)
def test_not_a_density_matrix(rho):
    with pytest.raises(NotADensityMatrix):
        classify_state(rho)


def test_sampler_budget():
    s = HaarSampler("so3-classical", budget=100)
    s.sample(60)
    with pytest.raises(SamplerExhausted):
        s.sample(60)


def test_sampler_is_seeded():
    a = HaarSampler("so3-classical", 4).sample(10).values["S"]
    b = HaarSampler("so3-classical", 4).sample(10).values["S"]
    assert np.array_equal(a, b)


def test_no_sampler_for_quantum_presets():
    with pytest.raises(ValueError):
        HaarSampler("sqo3")
