import math

import numpy as np
import pytest

from qmaps.errors import HypothesisViolated, NoRootInUnitInterval, NotSelfAdjoint, RelationResidualTooLarge, SpectrumOutOfRange
from qmaps.representations import (
    fuglede_putnam_check,
    fuglede_putnam_instance,
    rep_ck_counterexample,
    rep_q0_toeplitz,
    rep_q1_counterexample,
    rep_sqo3_truncated,
    solve_ck_parameter,
    spectral_structure_check,
    validated,
)
from qmaps.verifier import check_relations


@pytest.mark.parametrize("q", [0.2, 0.5, 0.9])
def test_sqo3_model_satisfies_relations_on_interior(q):
    rep = rep_sqo3_truncated(q, 48)
    report = check_relations(rep)
    assert report.passed and len(report) == 20
    assert np.allclose(np.diag(rep.matrices["K"]).real, q ** (2 * np.arange(48)))


def test_perturbed_model_is_rejected():
    rep = rep_sqo3_truncated(0.5, 32)
    bad = rep.with_matrices(A=rep.matrices["A"] * 1.001)
    with pytest.raises(RelationResidualTooLarge):
        validated(bad)


@pytest.mark.parametrize("q", [0.0, 1.0, 1.2])
def test_sqo3_model_needs_q_inside_unit_interval(q):
    with pytest.raises(ValueError):
        rep_sqo3_truncated(q, 16)


def test_ck_counterexample_parameter_is_stable():
    rep, q = rep_ck_counterexample(1, 2, 16)
    assert q == pytest.approx(math.sqrt((math.sqrt(5) - 1) / 2), rel=1e-15)
    assert rep.notes["conclusion_residual"] == pytest.approx(0.11469794024490956, rel=1e-9)
    assert rep.notes["commutation_residual"] > 0.1
    m = rep.matrices
    ck = m["C"] @ m["K"] - q**2 * m["K"] @ m["C"]
    assert np.linalg.norm(ck, 2) > 1e-2


@pytest.mark.parametrize("m0,n0", [(1, 2), (2, 1), (1, 3), (2, 5)])
def test_ck_parameter_solves_its_equation(m0, n0):
    q = solve_ck_parameter(m0, n0)
    assert 0 < q < 1
    assert abs(q ** (2 * n0) + q ** (2 * m0) - 1) < 1e-15


def test_ck_parameter_rejects_degenerate_indices():
    with pytest.raises(HypothesisViolated):
        solve_ck_parameter(2, 2)
    with pytest.raises(NoRootInUnitInterval):
        solve_ck_parameter(0, 2)


def test_flip_model_commutes_but_breaks_ck():
    m = rep_q1_counterexample(128).matrices
    assert np.abs(m["A"] @ m["K"] - m["K"] @ m["A"]).max() == 0
    assert np.abs(m["A"] @ m["C"] - m["C"] @ m["A"]).max() == 0
    assert np.linalg.norm(m["C"] @ m["K"] - m["K"] @ m["C"], 2) > 0.1


def test_q0_model_defects_sit_at_the_cut():
    rep = rep_q0_toeplitz(48)
    assert rep.notes["betastar_beta_is_projection"]
    assert rep.notes["betastar_beta_defect"] == pytest.approx(1.0)
    beta = rep.matrices["beta"]
    bad = np.nonzero(np.abs(beta @ beta.conj().T - np.eye(48)).max(axis=0) > 1e-12)[0]
    assert bad.min() >= 16
    assert rep.notes["beta_delta"] == rep.notes["beta_deltastar"] == 0
    # not forced by the relations, and nonzero here
    assert rep.notes["delta_beta"] == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(25))
def test_fuglede_putnam_on_random_instances(seed):
    a, n, lam = fuglede_putnam_instance(seed)
    assert np.abs(a).max() > 0
    assert fuglede_putnam_check(a, n, lam).passed


def test_fuglede_putnam_rep_case():
    q = 0.5
    m = rep_sqo3_truncated(q, 24).matrices
    assert fuglede_putnam_check(m["A"], m["K"], q**2).passed


def test_fuglede_putnam_rejects_bad_hypotheses():
    n = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(HypothesisViolated):
        fuglede_putnam_check(np.eye(2), n, 1.0)
    with pytest.raises(HypothesisViolated):
        fuglede_putnam_check(np.array([[0, 1], [0, 0]]), np.diag([1.0, 2.0]), 1.0)


def test_spectrum_of_K_lies_on_the_grid():
    q = 0.6
    rep = spectral_structure_check(rep_sqo3_truncated(q, 20).matrices["K"], q)
    assert rep.ok
    assert rep.classes == list(range(20))
    assert rep.distances.max() < 1e-12


def test_spectral_gap_violation_reported():
    rep = spectral_structure_check(np.diag([1.0, 0.8, 0.0]), 0.5)
    assert not rep.ok and rep.gap_violations == [0.8]
    assert rep.classes[-1] is None


def test_spectral_input_validation():
    with pytest.raises(NotSelfAdjoint):
        spectral_structure_check(np.array([[0, 1], [0, 0]]), 0.5)
    with pytest.raises(SpectrumOutOfRange):
        spectral_structure_check(np.diag([2.0, 0.0]), 0.5)
