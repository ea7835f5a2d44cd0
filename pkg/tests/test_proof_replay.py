import numpy as np
import pytest

from qmaps.proof_replay import (
    dotted_elements,
    derived_form_symbolic_check,
    proof_replay_theorem_main,
    replay_rep,
)
from qmaps.reports import CheckStatus
from qmaps.representations import residual
from qmaps.scalars import Q
from qmaps.words import ONE_POLY

EPS = np.finfo(float).eps


def test_full_replay_passes():
    report = proof_replay_theorem_main(0.5, 48)
    assert report.passed, report.failures()
    assert len(report) == 78


def test_fault_injection_fails_at_first_sum_identity():
    rep = replay_rep(0.5, 48)
    bad = rep.with_matrices(delta=rep.matrices["delta"] * 1.01)
    report = proof_replay_theorem_main(0.5, rep=bad)
    first = report.failures[0]
    assert first.name == "bcd.sum1"
    assert first.residual > 1e-4


def test_rewritten_identity_needs_the_q_factor():
    t = dotted_elements()
    A, C, G, K, L = (t[k] for k in "ACGKL")
    As, Gs = A.adjoint(), G.adjoint()
    q2 = Q * Q
    base = C - q2 * (K * C) + A * Gs - K * C
    rep = replay_rep(0.5, 48)
    assert residual(base - Q * (As * L), rep).value < 1e-12
    assert residual(base - As * L, rep).value > 0.1


def test_matrix_identity_holds_symbolically():
    report = derived_form_symbolic_check()
    assert len(report) == 16
    assert all(e.status is CheckStatus.PASS_SYMBOLIC for e in report)


@pytest.mark.slow
@pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
def test_residuals_do_not_grow_with_dimension(q):
    small = proof_replay_theorem_main(q, 64)
    large = proof_replay_theorem_main(q, 128)
    for e in large:
        r64 = small[e.name].residual
        if r64 is None:
            continue
        assert e.residual <= r64 + 4 * EPS * max(1.0, r64), e.name
