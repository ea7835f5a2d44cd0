import numpy as np
import pytest

from qmaps.classification import random_unitary
from qmaps.errors import NotUnitary
from qmaps.presentations import builtin_presentation, lambda_q
from qmaps.reports import CheckStatus
from qmaps.representations import rep_circle_points, rep_powers, rep_so3_points, rep_sqo3_truncated
from qmaps.so3 import haar_spoints
from qmaps.verifier import (
    CoactionSpec,
    StateSpec,
    check_coaction,
    check_hom,
    check_podles_density,
    check_state_preservation,
    conjugated,
    fixed_point_dimension,
)


def test_lambda_is_a_homomorphism():
    rep = rep_sqo3_truncated(0.4, 40, comultiplication="matrix")
    report = check_hom(lambda_q("sqo3-matrix"), rep)
    assert report.passed


def test_powers_coaction_preserves_its_state():
    q = 0.5
    rep = rep_powers(q, 40)
    coact = CoactionSpec.of(builtin_presentation("qmap-powers"))
    assert check_coaction(coact, rep).passed
    assert check_state_preservation(coact, StateSpec.powers(q), rep).passed
    assert not check_state_preservation(coact, StateSpec.trace(), rep, symbolic=False).passed


def test_podles_density_on_circle_points():
    rep = rep_circle_points(2 * np.pi * np.arange(5) / 5)
    coact = CoactionSpec.of(builtin_presentation("circle"))
    report = check_podles_density(coact, rep)
    assert report.passed and report["podles-density"].status is CheckStatus.PASS_NUMERIC
    trivial = check_podles_density(CoactionSpec.trivial(builtin_presentation("circle")), rep)
    assert not trivial.passed


def test_fixed_point_dimensions():
    so3 = CoactionSpec.of(builtin_presentation("so3-classical"))
    assert fixed_point_dimension(so3, rep_so3_points(haar_spoints(32, 0))) == 1
    circle = CoactionSpec.of(builtin_presentation("circle"))
    assert fixed_point_dimension(circle, rep_circle_points(np.linspace(0, 6, 7))) == 2


def test_conjugated_coaction_moves_the_invariant_state():
    u = random_unitary(3)
    coact = conjugated(CoactionSpec.of(builtin_presentation("so3-classical")), u)
    rep = rep_so3_points(haar_spoints(32, 1))
    assert check_state_preservation(coact, StateSpec.trace(), rep, symbolic=False).passed
    base = conjugated(CoactionSpec.of(builtin_presentation("circle")), u)
    rep_c = rep_circle_points(np.linspace(0, 6, 9))
    omega = StateSpec.omega0()
    assert not check_state_preservation(base, omega, rep_c, symbolic=False).passed
    rho = u.conj().T @ omega.density() @ u
    assert check_state_preservation(base, StateSpec.from_density(rho), rep_c, symbolic=False).passed


def test_conjugation_requires_unitary():
    with pytest.raises(NotUnitary):
        conjugated(CoactionSpec.of(builtin_presentation("circle")), np.diag([1.0, 2.0]))
