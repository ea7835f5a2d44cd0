import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmaps.errors import InvalidSPoint, NonOrthogonalOutput
from qmaps.so3 import (
    SPoint,
    batch_defect,
    haar_spoints,
    random_rotation,
    s_inv,
    s_inv_batch,
    s_mul,
    s_mul_batch,
    s_point_action,
    s_to_so3,
    s_unit,
    spoint_from_so3,
    spoint_from_unitary,
)

angles = st.floats(0, 2 * np.pi, allow_nan=False)
unit = st.floats(0, 1, allow_nan=False)


@st.composite
def points(draw):
    # Euler-style SU(2) parametrization
    th, a, b = draw(unit), draw(angles), draw(angles)
    c, s = np.cos(th * np.pi / 2), np.sin(th * np.pi / 2)
    u = np.array([[c * np.exp(1j * a), -s * np.exp(-1j * b)], [s * np.exp(1j * b), c * np.exp(-1j * a)]])
    return spoint_from_unitary(u)


@given(points())
def test_points_lie_on_the_group(p):
    assert p.defect() < 1e-12
    act = s_point_action(p)
    assert act.is_automorphism


@given(points(), points(), points())
def test_associative(p, r, w):
    assert s_mul(s_mul(p, r), w).distance(s_mul(p, s_mul(r, w))) < 1e-12


@given(points())
def test_unit_and_inverse(p):
    assert s_mul(p, s_unit()).distance(p) < 1e-14
    assert s_mul(s_unit(), p).distance(p) < 1e-14
    if abs(p.r) > 1e-6:
        assert s_mul(p, s_inv(p)).distance(s_unit()) < 1e-9
        assert s_mul(s_inv(p), p).distance(s_unit()) < 1e-9


@given(points(), points())
def test_rotation_map_is_a_homomorphism(p, r):
    lhs = s_to_so3(s_mul(p, r))
    assert np.abs(lhs - s_to_so3(p) @ s_to_so3(r)).max() < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_rotation_pullback_is_a_right_inverse(seed):
    R = random_rotation(np.random.default_rng(seed))
    p = spoint_from_so3(R)
    assert p.defect() < 1e-12
    assert np.abs(s_to_so3(p) - R).max() < 1e-12


def test_batch_matches_scalar_law():
    p, r = haar_spoints(50, 1), haar_spoints(50, 2)
    prod = s_mul_batch(p, r)
    for i in range(50):
        ref = s_mul(SPoint.from_array(p[i]), SPoint.from_array(r[i]))
        assert np.abs(prod[i] - ref.as_array()).max() < 1e-13
    assert batch_defect(prod).max() < 1e-13
    inv = s_inv_batch(p)
    assert batch_defect(s_mul_batch(p, inv)).max() < 1e-12


def test_haar_methods_agree_in_distribution():
    a = haar_spoints(20000, 5, "su2")
    b = haar_spoints(2000, 5, "rotation")
    for col in range(3):
        assert abs(np.mean(np.abs(a[:, col]) ** 2) - np.mean(np.abs(b[:, col]) ** 2)) < 0.03


def test_invalid_point_rejected():
    with pytest.raises(InvalidSPoint):
        SPoint(1.0, 0.5, 0.0).validate()


def test_non_orthogonal_output_detected():
    with pytest.raises(NonOrthogonalOutput):
        s_to_so3(SPoint(0.7, 0.0, 0.0))
