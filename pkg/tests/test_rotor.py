import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import su2
from zzpulse.rotor import (
    IDENTITY,
    Rotation,
    TransverseAxis,
    compose,
    compose_all,
    conjugate_axis,
    euler_transverse,
    inverse,
    matrix_distance,
)

angles = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)
axes = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(lambda v: math.hypot(*v) > 1e-3)
rotations = st.builds(Rotation, angles, axes)


def test_matrix_matches_exponential():
    r = Rotation(1.3, (0.2, -0.5, 0.7))
    assert np.allclose(r.matrix(), su2(1.3, (0.2, -0.5, 0.7)), atol=1e-14)


def test_full_turn_is_minus_identity():
    for axis in [(1, 0, 0), (0, 1, 0), (0.3, 0.4, 0.5)]:
        assert np.array_equal(np.round(Rotation(2 * math.pi, axis).matrix(), 15), -IDENTITY)


def test_half_turns_compose_to_third_axis():
    r = compose(Rotation(math.pi, (1, 0, 0)), Rotation(math.pi, (0, 1, 0)))
    assert matrix_distance(r.matrix(), Rotation(math.pi, (0, 0, 1)).matrix()) < 1e-14


def test_conjugate_axis_quarter_turn():
    assert np.allclose(conjugate_axis(math.pi / 2, (0, 0, 1), (1, 0, 0)), (0, 1, 0), atol=1e-15)


def test_zero_axis_rejected():
    with pytest.raises(ValueError):
        Rotation(1.0, (0, 0, 0))


def test_nonfinite_angle_rejected():
    with pytest.raises(ValueError):
        Rotation(float("nan"), (1, 0, 0))


def test_euler_special_cases():
    assert euler_transverse(Rotation.identity()) == []
    one = euler_transverse(Rotation(0.7, (math.cos(0.3), math.sin(0.3), 0)))
    assert len(one) == 1 and abs(one[0][0] - 0.7) < 1e-15 and abs(one[0][1].phi - 0.3) < 1e-15
    z = euler_transverse(Rotation(math.pi, (0, 0, 1)))
    prod = compose_all(Rotation(a, ax.vector) for a, ax in z)
    assert matrix_distance(prod.matrix(), Rotation(math.pi, (0, 0, 1)).matrix()) < 1e-14


def test_from_matrix_keeps_sign():
    r = Rotation(2 * math.pi, (1, 0, 0))
    assert matrix_distance(Rotation.from_matrix(r.matrix()).matrix(), -IDENTITY) < 1e-15


@settings(max_examples=300, deadline=None)
@given(rotations, rotations)
def test_compose_is_matrix_product(a, b):
    assert matrix_distance(compose(a, b).matrix(), a.matrix() @ b.matrix()) < 1e-12


@settings(max_examples=300, deadline=None)
@given(rotations)
def test_inverse_is_adjoint(r):
    assert matrix_distance(inverse(r).matrix(), r.matrix().conj().T) < 1e-12
    assert matrix_distance(compose(r, inverse(r)).matrix(), IDENTITY) < 1e-12


@settings(max_examples=300, deadline=None)
@given(rotations)
def test_euler_transverse_exact(r):
    factors = euler_transverse(r)
    assert len(factors) <= 3
    for _, ax in factors:
        assert abs(ax.vector[2]) == 0.0
    prod = compose_all(Rotation(a, ax.vector) for a, ax in factors)
    # exact: no residual phase, not even a sign
    assert matrix_distance(prod.matrix(), r.matrix()) < 1e-12


@settings(max_examples=200, deadline=None)
@given(angles, axes, st.floats(-math.pi, math.pi), axes)
def test_conjugation_rotates_axis(theta, n, phi, m):
    # R(phi, m) R(theta, n) R(phi, m)^dag = R(theta, n') with n' the rotated axis
    outer = Rotation(phi, m)
    lhs = outer.matrix() @ Rotation(theta, n).matrix() @ outer.matrix().conj().T
    rhs = Rotation(theta, conjugate_axis(phi, m, n)).matrix()
    assert matrix_distance(lhs, rhs) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-math.pi, math.pi))
def test_transverse_axis_orthogonal(phi):
    a = TransverseAxis(phi)
    assert abs(np.dot(a.vector, a.orthogonal().vector)) < 1e-15
