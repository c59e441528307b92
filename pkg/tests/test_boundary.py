import math

import numpy as np
import pytest

from mbwave import (
    BoundaryMotion,
    DomainError,
    ExactLinearTransform,
    ExactSinhTransform,
    InvalidMotionError,
    PreconditionError,
    SingularityError,
    motion_from_config,
    recover_length_from_transform,
    validate_motion,
)


def test_linear_length_value():
    m = BoundaryMotion.linear(0.5, 0.3, t_max=2.0)
    assert m.length(1.0) == pytest.approx(0.8, abs=1e-15)


def test_exponential_length_at_zero():
    m = BoundaryMotion.exponential(0.5, t_max=2.0)
    assert m.length(0.0) == pytest.approx(1.0, abs=1e-15)


def test_sinh_inverse_length_closed_form():
    # Tab-style closed form asinh(sech(k (t - xi0)) / A) / k evaluated
    # independently with math
    m = BoundaryMotion.sinh_inverse(2.0, 1.0, 1.0, t_max=2.0)
    expected = math.asinh(0.5)  # sech(0) / 2
    assert m.length(1.0) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.481212, abs=1e-6)


def test_linear_speed_constant():
    m = BoundaryMotion.linear(0.5, 0.3, t_max=2.0)
    for t in (0.0, 0.7, 2.0):
        assert m.speed(t) == pytest.approx(0.3, abs=1e-15)


def test_exponential_speed_at_zero():
    m = BoundaryMotion.exponential(0.5, t_max=2.0)
    assert m.speed(0.0) == pytest.approx(-0.5, abs=1e-15)


def test_sinh_inverse_speed_vanishes_at_xi0():
    m = BoundaryMotion.sinh_inverse(2.0, 1.0, 1.0, t_max=3.0)
    assert m.speed(1.0) == pytest.approx(0.0, abs=1e-14)
    # finite-difference confirmation of the critical point
    h = 1e-6
    fd = (m.length(1.0 + h) - m.length(1.0 - h)) / (2 * h)
    assert fd == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize(
    "motion",
    [
        BoundaryMotion.linear(0.5, 0.3, 3.0),
        BoundaryMotion.exponential(0.5, 3.0),
        BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 3.0),
        BoundaryMotion.sinh_inverse(0.1, 1.0, 1.0, 3.0),
    ],
)
def test_speed_matches_finite_differences(motion):
    ts = np.linspace(1e-3, motion.t_max - 1e-3, 400)
    h = 1e-6
    fd = (motion.length(ts + h) - motion.length(ts - h)) / (2 * h)
    an = motion.speed(ts)
    assert np.max(np.abs(an - fd) / np.maximum(1.0, np.abs(an))) < 1e-6


@pytest.mark.parametrize(
    "motion",
    [
        BoundaryMotion.exponential(0.5, 3.0),
        BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 3.0),
    ],
)
def test_accel_matches_finite_differences(motion):
    ts = np.linspace(0.1, motion.t_max - 0.1, 100)
    h = 1e-4
    fd = (motion.length(ts + h) - 2 * motion.length(ts) + motion.length(ts - h)) / h**2
    an = motion.accel(ts)
    assert np.max(np.abs(an - fd)) < 1e-5


@pytest.mark.parametrize(
    "motion",
    [
        BoundaryMotion.linear(0.5, 0.3, 3.0),
        BoundaryMotion.exponential(0.5, 3.0),
        BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 3.0),
    ],
)
def test_physical_invariants(motion):
    ts = np.linspace(0.0, motion.t_max, 2000)
    assert np.all(motion.length(ts) > 0.0)
    assert np.all(np.abs(motion.speed(ts)) < 1.0)


def test_out_of_window_raises():
    m = BoundaryMotion.linear(0.5, 0.3, t_max=2.0)
    with pytest.raises(DomainError):
        m.length(2.5)
    with pytest.raises(DomainError):
        m.speed(-0.1)


class TestValidateMotion:
    def test_accepts_slow_linear(self):
        rep = validate_motion(BoundaryMotion.linear(0.5, 0.3, 3.0))
        assert rep.max_speed == pytest.approx(0.3, abs=1e-12)
        assert rep.min_length == pytest.approx(0.5, abs=1e-12)

    def test_rejects_superluminal(self):
        with pytest.raises(InvalidMotionError):
            validate_motion(BoundaryMotion.linear(0.5, 1.1, 3.0))

    def test_rejects_vanishing_length(self):
        motion = BoundaryMotion.linear(0.5, -0.4, 2.0)  # L(t) = 0 at t = 1.25
        with pytest.raises(InvalidMotionError) as err:
            validate_motion(motion)
        # the reported time must actually exhibit the violation
        t_bad = err.value.t_offending
        assert t_bad is not None
        assert 0.5 - 0.4 * t_bad <= 0.0

    def test_accepts_small_amplitude_sinh(self):
        rep = validate_motion(BoundaryMotion.sinh_inverse(0.1, 1.0, 1.0, 6.0))
        assert rep.max_speed < 1.0

    def test_custom_with_consistent_derivative(self):
        m = BoundaryMotion.custom(
            length=lambda t: 1.0 + 0.2 * np.sin(t),
            speed=lambda t: 0.2 * np.cos(t),
            t_max=3.0,
        )
        rep = validate_motion(m)
        assert rep.max_speed == pytest.approx(0.2, rel=1e-6)

    def test_custom_with_wrong_derivative_rejected(self):
        m = BoundaryMotion.custom(
            length=lambda t: 1.0 + 0.2 * np.sin(t),
            speed=lambda t: 0.25 * np.cos(t),  # off by 25 percent
            t_max=3.0,
        )
        with pytest.raises(InvalidMotionError):
            validate_motion(m)

    def test_custom_without_derivative_uses_finite_differences(self):
        m = BoundaryMotion.custom(length=lambda t: 1.0 + 0.2 * np.sin(t), t_max=3.0)
        ts = np.linspace(0, 3, 100)
        assert np.max(np.abs(m.speed(ts) - 0.2 * np.cos(ts))) < 1e-6


class TestInverseMethod:
    def test_recovers_linear_length(self):
        tr = ExactLinearTransform(L0=0.5, v=0.3)
        rec = recover_length_from_transform(tr, 0.5, 5.0)
        exact = 0.5 + 0.3 * rec.times
        assert np.max(np.abs(rec.lengths - exact)) < 1e-8

    def test_recovers_sinh_length(self):
        tr = ExactSinhTransform(A=1.0, k=1.0, xi0=1.0)
        L0 = math.asinh(1.0 / math.cosh(1.0))
        rec = recover_length_from_transform(tr, L0, 5.0)
        exact = np.arcsinh(1.0 / np.cosh(rec.times - 1.0))
        assert np.max(np.abs(rec.lengths - exact)) < 1e-8

    def test_constant_length_from_scaling_transform(self):
        tr = ExactLinearTransform(L0=0.7, v=0.0)  # R = xi / L0
        rec = recover_length_from_transform(tr, 0.7, 3.0)
        assert np.max(np.abs(rec.lengths - 0.7)) < 1e-12

    def test_inconsistent_initial_value_raises(self):
        tr = ExactLinearTransform(L0=0.5, v=0.3)
        with pytest.raises(PreconditionError):
            recover_length_from_transform(tr, 0.9, 2.0)

    def test_vanishing_derivative_raises(self):
        class Flat:
            def value(self, xi):
                return np.zeros_like(np.asarray(xi, dtype=float)) + np.asarray(xi) * 1e-16

            def derivative(self, xi):
                return np.full_like(np.asarray(xi, dtype=float), 1e-16)

        flat = Flat()

        # bypass the endpoint precondition by monkeypatching value at +-L0
        class Flat2(Flat):
            def value(self, xi):
                return np.sign(np.asarray(xi, dtype=float))  # R(L0)-R(-L0) = 2

        with pytest.raises(SingularityError):
            recover_length_from_transform(Flat2(), 0.5, 1.0)


def test_motion_from_config_roundtrip():
    m = BoundaryMotion.sinh_inverse(2.0, 1.0, 0.5, 3.0)
    m2 = motion_from_config(m.config())
    ts = np.linspace(0, 3, 50)
    np.testing.assert_allclose(m.length(ts), m2.length(ts), rtol=0, atol=0)


def test_motion_from_config_rejects_garbage():
    with pytest.raises(PreconditionError):
        motion_from_config({"motion": {"type": "spiral"}, "t_max": 1.0})
    with pytest.raises(PreconditionError):
        motion_from_config({"t_max": 1.0})
