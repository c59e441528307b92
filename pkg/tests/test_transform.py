import math

import numpy as np
import pytest

from mbwave import (
    BoundaryMotion,
    DomainError,
    ExactLinearTransform,
    ExactSinhTransform,
    MooreTransform,
    SingularityError,
    UnsupportedScenarioError,
    exact_transform_for,
    linear_series,
    residual_bc_r,
    residual_bc_r_rms,
)
from mbwave.transform import check_covers


def test_zero_speed_limit_is_scaling():
    tr = ExactLinearTransform(L0=1.0, v=0.0)
    assert tr.value(0.7) == pytest.approx(0.7, abs=1e-15)
    assert tr.derivative(0.3) == pytest.approx(1.0, abs=1e-15)


def test_linear_closed_form_value():
    tr = ExactLinearTransform(L0=0.5, v=0.3)
    expected = 2.0 * math.log(1.3) / math.log(13.0 / 7.0)
    assert tr.value(0.5) == pytest.approx(expected, abs=1e-14)


def test_linear_closed_form_derivative():
    tr = ExactLinearTransform(L0=0.5, v=0.3)
    expected = (2.0 / math.log(13.0 / 7.0)) * 0.6
    assert tr.derivative(0.0) == pytest.approx(expected, abs=1e-13)
    h = 1e-7
    fd = (tr.value(h) - tr.value(-h)) / (2 * h)
    assert tr.derivative(0.0) == pytest.approx(fd, rel=1e-8)


def test_sinh_values():
    tr = ExactSinhTransform(A=1.0, k=1.0, xi0=1.0)
    assert tr.value(1.0) == pytest.approx(0.0, abs=1e-15)
    assert tr.derivative(1.0) == pytest.approx(1.0, abs=1e-15)


def test_linear_pole_raises():
    tr = ExactLinearTransform(L0=0.5, v=-0.3)  # pole at xi = 5/3
    with pytest.raises(SingularityError):
        tr.value(5.0 / 3.0)


def test_out_of_interval_raises():
    tr = ExactLinearTransform(L0=0.5, v=0.3)  # defined for xi > -5/3
    with pytest.raises(DomainError):
        tr.value(-2.0)


@pytest.mark.parametrize(
    "motion",
    [
        BoundaryMotion.linear(0.5, 0.3, 4.0),
        BoundaryMotion.linear(1.0, -0.15, 4.0),
        BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 4.0),
        BoundaryMotion.sinh_inverse(2.0, 1.0, 1.0, 4.0),
    ],
)
def test_exact_pairs_satisfy_functional_equation(motion):
    tr = exact_transform_for(motion)
    ts = np.linspace(0.0, motion.t_max, 500)
    assert np.max(residual_bc_r(tr, motion, ts)) < 1e-12


def test_no_exact_transform_for_exponential():
    with pytest.raises(UnsupportedScenarioError):
        exact_transform_for(BoundaryMotion.exponential(0.5, 2.0))


@pytest.mark.parametrize(
    "tr, lo, hi",
    [
        (ExactLinearTransform(L0=0.5, v=0.3), -0.5, 6.0),
        (ExactSinhTransform(A=1.0, k=1.0, xi0=1.0), -0.61, 5.0),
    ],
)
def test_monotonicity_on_ordered_pairs(tr, lo, hi):
    rng = np.random.RandomState(42)
    a = rng.uniform(lo, hi, 10_000)
    b = a + rng.uniform(1e-9, 0.5, 10_000)
    assert np.all(tr.value(b) > tr.value(a))


def test_derivative_matches_finite_differences():
    tr = ExactSinhTransform(A=1.0, k=1.0, xi0=1.0)
    xs = np.linspace(-0.5, 4.0, 200)
    h = 1e-6
    fd = (tr.value(xs + h) - tr.value(xs - h)) / (2 * h)
    assert np.max(np.abs(tr.derivative(xs) - fd) / np.abs(fd)) < 1e-6


def test_moore_linear_residual_is_time_independent():
    L0, v, n = 0.5, 0.3, 6
    motion = BoundaryMotion.linear(L0, v, 4.0)
    series = linear_series(L0, v, n)
    tr = MooreTransform(series, n)
    ts = np.linspace(0.0, 4.0, 64)
    res = residual_bc_r(tr, motion, ts)
    # closed form: |ln((1+v)/(1-v)) * sum_l c_l v^(2l-1) - 2|, no t dependence
    ls = np.arange(n + 1, dtype=float)
    expected = abs(math.log(1.3 / 0.7) * float(np.sum(series.c * v ** (2 * ls - 1))) - 2.0)
    assert res.max() - res.min() < 1e-12  # t-independent up to rounding
    np.testing.assert_allclose(res, expected, rtol=1e-5, atol=1e-13)


def test_rms_aggregate_matches_manual_grid():
    motion = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 3.0)
    tr = exact_transform_for(motion)
    rms = residual_bc_r_rms(tr, motion)
    assert rms < 1e-12


def test_check_covers():
    motion = BoundaryMotion.linear(0.5, -0.3, 1.0)
    tr = exact_transform_for(motion)
    check_covers(tr, motion)  # pole at 5/3 > t_max + L(t_max) = 1.2

    class Narrow(ExactSinhTransform):
        xi_min = 0.0

    with pytest.raises(DomainError):
        check_covers(Narrow(A=1, k=1, xi0=1), motion)
