import numpy as np
import pytest

from mbwave import (
    BoundaryMotion,
    DomainError,
    PreconditionError,
    backtrace_eval,
    build_seed,
    build_time_grid,
    build_transform,
    extend_transform,
    find_region_boundaries,
    residual_bc_r,
    residual_bc_r_rms,
    time_after_reflections,
)
from mbwave.backtrace import backtrace_eval_batch
from mbwave.reconstruction import extend_curve


@pytest.fixture(scope="module")
def sinh_motion():
    return BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, t_max=3.0)


class TestRegionBoundaries:
    def test_constant_length(self):
        m = BoundaryMotion.linear(1.0, 0.0, 9.0)
        b = find_region_boundaries(m)
        np.testing.assert_allclose(b.t_hat, [0, 2, 4, 6, 8], atol=1e-12)
        np.testing.assert_allclose(b.xi_hat, [1, 3, 5, 7, 9], atol=1e-12)

    def test_linear_first_boundary(self):
        # t - (0.5 + 0.3 t) = 0.5  ->  t = 10/7
        m = BoundaryMotion.linear(0.5, 0.3, 4.0)
        b = find_region_boundaries(m)
        assert b.t_hat[1] == pytest.approx(10.0 / 7.0, abs=1e-12)

    def test_counts_match_backtracing_reflections(self):
        m = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, t_max=10.0)
        b = find_region_boundaries(m)
        seed = build_seed(m.L0, m.Ldot0, m.Lddot0, 3)
        # a point inside region j needs exactly j reflections to reach the seed
        for j in (1, 3, len(b.xi_hat) - 1):
            mid = 0.5 * (b.xi_hat[j - 1] + b.xi_hat[j])
            _, count = backtrace_eval(seed, m, mid)
            assert count == j

    def test_time_after_reflections(self):
        m = BoundaryMotion.linear(1.0, 0.0, 9.0)
        assert time_after_reflections(m, 3) == pytest.approx(6.0, abs=1e-12)
        with pytest.raises(DomainError):
            time_after_reflections(m, 40)


class TestTimeGrid:
    def test_constant_length_spacing_and_flags(self):
        m = BoundaryMotion.linear(1.0, 0.0, 5.0)
        grid = build_time_grid(m, rho=10)
        steps = np.diff(grid.times)
        assert steps.max() == pytest.approx(0.1, abs=1e-12)
        hats = grid.times[grid.boundary_mask]
        np.testing.assert_allclose(hats, [0, 2, 4], atol=1e-12)

    def test_first_step_uses_midpoint_length(self):
        # L(0)/rho = 0.05; midpoint 0.025 gives L = 0.5075, step 0.05075
        m = BoundaryMotion.linear(0.5, 0.3, 2.0)
        grid = build_time_grid(m, rho=10)
        assert grid.times[1] == pytest.approx(0.05075, abs=1e-15)

    def test_spacing_follows_length(self):
        m = BoundaryMotion.exponential(0.5, 3.0)
        grid = build_time_grid(m, rho=50)
        steps = np.diff(grid.times)
        # shrinking L -> shrinking steps, except where a snapped reflection
        # time truncates one step
        mask = grid.boundary_mask
        clean = ~(mask[1:-1] | mask[2:])
        assert np.all(np.diff(steps)[clean] < 1e-12)

    def test_no_extrapolation_guard_property(self):
        for m in (
            BoundaryMotion.exponential(0.9, 3.0),
            BoundaryMotion.sinh_inverse(0.1, 1.0, 1.0, 3.0),
        ):
            grid = build_time_grid(m, rho=4)
            t = grid.times
            assert np.all(np.diff(t) < m.length(t[1:]) + m.length(t[:-1]))

    def test_rho_too_small_rejected(self):
        with pytest.raises(PreconditionError):
            build_time_grid(BoundaryMotion.linear(1.0, 0.0, 2.0), rho=2)

    def test_grid_ends_exactly_at_t_max(self):
        m = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 2.7)
        grid = build_time_grid(m, rho=100)
        assert grid.times[-1] == 2.7
        assert np.all(np.diff(grid.times) > 0)


class TestExtension:
    def test_constant_length_propagates_linear_seed_exactly(self):
        m = BoundaryMotion.linear(1.0, 0.0, 6.0)
        seed = build_seed(1.0, 0.0, degree=2)  # degenerates to xi + 1
        grid = build_time_grid(m, rho=50)
        tr = extend_transform(seed, m, grid)
        xs = np.linspace(-1.0, 7.0, 500)
        np.testing.assert_allclose(tr.value(xs), xs + 1.0, atol=1e-13)
        assert residual_bc_r_rms(tr, m) < 1e-14

    def test_residual_ratio_at_doubling(self, sinh_motion):
        r = {rho: residual_bc_r_rms(build_transform(sinh_motion, rho=rho), sinh_motion)
             for rho in (8, 16, 32, 64)}
        assert r[16] * 8 < r[8]
        assert r[32] * 8 < r[16]
        assert r[64] * 8 < r[32]

    def test_region_splitting_matters(self, sinh_motion):
        # quadratic seed leaves curvature kinks at the region edges; a single
        # global spline across them loses at least 10x accuracy
        seed = build_seed(sinh_motion.L0, sinh_motion.Ldot0, degree=2)
        grid = build_time_grid(sinh_motion, rho=500)
        split = extend_transform(seed, sinh_motion, grid, split_regions=True)
        naive = extend_transform(seed, sinh_motion, grid, split_regions=False)
        r_split = residual_bc_r_rms(split, sinh_motion)
        r_naive = residual_bc_r_rms(naive, sinh_motion)
        assert r_naive > 10.0 * r_split

    def test_eval_at_seed_edge_and_knots(self, sinh_motion):
        tr = build_transform(sinh_motion, rho=200)
        assert tr.value(-sinh_motion.L0) == pytest.approx(0.0, abs=1e-12)
        # adjoining regions share the knot sample: continuity to rounding
        for j, knot in enumerate(tr.curve.knots[1:-1]):
            left = tr.curve.splines[j](knot)
            right = tr.curve.splines[j + 1](knot)
            assert left == pytest.approx(right, abs=1e-12)

    def test_monotone_on_ordered_pairs(self, sinh_motion):
        tr = build_transform(sinh_motion, rho=500)
        rng = np.random.RandomState(7)
        a = rng.uniform(tr.xi_min, tr.xi_max - 1e-6, 10_000)
        b = a + rng.uniform(1e-9, (tr.xi_max - tr.xi_min) / 10, 10_000)
        b = np.minimum(b, tr.xi_max)
        assert np.all(tr.value(b) > tr.value(a))

    def test_matches_backtracing(self, sinh_motion):
        tr = build_transform(sinh_motion, rho=2000)
        seed = build_seed(sinh_motion.L0, sinh_motion.Ldot0, sinh_motion.Lddot0, 3)
        rng = np.random.RandomState(3)
        xs = rng.uniform(tr.xi_min, tr.xi_max, 1000)
        bv, _ = backtrace_eval_batch(seed, sinh_motion, xs)
        tol = max(1e-9, 10.0 * residual_bc_r_rms(tr, sinh_motion))
        assert np.max(np.abs(tr.value(xs) - bv)) <= tol

    def test_partial_final_region(self):
        full = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 10.0)
        b = find_region_boundaries(full, 10.0)
        t_max = float(b.t_hat[2] + 0.3 * (b.t_hat[3] - b.t_hat[2]))
        m = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, t_max)
        tr = build_transform(m, rho=300)
        assert tr.xi_max == pytest.approx(t_max + m.length(t_max), abs=1e-12)
        assert residual_bc_r_rms(tr, m) < 1e-10

    def test_t_max_on_reflection_time(self):
        m0 = BoundaryMotion.linear(1.0, 0.0, 9.0)
        t2 = time_after_reflections(m0, 2)
        m = BoundaryMotion.linear(1.0, 0.0, t2)
        tr = build_transform(m, rho=100)
        assert tr.curve.n_regions == 2
        assert tr.xi_max == pytest.approx(5.0, abs=1e-12)

    def test_seed_motion_mismatch_rejected(self, sinh_motion):
        seed = build_seed(0.9, 0.0, degree=2)
        grid = build_time_grid(sinh_motion, rho=50)
        with pytest.raises(PreconditionError):
            extend_transform(seed, sinh_motion, grid)

    def test_out_of_interval_raises(self, sinh_motion):
        tr = build_transform(sinh_motion, rho=100)
        with pytest.raises(DomainError):
            tr.value(tr.xi_max + 0.5)

    def test_derivative_matches_fd(self, sinh_motion):
        tr = build_transform(sinh_motion, rho=1000)
        xs = np.linspace(tr.xi_min + 0.01, tr.xi_max - 0.01, 300)
        h = 1e-6
        fd = (tr.value(xs + h) - tr.value(xs - h)) / (2 * h)
        assert np.max(np.abs(tr.derivative(xs) - fd) / np.maximum(1, np.abs(fd))) < 1e-6
