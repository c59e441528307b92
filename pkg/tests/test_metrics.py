import csv

import numpy as np
import pytest

from mbwave import (
    BoundaryMotion,
    ErrorReport,
    InitialCondition,
    TimingRecord,
    UnsupportedScenarioError,
    build_reference,
    max_error_vs_reference,
    mean_error_vs_reference,
    rmse_vs_reference,
    solve_characteristics,
    time_methods,
)
from mbwave.metrics import (
    batch_eval_parallel,
    write_errors_csv,
    write_gnuplot_script,
    write_timings_csv,
)


@pytest.fixture(scope="module")
def setup():
    motion = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 2.0)
    ic = InitialCondition.gaussian(motion.L0)
    ref = build_reference(motion, ic, n_max=120)
    return motion, ic, ref


class _Shifted:
    def __init__(self, base, delta):
        self.base, self.delta = base, delta

    def u(self, x, t):
        return np.asarray(self.base.u(x, t)) + self.delta


class TestRmse:
    def test_identical_solutions(self, setup):
        motion, ic, ref = setup
        assert rmse_vs_reference(ref, ref, 1.0, 64, motion) == 0.0

    def test_constant_offset(self, setup):
        motion, ic, ref = setup
        shifted = _Shifted(ref, 1e-3)
        assert rmse_vs_reference(shifted, ref, 0.7, 64, motion) == pytest.approx(
            1e-3, rel=1e-12
        )
        assert max_error_vs_reference(shifted, ref, 0.7, 64, motion) == pytest.approx(
            1e-3, rel=1e-12
        )
        assert mean_error_vs_reference(shifted, ref, 0.7, 64, motion) == pytest.approx(
            1e-3, rel=1e-12
        )

    def test_max_ge_rms_ge_mean(self, setup):
        motion, ic, ref = setup
        sol = solve_characteristics(motion, ic, rho=300)
        for t in np.linspace(0.0, 2.0, 9):
            mx = max_error_vs_reference(sol, ref, float(t), 128, motion)
            rm = rmse_vs_reference(sol, ref, float(t), 128, motion)
            mn = mean_error_vs_reference(sol, ref, float(t), 128, motion)
            assert mx >= rm - 1e-18
            assert rm >= mn - 1e-18

    def test_n_x_validation(self, setup):
        motion, ic, ref = setup
        with pytest.raises(ValueError):
            rmse_vs_reference(ref, ref, 1.0, 1, motion)


class TestReference:
    def test_reference_at_t0_matches_band_limited_data(self, setup):
        from mbwave import idealized_initial_condition
        from mbwave.transform import exact_transform_for

        motion, ic, ref = setup
        tr = exact_transform_for(motion)
        ideal = idealized_initial_condition(ic, tr, n_max=120)
        xs = np.linspace(0.0, motion.L0, 101)
        assert np.max(np.abs(ref.u(xs, 0.0) - ideal.f(xs))) < 1e-13

    def test_unsupported_motion_rejected(self):
        m = BoundaryMotion.exponential(0.5, 2.0)
        with pytest.raises(UnsupportedScenarioError):
            build_reference(m, InitialCondition.gaussian(1.0))


class TestTiming:
    def test_records_structure_and_determinism(self):
        motion = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 1.5)
        recs = time_methods(motion, t0=1.5, counts=[16, 64], rho=100, runs=2)
        methods = {(r.method, r.n_evals) for r in recs}
        assert methods == {("imr", 16), ("imr", 64), ("backtrace", 16), ("backtrace", 64)}
        for r in recs:
            assert r.eval_seconds >= 0.0
            assert r.reflections > 0

    def test_backtrace_reflections_grow_with_t0(self):
        motion = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 5.0)
        r1 = time_methods(motion, t0=0.5, counts=[32], rho=100, runs=1)
        r2 = time_methods(motion, t0=5.0, counts=[32], rho=100, runs=1)
        bt1 = next(r for r in r1 if r.method == "backtrace")
        bt2 = next(r for r in r2 if r.method == "backtrace")
        assert bt2.reflections > bt1.reflections

    def test_parallel_batch_matches_serial(self):
        motion = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, 2.0)
        from mbwave import build_transform

        tr = build_transform(motion, rho=200)
        xs = np.linspace(tr.xi_min, tr.xi_max, 10_001)
        np.testing.assert_array_equal(tr.value(xs), batch_eval_parallel(tr.value, xs))


class TestCsvEmission:
    def test_errors_schema(self, tmp_path):
        report = ErrorReport(
            scenario="demo",
            times=np.array([0.0, 0.5]),
            eps_rms=np.array([1e-12, 2e-12]),
            eps_bc_r=np.array([0.0, 1e-15]),
            eps_ic=3e-9,
        )
        path = tmp_path / "errors.csv"
        write_errors_csv(path, report)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["scenario", "t", "eps_rms", "eps_bc_r", "eps_bc_w", "eps_ic"]
        assert rows[1][0] == "demo"
        assert float(rows[2][2]) == 2e-12
        assert rows[1][4] == ""  # eps_bc_w not applicable

    def test_negative_errors_rejected(self):
        with pytest.raises(ValueError):
            ErrorReport(scenario="bad", times=np.array([0.0]), eps_rms=np.array([-1.0]))

    def test_timings_schema(self, tmp_path):
        recs = [
            TimingRecord("imr", 1.0, 100, 0.5, 0.001, 7),
            TimingRecord("backtrace", 1.0, 100, 0.0, 0.2, 7),
        ]
        path = tmp_path / "timings.csv"
        write_timings_csv(path, recs)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["method", "t0", "n_evals", "prep_seconds", "eval_seconds", "reflections"]
        assert rows[1][0] == "imr" and rows[2][0] == "backtrace"

    def test_gnuplot_script_references_csv(self, tmp_path):
        path = tmp_path / "plot.gp"
        write_gnuplot_script(path, "data.csv", 1, {"series": 2}, "demo", logx=True)
        text = path.read_text()
        assert "data.csv" in text
        assert "logscale" in text
