"""Canned parameter studies behind ``mbwave figure figN``.

Each recipe writes one or more CSVs plus a gnuplot command file into the
output directory and returns the list of files.  All parameters are fixed
here so the studies are reproducible end to end; every recipe finishes in
well under five minutes on commodity hardware.

fig2  convergence of the linear-family series (coefficients + deviation)
fig3  divergence of the exponential-family series
fig4  boundary residual vs resolution for both marching methods
fig5  initial-condition error bound vs mode count
fig6  RMS error vs time against the 300-mode reference (two motions)
fig7  perturbation residual vs maximal boundary speed
fig8  computation time vs number of evaluations
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .boundary import BoundaryMotion
from .characteristics import residual_bc_w_rms, solve_characteristics
from .metrics import (
    build_reference,
    rmse_vs_reference,
    time_methods,
    write_gnuplot_script,
    write_timings_csv,
)
from .modes import (
    InitialCondition,
    ModalSolution,
    compute_coefficients,
    epsilon_ic,
    idealized_initial_condition,
)
from .moore import (
    MooreTransform,
    exponential_series,
    linear_series,
    moore_truncated_r,
    optimal_truncation,
)
from .reconstruction import build_transform, time_after_reflections
from .transform import exact_transform_for, residual_bc_r_rms


def available() -> list[str]:
    return [f"fig{i}" for i in range(2, 9)]


def _rows(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([x if isinstance(x, (str, int)) else format(float(x), ".17g") for x in row])
    return path


def fig2(outdir: Path) -> list[Path]:
    """Linear family: |c_l| decay and the deviation of the truncated series."""
    L0 = 0.5
    series = linear_series(L0, 0.3, 200)
    rows_a = [(l, abs(series.c[l])) for l in range(61)]
    f_a = _rows(outdir / "fig2a_coefficients.csv", ["ell", "abs_c"], rows_a)

    vs = (0.1, 0.3, 0.5, 0.9)
    rows_b = []
    for n in range(201):
        row = [n]
        for v in vs:
            ls = np.arange(n + 1, dtype=float)
            s = float(np.sum(series.c[: n + 1] * v ** (2.0 * ls - 1.0)))
            row.append(abs(np.log((1 + v) / (1 - v)) * s - 2.0))
        rows_b.append(row)
    f_b = _rows(
        outdir / "fig2b_deviation.csv",
        ["n"] + [f"v_{v}" for v in vs],
        rows_b,
    )
    gp = outdir / "fig2.gp"
    write_gnuplot_script(
        gp, f_b.name, x_col=1,
        y_cols={f"v={v}": i + 2 for i, v in enumerate(vs)},
        title="truncated-series deviation from 2 (linear family)",
    )
    return [f_a, f_b, gp]


def fig3(outdir: Path) -> list[Path]:
    """Exponential family: coefficient growth and the divergent deviation."""
    series = exponential_series(0.5, 80)
    rows_a = [
        (l, float(series.c_log_abs[l] / np.log(10.0)), int(series.c_sign[l]))
        for l in range(81)
    ]
    f_a = _rows(outdir / "fig3a_coefficients.csv", ["ell", "log10_abs_c", "sign"], rows_a)

    ks = (0.1, 0.3, 0.5)
    t_vals = (0.5, 1.0)
    rows_b = []
    for n in range(41):
        row = [n]
        for k in ks:
            sk = exponential_series(k, 40)
            for t in t_vals:
                L = float(np.exp(-k * t))
                dev = abs(
                    moore_truncated_r(sk, n, t + L) - moore_truncated_r(sk, n, t - L) - 2.0
                )
                row.append(dev)
        rows_b.append(row)
    cols = [f"k_{k}_t_{t}" for k in ks for t in t_vals]
    f_b = _rows(outdir / "fig3b_deviation.csv", ["n"] + cols, rows_b)
    gp = outdir / "fig3.gp"
    write_gnuplot_script(
        gp, f_b.name, x_col=1,
        y_cols={c: i + 2 for i, c in enumerate(cols)},
        title="truncated-series deviation from 2 (exponential family)",
    )
    return [f_a, f_b, gp]


def fig4(outdir: Path) -> list[Path]:
    """Boundary residual vs resolution, equal reflection counts for both A."""
    files = []
    rows = []
    n_reflections = 4
    for A in (2.0, 0.1):
        probe = BoundaryMotion.sinh_inverse(A, 1.0, 1.0, t_max=40.0)
        t_max = time_after_reflections(probe, n_reflections)
        motion = BoundaryMotion.sinh_inverse(A, 1.0, 1.0, t_max=t_max)
        ic = InitialCondition.gaussian(motion.L0)
        for rho in (16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384):
            tr = build_transform(motion, rho=rho)
            r_r = residual_bc_r_rms(tr, motion)
            sol = solve_characteristics(motion, ic, rho=rho)
            r_w = residual_bc_w_rms(sol.wfun, motion)
            rows.append((A, rho, r_r, r_w))
    f = _rows(outdir / "fig4_residual_vs_rho.csv", ["A", "rho", "eps_bc_r", "eps_bc_w"], rows)
    gp = outdir / "fig4.gp"
    write_gnuplot_script(
        gp, f.name, x_col=2, y_cols={"eps_bc_r": 3, "eps_bc_w": 4},
        title="boundary residual vs resolution", logx=True,
    )
    return [f, gp]


def fig5(outdir: Path) -> list[Path]:
    """eps_IC vs mode count for the exact transform and the reconstruction.

    The perturbation route has no closed-form coefficients for this motion
    and is therefore not included (the optimal linear/exponential
    truncations are covered by fig7).
    """
    motion = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, t_max=4.0)
    exact = exact_transform_for(motion)
    imres = build_transform(motion, rho=4000)
    rows = []
    n_top = 150
    ics = {
        "sine": InitialCondition.sine(motion.L0, motion.Ldot0),
        "gaussian": InitialCondition.gaussian(motion.L0),
    }
    expansions = {
        (icn, trn): compute_coefficients(ic, tr, n_top)
        for icn, ic in ics.items()
        for trn, tr in (("exact", exact), ("imr", imres))
    }
    for n in range(2, n_top + 1, 4):
        row = [n]
        for icn in ("sine", "gaussian"):
            for trn, tr in (("exact", exact), ("imr", imres)):
                e = epsilon_ic(expansions[(icn, trn)].truncated(n), tr, ics[icn], n_points=2048)
                row.append(e)
        rows.append(row)
    cols = ["sine_exact", "sine_imr", "gaussian_exact", "gaussian_imr"]
    f = _rows(outdir / "fig5_eps_ic.csv", ["n_max"] + cols, rows)
    gp = outdir / "fig5.gp"
    write_gnuplot_script(
        gp, f.name, x_col=1, y_cols={c: i + 2 for i, c in enumerate(cols)},
        title="initial-condition error bound vs mode count",
    )
    return [f, gp]


def _fig6_one(outdir: Path, tag: str, motion: BoundaryMotion, t_max: float) -> list[Path]:
    exact = exact_transform_for(motion)
    ts = np.linspace(0.0, t_max, 33)
    files = []
    for icn in ("sine", "gaussian"):
        raw = (
            InitialCondition.sine(motion.L0, motion.Ldot0)
            if icn == "sine"
            else InitialCondition.gaussian(motion.L0)
        )
        # all methods consume the 300-mode band-limited initial data, so the
        # exact-transform reference solves its own problem exactly
        ideal = idealized_initial_condition(raw, exact, n_max=300)
        ref = build_reference(motion, raw, n_max=300)

        sols = {}
        imres = build_transform(motion, rho=20000)
        sols["imr_modal_150"] = ModalSolution(
            compute_coefficients(ideal, imres, 150), imres
        )
        sols["imc"] = solve_characteristics(motion, ideal, rho=20000)
        if motion.kind == "linear":
            from .moore import series_for_motion

            series = series_for_motion(motion, 40)
            scan = optimal_truncation(series, motion, xi_probe=1.0)
            mtr = MooreTransform(series, scan.n_opt)
            sols["moore_modal_150"] = ModalSolution(
                compute_coefficients(ideal, mtr, 150), mtr
            )
        rows = []
        for t in ts:
            row = [t]
            for name in sorted(sols):
                row.append(rmse_vs_reference(sols[name], ref, float(t), 256, motion))
            rows.append(row)
        cols = sorted(sols)
        f = _rows(outdir / f"fig6_{tag}_{icn}.csv", ["t"] + cols, rows)
        gp = outdir / f"fig6_{tag}_{icn}.gp"
        write_gnuplot_script(
            gp, f.name, x_col=1, y_cols={c: i + 2 for i, c in enumerate(cols)},
            title=f"eps_RMS vs t ({tag}, {icn})",
        )
        files += [f, gp]
    return files


def fig6(outdir: Path) -> list[Path]:
    """RMS error against the 300-mode reference on both catalogued motions."""
    files = _fig6_one(outdir, "linear", BoundaryMotion.linear(0.5, 0.3, 5.0), 5.0)
    files += _fig6_one(outdir, "sinh", BoundaryMotion.sinh_inverse(1, 1, 1, 4.0), 4.0)
    return files


def fig7(outdir: Path) -> list[Path]:
    """Perturbation-series residual vs maximal boundary speed."""
    rows = []
    t_max = 1.0
    for n_terms in (3, 10, 30):
        for speed in np.linspace(0.05, 0.9, 18):
            m_lin = BoundaryMotion.linear(0.5, float(speed), t_max)
            s_lin = linear_series(0.5, float(speed), n_terms)
            r_lin = residual_bc_r_rms(MooreTransform(s_lin, n_terms), m_lin)
            m_exp = BoundaryMotion.exponential(float(speed), t_max)
            s_exp = exponential_series(float(speed), n_terms)
            r_exp = residual_bc_r_rms(MooreTransform(s_exp, n_terms), m_exp)
            rows.append((n_terms, speed, r_lin, r_exp))
    f = _rows(
        outdir / "fig7_residual_vs_speed.csv",
        ["n_terms", "max_speed", "eps_bc_linear", "eps_bc_exponential"],
        rows,
    )
    gp = outdir / "fig7.gp"
    write_gnuplot_script(
        gp, f.name, x_col=2, y_cols={"linear": 3, "exponential": 4},
        title="perturbation residual vs maximal boundary speed",
    )
    return [f, gp]


def fig8(outdir: Path) -> list[Path]:
    """Computation time of reconstruction vs backtracing."""
    motion = BoundaryMotion.sinh_inverse(1.0, 1.0, 1.0, t_max=6.0)
    records = []
    for t0 in (0.5, 5.0):
        records += time_methods(
            motion, t0, counts=(10, 100, 1000, 10000, 100000), rho=1000, runs=5
        )
    f = outdir / "fig8_timings.csv"
    write_timings_csv(f, records)
    gp = outdir / "fig8.gp"
    write_gnuplot_script(
        gp, f.name, x_col=3, y_cols={"prep_s": 4, "eval_s": 5},
        title="computation time vs evaluations", logx=True,
    )
    return [f, gp]
