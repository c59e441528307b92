"""Error indicators, the reference solution, and the timing harness.

Error metrics follow the solver's standard set: eps_RMS(t) is the spatial
root-mean-square deviation from a reference solution at one time (max and
mean variants included for completeness), eps_BC the boundary-residual
family from the transform/characteristics modules, eps_IC the amplitude
bound from the modes module.  The reference solution is the 300-mode
expansion under the exact closed-form transform, which is exact for its own
(band-limited) initial data.

Timings are wall-clock medians over repeated runs with a warm-up pass; they
are reported, never asserted as absolute numbers.
"""

from __future__ import annotations

import csv
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .backtrace import backtrace_eval_batch
from .boundary import BoundaryMotion
from .errors import UnsupportedScenarioError
from .modes import InitialCondition, ModalSolution, compute_coefficients
from .reconstruction import DEFAULT_RHO, build_transform
from .seed import build_seed
from .transform import exact_transform_for

DEFAULT_N_X = 512


def _x_grid(motion: BoundaryMotion, t: float, n_x: int) -> np.ndarray:
    return np.linspace(0.0, float(motion.length(t)), n_x)


def rmse_vs_reference(u_test, u_ref, t: float, n_x: int, motion: BoundaryMotion) -> float:
    """Spatial RMS of u_test - u_ref over n_x uniform points on [0, L(t)]."""
    if n_x < 2:
        raise ValueError("n_x must be >= 2")
    x = _x_grid(motion, t, n_x)
    d = np.asarray(u_test.u(x, t)) - np.asarray(u_ref.u(x, t))
    return float(np.sqrt(np.mean(d * d)))


def max_error_vs_reference(u_test, u_ref, t: float, n_x: int, motion: BoundaryMotion) -> float:
    x = _x_grid(motion, t, n_x)
    return float(np.max(np.abs(np.asarray(u_test.u(x, t)) - np.asarray(u_ref.u(x, t)))))


def mean_error_vs_reference(u_test, u_ref, t: float, n_x: int, motion: BoundaryMotion) -> float:
    x = _x_grid(motion, t, n_x)
    return float(np.mean(np.abs(np.asarray(u_test.u(x, t)) - np.asarray(u_ref.u(x, t)))))


def build_reference(
    motion: BoundaryMotion, ic: InitialCondition, n_max: int = 300
) -> ModalSolution:
    """Reference: exact transform, first ``n_max`` mode coefficients.

    This equals the modal solution whose initial condition is the
    band-limited projection of ``ic`` (idealized_initial_condition), so it
    solves its own initial data exactly.  Raises UnsupportedScenarioError
    for motions without a catalogued exact transform.
    """
    transform = exact_transform_for(motion)
    expansion = compute_coefficients(ic, transform, n_max)
    return ModalSolution(expansion=expansion, transform=transform)


@dataclass(frozen=True)
class TimingRecord:
    method: str
    t0: float
    n_evals: int
    prep_seconds: float
    eval_seconds: float
    reflections: int


@dataclass
class ErrorReport:
    """Collected error indicators for one scenario."""

    scenario: str
    times: np.ndarray
    eps_rms: np.ndarray | None = None
    eps_bc_r: np.ndarray | None = None
    eps_bc_w: np.ndarray | None = None
    eps_ic: float | None = None
    timings: list[TimingRecord] = field(default_factory=list)
    environment: str = ""

    def __post_init__(self):
        for arr in (self.eps_rms, self.eps_bc_r, self.eps_bc_w):
            if arr is not None and np.any(np.asarray(arr) < 0.0):
                raise ValueError("error values must be >= 0")


def environment_note(**extra) -> str:
    import scipy

    bits = [
        f"python={sys.version.split()[0]}",
        f"numpy={np.__version__}",
        f"scipy={scipy.__version__}",
        f"platform={platform.platform()}",
        f"n_x_default={DEFAULT_N_X}",
    ]
    bits += [f"{k}={v}" for k, v in extra.items()]
    return " ".join(bits)


def time_methods(
    motion: BoundaryMotion,
    t0: float,
    counts,
    rho: float = DEFAULT_RHO,
    seed_degree: int = 3,
    runs: int = 5,
) -> list[TimingRecord]:
    """Wall-clock comparison of marching reconstruction vs backtracing.

    For each count N the transform is evaluated at t0 - x and t0 + x over an
    equidistant x array of N points on [0, L(t0)].  The reconstruction pays
    a preparation cost (grid + extension + splines, rebuilt and timed every
    run) plus a batch evaluation; backtracing has no preparation.  Medians
    over ``runs`` runs after one warm-up; outputs are deterministic and
    independent of the timing machinery.
    """
    counts = sorted(int(c) for c in counts)
    L_t0 = float(motion.length(t0))
    seed = build_seed(motion.L0, motion.Ldot0, motion.Lddot0, degree=seed_degree)
    records: list[TimingRecord] = []
    for n in counts:
        xs = np.linspace(0.0, L_t0, n)
        pts = np.concatenate([t0 - xs, t0 + xs])

        prep_times, eval_times = [], []
        for run in range(runs + 1):  # first run is the warm-up
            tic = time.perf_counter()
            transform = build_transform(motion, t_max=t0, rho=rho, seed_degree=seed_degree)
            mid = time.perf_counter()
            transform.value(pts)
            toc = time.perf_counter()
            if run:
                prep_times.append(mid - tic)
                eval_times.append(toc - mid)
        records.append(
            TimingRecord(
                method="imr",
                t0=float(t0),
                n_evals=n,
                prep_seconds=float(np.median(prep_times)),
                eval_seconds=float(np.median(eval_times)),
                reflections=transform.curve.n_regions,
            )
        )

        bt_times = []
        counts_arr = None
        for run in range(runs + 1):
            tic = time.perf_counter()
            _, counts_arr = backtrace_eval_batch(seed, motion, pts)
            toc = time.perf_counter()
            if run:
                bt_times.append(toc - tic)
        records.append(
            TimingRecord(
                method="backtrace",
                t0=float(t0),
                n_evals=n,
                prep_seconds=0.0,
                eval_seconds=float(np.median(bt_times)),
                reflections=int(counts_arr.max()),
            )
        )
    return records


def batch_eval_parallel(fn, xs: np.ndarray, workers: int = 4, chunks: int = 16):
    """Evaluate a pure vectorised function over chunks in a thread pool.

    Meant for bulk post-processing outside timed sections; results are
    identical to fn(xs) regardless of scheduling (pure function, fixed
    chunking).
    """
    parts = np.array_split(np.asarray(xs, dtype=float), chunks)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        out = list(pool.map(fn, parts))
    return np.concatenate(out)


# -- CSV / plot-script emission ------------------------------------------

ERRORS_CSV_FIELDS = ["scenario", "t", "eps_rms", "eps_bc_r", "eps_bc_w", "eps_ic"]
TIMINGS_CSV_FIELDS = ["method", "t0", "n_evals", "prep_seconds", "eval_seconds", "reflections"]


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def write_errors_csv(path, report: ErrorReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ERRORS_CSV_FIELDS)
        for i, t in enumerate(report.times):
            w.writerow(
                [
                    report.scenario,
                    _fmt(t),
                    _fmt(report.eps_rms[i]) if report.eps_rms is not None else "",
                    _fmt(report.eps_bc_r[i]) if report.eps_bc_r is not None else "",
                    _fmt(report.eps_bc_w[i]) if report.eps_bc_w is not None else "",
                    _fmt(report.eps_ic),
                ]
            )


def write_timings_csv(path, records: list[TimingRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TIMINGS_CSV_FIELDS)
        for r in records:
            w.writerow(
                [r.method, _fmt(r.t0), r.n_evals, _fmt(r.prep_seconds), _fmt(r.eval_seconds), r.reflections]
            )


def write_gnuplot_script(
    path,
    csv_path: str,
    x_col: int,
    y_cols: dict,
    title: str,
    logx: bool = False,
    logy: bool = True,
) -> None:
    """Emit a gnuplot command file plotting columns of a CSV (1-based)."""
    lines = [
        "set datafile separator ','",
        f"set title '{title}'",
        "set key outside",
    ]
    if logx:
        lines.append("set logscale x")
    if logy:
        lines.append("set logscale y")
    plots = [
        f"'{csv_path}' using {x_col}:{col} with linespoints title '{label}'"
        for label, col in y_cols.items()
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
