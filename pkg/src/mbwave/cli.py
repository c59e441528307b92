"""Command-line interface: solve scenarios, diagnostics, benchmarks, figures.

Subcommands
-----------
solve             run one scenario, write u.csv + errors.csv + manifest.json
build-transform   build the marching reconstruction, report residuals
moore-diagnostics coefficient/term/residual table of a perturbation family
bench             timing comparison reconstruction vs backtracing
figure            canned parameter studies (fig2..fig8), CSV + gnuplot files
validate-motion   check a motion against L > 0 and |dL/dt| < 1

Exit codes: 0 ok, 2 config parse error, 3 scenario validation error,
4 numeric failure.  A scenario is one JSON object; command-line flags
override config keys.  Every solve writes a manifest with all resolved
settings; re-running from the manifest reproduces the CSVs byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .backtrace import BacktraceTransform
from .boundary import BoundaryMotion, motion_from_config, validate_motion
from .characteristics import residual_bc_w, solve_characteristics
from .errors import (
    InvalidMotionError,
    IncompatibleInitialConditionError,
    PreconditionError,
    UnsupportedScenarioError,
    WaveSolverError,
)
from .metrics import (
    DEFAULT_N_X,
    ErrorReport,
    environment_note,
    rmse_vs_reference,
    time_methods,
    write_errors_csv,
    write_gnuplot_script,
    write_timings_csv,
)
from .modes import InitialCondition, ModalSolution, compute_coefficients, epsilon_ic
from .moore import (
    MooreTransform,
    optimal_truncation,
    series_for_motion,
    term_magnitudes,
)
from .reconstruction import DEFAULT_RHO, build_transform
from .seed import build_seed
from .metrics import build_reference
from .transform import exact_transform_for, residual_bc_r, residual_bc_r_rms

_MOTION_PRESETS = {
    "linear": {"type": "linear", "L0": 0.5, "v": 0.3},
    "exponential": {"type": "exponential", "k": 0.5},
    "sinh": {"type": "sinh_inverse", "A": 1.0, "k": 1.0, "xi0": 1.0},
}

METHODS = ("exact", "moore", "imr", "imc", "backtrace")


@dataclass
class Scenario:
    """One solver run: motion + initial condition + method + parameters."""

    motion: dict
    t_max: float = 4.0
    method: str = "imc"
    ic: str = "gaussian"
    rho: float = DEFAULT_RHO
    n_max: int = 150
    seed_degree: int = 3
    moore_terms: int | str = "auto"
    n_x: int = DEFAULT_N_X
    n_t: int = 65
    reference: str = "auto"  # auto | off
    output_dir: str = "."

    def resolved(self) -> dict:
        return asdict(self)

    def scenario_id(self) -> str:
        mkind = self.motion.get("type", "custom")
        return f"{mkind}__{self.ic}__{self.method}"


def _load_scenario(args) -> Scenario:
    cfg: dict = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if "scenario" in cfg:  # manifests embed the resolved scenario
            cfg = cfg["scenario"]
    if getattr(args, "motion", None):
        if args.motion in _MOTION_PRESETS:
            cfg["motion"] = dict(_MOTION_PRESETS[args.motion])
        elif Path(args.motion).exists():
            with open(args.motion) as fh:
                mcfg = json.load(fh)
            cfg["motion"] = mcfg["motion"] if "motion" in mcfg else mcfg
        else:
            raise PreconditionError(
                f"--motion must be one of {sorted(_MOTION_PRESETS)} or a JSON file"
            )
    for key in (
        "t_max",
        "method",
        "ic",
        "rho",
        "n_max",
        "seed_degree",
        "moore_terms",
        "n_x",
        "n_t",
        "reference",
        "output_dir",
    ):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if "motion" not in cfg:
        raise PreconditionError("no motion given (--motion or config)")
    try:
        sc = Scenario(**cfg)
    except TypeError as exc:
        raise PreconditionError(f"bad scenario keys: {exc}") from exc
    return sc


def _make_ic(sc: Scenario, motion: BoundaryMotion) -> InitialCondition:
    if sc.ic == "sine":
        return InitialCondition.sine(motion.L0, motion.Ldot0)
    if sc.ic == "gaussian":
        return InitialCondition.gaussian(motion.L0)
    if sc.ic == "zero":
        return InitialCondition.zero(motion.L0)
    path = Path(sc.ic)
    if path.exists():
        data = np.genfromtxt(path, delimiter=",", names=True)
        return InitialCondition.from_samples(data["x"], data["f"], data["g"], name=path.stem)
    raise UnsupportedScenarioError(
        f"initial condition {sc.ic!r} is not a preset or a readable CSV file"
    )


def _validate_scenario(sc: Scenario, motion: BoundaryMotion) -> None:
    if sc.method not in METHODS:
        raise UnsupportedScenarioError(f"method must be one of {METHODS}")
    if sc.method == "moore" and motion.kind not in ("linear", "exponential"):
        raise UnsupportedScenarioError(
            "moore requires a linear or exponential motion (closed-form coefficients)"
        )
    if sc.method == "exact" and motion.kind not in ("linear", "sinh_inverse"):
        raise UnsupportedScenarioError(
            "exact requires a motion with a catalogued transform (linear, sinh_inverse)"
        )
    if sc.seed_degree not in (2, 3):
        raise UnsupportedScenarioError("seed_degree must be 2 or 3")


def run_scenario(sc: Scenario) -> dict:
    """Execute the pipeline; returns the manifest dict (also written to disk)."""
    motion = motion_from_config({"motion": sc.motion, "t_max": sc.t_max})
    validate_motion(motion)
    _validate_scenario(sc, motion)
    ic = _make_ic(sc, motion)
    ic.check_compatibility(motion.Ldot0)

    outdir = Path(sc.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    ts = np.linspace(0.0, sc.t_max, sc.n_t)
    eps_bc_r_arr = eps_bc_w_arr = None
    eps_ic_val = None
    expansion = None

    if sc.method == "imc":
        sol = solve_characteristics(motion, ic, rho=sc.rho)
        eps_bc_w_arr = residual_bc_w(sol.wfun, motion, ts)
    else:
        if sc.method == "exact":
            transform = exact_transform_for(motion)
        elif sc.method == "imr":
            transform = build_transform(motion, rho=sc.rho, seed_degree=sc.seed_degree)
        elif sc.method == "backtrace":
            seed = build_seed(motion.L0, motion.Ldot0, motion.Lddot0, sc.seed_degree)
            transform = BacktraceTransform(seed, motion)
        else:  # moore
            series = series_for_motion(motion, n_terms=40)
            if sc.moore_terms == "auto":
                scan = optimal_truncation(series, motion, xi_probe=1.0)
                n_terms = scan.n_opt
            else:
                n_terms = int(sc.moore_terms)
                series = series_for_motion(motion, n_terms=max(40, n_terms))
            transform = MooreTransform(series, n_terms)
        expansion = compute_coefficients(ic, transform, sc.n_max)
        sol = ModalSolution(expansion, transform)
        eps_bc_r_arr = residual_bc_r(transform, motion, ts)
        eps_ic_val = epsilon_ic(expansion, transform, ic)

    eps_rms_arr = None
    if sc.reference == "auto" and motion.kind in ("linear", "sinh_inverse"):
        ref = build_reference(motion, ic, n_max=300)
        eps_rms_arr = np.array(
            [rmse_vs_reference(sol, ref, float(t), sc.n_x, motion) for t in ts]
        )

    # u.csv: t, x, u over the full grid
    u_path = outdir / "u.csv"
    with open(u_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "u"])
        for t in ts:
            xs = np.linspace(0.0, float(motion.length(float(t))), sc.n_x)
            us = sol.u(xs, float(t))
            for x, u in zip(xs, us):
                w.writerow([format(t, ".17g"), format(x, ".17g"), format(u, ".17g")])

    report = ErrorReport(
        scenario=sc.scenario_id(),
        times=ts,
        eps_rms=eps_rms_arr,
        eps_bc_r=eps_bc_r_arr,
        eps_bc_w=eps_bc_w_arr,
        eps_ic=eps_ic_val,
        environment=environment_note(rho=sc.rho, n_max=sc.n_max),
    )
    errors_path = outdir / "errors.csv"
    write_errors_csv(errors_path, report)

    manifest = {
        "version": __version__,
        "scenario": sc.resolved(),
        "environment": report.environment,
        "outputs": [u_path.name, errors_path.name],
    }
    if expansion is not None and expansion.notes:
        manifest["warnings"] = list(expansion.notes)
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


# -- subcommand handlers ---------------------------------------------------


def _cmd_solve(args) -> int:
    sc = _load_scenario(args)
    run_scenario(sc)
    print(f"wrote u.csv, errors.csv, manifest.json in {sc.output_dir}")
    return 0


def _cmd_build_transform(args) -> int:
    sc = _load_scenario(args)
    motion = motion_from_config({"motion": sc.motion, "t_max": sc.t_max})
    validate_motion(motion)
    transform = build_transform(motion, rho=sc.rho, seed_degree=sc.seed_degree)
    rms = residual_bc_r_rms(transform, motion)
    print(
        f"regions={transform.curve.n_regions} interval=[{transform.xi_min:.6g}, "
        f"{transform.xi_max:.6g}] eps_bc_r_rms={rms:.6e}"
    )
    if args.samples:
        xs = np.linspace(transform.xi_min, transform.xi_max, args.n_samples)
        with open(args.samples, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi", "R"])
            for x, r in zip(xs, transform.value(xs)):
                w.writerow([format(x, ".17g"), format(r, ".17g")])
        print(f"wrote {args.samples}")
    return 0


def _cmd_moore_diagnostics(args) -> int:
    if args.family == "linear":
        from .moore import linear_series

        series = linear_series(args.L0, args.v, args.n)
        motion = BoundaryMotion.linear(args.L0, args.v, args.t_max)
    else:
        from .moore import exponential_series

        series = exponential_series(args.k, args.n)
        motion = BoundaryMotion.exponential(args.k, args.t_max)
    validate_motion(motion)
    scan = optimal_truncation(series, motion, xi_probe=args.xi_probe, n_scan=args.n)
    mags = term_magnitudes(series, args.xi_probe)
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ell", "c", "c_sign", "c_log10_abs", "alpha_abs", "residual_rms"])
        for ell in range(args.n + 1):
            c = series.c[ell]
            w.writerow(
                [
                    ell,
                    format(c, ".17g") if np.isfinite(c) else "",
                    int(series.c_sign[ell]),
                    format(series.c_log_abs[ell] / np.log(10.0), ".17g"),
                    format(mags[ell], ".17g") if np.isfinite(mags[ell]) else "",
                    format(scan.residuals[ell], ".17g") if ell < len(scan.residuals) else "",
                ]
            )
    print(
        f"wrote {args.output} (n_opt={scan.n_opt}, min rms residual="
        f"{scan.rms_residual:.6e}, divergence onset={scan.onset})"
    )
    return 0


def _cmd_bench(args) -> int:
    sc = _load_scenario(args)
    motion = motion_from_config({"motion": sc.motion, "t_max": max(sc.t_max, args.t0)})
    validate_motion(motion)
    counts = [int(c) for c in args.counts.split(",")]
    records = time_methods(motion, args.t0, counts, rho=sc.rho, runs=args.runs)
    outdir = Path(sc.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "timings.csv"
    write_timings_csv(path, records)
    write_gnuplot_script(
        outdir / "timings.gp",
        path.name,
        x_col=3,
        y_cols={"prep_s": 4, "eval_s": 5},
        title=f"computation time, t0={args.t0}",
        logx=True,
        logy=True,
    )
    if args.parallel:
        # demonstration of parallel batch evaluation outside the timed runs
        from .metrics import batch_eval_parallel

        transform = build_transform(motion, t_max=args.t0, rho=sc.rho)
        xs = np.linspace(transform.xi_min, transform.xi_max, max(counts))
        serial = transform.value(xs)
        parallel = batch_eval_parallel(transform.value, xs)
        assert np.array_equal(serial, parallel)
    for r in records:
        print(
            f"{r.method:10s} N={r.n_evals:8d} prep={r.prep_seconds:.6f}s "
            f"eval={r.eval_seconds:.6f}s reflections={r.reflections}"
        )
    return 0


def _cmd_validate_motion(args) -> int:
    sc = _load_scenario(args)
    motion = motion_from_config({"motion": sc.motion, "t_max": sc.t_max})
    rep = validate_motion(motion)
    print(
        f"accepted: max |dL/dt| = {rep.max_speed:.6g} (t={rep.t_at_max_speed:.6g}), "
        f"min L = {rep.min_length:.6g} (t={rep.t_at_min_length:.6g})"
    )
    return 0


def _cmd_figure(args) -> int:
    from . import figures

    fn = getattr(figures, args.name, None)
    if fn is None:
        raise UnsupportedScenarioError(
            f"unknown figure {args.name!r}; available: {figures.available()}"
        )
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = fn(outdir)
    for f in files:
        print(f"wrote {f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mbwave", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"mbwave {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_scenario_flags(sp, with_method=True):
        sp.add_argument("--config", help="scenario JSON (or a manifest.json)")
        sp.add_argument("--motion", help="preset name (linear, exponential, sinh) or JSON file")
        sp.add_argument("--t-max", dest="t_max", type=float)
        if with_method:
            sp.add_argument("--method", choices=METHODS)
            sp.add_argument("--ic", help="sine | gaussian | zero | CSV file with x,f,g")
            sp.add_argument("--n-max", dest="n_max", type=int)
            sp.add_argument("--moore-terms", dest="moore_terms")
            sp.add_argument("--n-x", dest="n_x", type=int)
            sp.add_argument("--n-t", dest="n_t", type=int)
            sp.add_argument("--reference", choices=("auto", "off"))
        sp.add_argument("--rho", type=float)
        sp.add_argument("--seed-degree", dest="seed_degree", type=int)
        sp.add_argument("--output-dir", dest="output_dir")

    sp = sub.add_parser("solve", help="run one scenario")
    add_scenario_flags(sp)
    sp.set_defaults(fn=_cmd_solve)

    sp = sub.add_parser("build-transform", help="build and report the reconstruction")
    add_scenario_flags(sp, with_method=False)
    sp.add_argument("--samples", help="write sampled (xi, R) CSV here")
    sp.add_argument("--n-samples", dest="n_samples", type=int, default=1000)
    sp.set_defaults(fn=_cmd_build_transform)

    sp = sub.add_parser("moore-diagnostics", help="perturbation coefficient table")
    sp.add_argument("--family", choices=("linear", "exponential"), required=True)
    sp.add_argument("--L0", type=float, default=0.5)
    sp.add_argument("--v", type=float, default=0.3)
    sp.add_argument("--k", type=float, default=0.5)
    sp.add_argument("--n", type=int, default=40)
    sp.add_argument("--xi-probe", dest="xi_probe", type=float, default=1.0)
    sp.add_argument("--t-max", dest="t_max", type=float, default=1.0)
    sp.add_argument("--output", default="moore_diagnostics.csv")
    sp.set_defaults(fn=_cmd_moore_diagnostics)

    sp = sub.add_parser("bench", help="timing comparison")
    add_scenario_flags(sp, with_method=False)
    sp.add_argument("--t0", type=float, default=5.0)
    sp.add_argument("--counts", default="10,100,1000,10000,100000")
    sp.add_argument("--runs", type=int, default=5)
    sp.add_argument("--parallel", action="store_true")
    sp.set_defaults(fn=_cmd_bench)

    sp = sub.add_parser("figure", help="reproduce a parameter study")
    sp.add_argument("name", help="fig2 .. fig8")
    sp.add_argument("--output-dir", dest="output_dir", default=".")
    sp.set_defaults(fn=_cmd_figure)

    sp = sub.add_parser("validate-motion", help="speed/positivity check")
    add_scenario_flags(sp, with_method=False)
    sp.set_defaults(fn=_cmd_validate_motion)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse errors -> config parse error
        return 0 if exc.code in (0, None) else 2
    try:
        return args.fn(args)
    except (json.JSONDecodeError, OSError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InvalidMotionError, UnsupportedScenarioError, IncompatibleInitialConditionError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 3
    except WaveSolverError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
