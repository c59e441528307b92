"""Solvers for the 1D wave equation on a domain with one moving boundary.

The library provides four routes to the wave solution u(x, t) on
0 <= x <= L(t) with homogeneous Dirichlet walls:

* exact closed-form conformal transforms for the catalogued motions,
* Moore's perturbation series (linear and exponential families),
* marching interpolation reconstructing the transform (with a
  backtracing reference evaluator),
* marching interpolation applied directly to the characteristics
  function w with u = w(t - x) - w(t + x).

plus the error-metric suite (boundary residuals, initial-condition bound,
RMS against a 300-mode reference) and a benchmark CLI (``mbwave``).
"""

from .boundary import (
    BoundaryMotion,
    MotionReport,
    RecoveredLength,
    motion_from_config,
    recover_length_from_transform,
    validate_motion,
)
from .characteristics import (
    CharacteristicFunction,
    CharacteristicSolution,
    eval_u_char,
    extend_w,
    residual_bc_w,
    residual_bc_w_rms,
    seed_w,
    solve_characteristics,
)
from .errors import (
    ConstructionError,
    DomainError,
    IncompatibleInitialConditionError,
    InvalidMotionError,
    NonTerminationError,
    PreconditionError,
    SingularityError,
    UnsupportedScenarioError,
    WaveSolverError,
)
from .backtrace import BacktraceTransform, backtrace_eval, backtrace_eval_batch
from .metrics import (
    ErrorReport,
    TimingRecord,
    build_reference,
    max_error_vs_reference,
    mean_error_vs_reference,
    rmse_vs_reference,
    time_methods,
)
from .modes import (
    InitialCondition,
    ModalSolution,
    ModeExpansion,
    compute_coefficients,
    epsilon_ic,
    eval_u_modes,
    idealized_initial_condition,
)
from .moore import (
    MooreSeries,
    MooreTransform,
    TruncationScan,
    exponential_coefficients,
    exponential_series,
    linear_coefficients,
    linear_series,
    moore_truncated_r,
    optimal_truncation,
    term_magnitudes,
)
from .reconstruction import (
    DEFAULT_RHO,
    PiecewiseTransform,
    TimeGrid,
    build_time_grid,
    build_transform,
    extend_transform,
    find_region_boundaries,
    time_after_reflections,
)
from .seed import SeedPolynomial, build_seed
from .transform import (
    ExactLinearTransform,
    ExactSinhTransform,
    Transform,
    exact_transform_for,
    residual_bc_r,
    residual_bc_r_rms,
)

__version__ = "0.1.0"
