"""Method of characteristics with marching interpolation.

Writing u(x, t) = w(t - x) - w(t + x), the fixed wall is satisfied
identically and the initial data pin w on the seed interval:

    w(x)  = (-f(x) - G(x)) / 2,   w(-x) = (f(x) - G(x)) / 2,   x in [0, L0],

with G(x) = integral_0^x g (the free integration constant does not affect u
and is set to zero).  The moving wall gives the transport relation
w(t + L(t)) = w(t - L(t)), i.e. the same marching extension as the
transform reconstruction with increment 0 instead of +2.  This route skips
the transform and the mode coefficients entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .boundary import BoundaryMotion
from .modes import InitialCondition, _CumulativeG
from .reconstruction import (
    DEFAULT_RHO,
    PiecewiseCurve,
    SplineSegment,
    TimeGrid,
    build_time_grid,
    extend_curve,
)

_END_REFINE = 12  # extra geometrically spaced samples per endpoint


class _WSeed(SplineSegment):
    """Spline of w on [-L0, L0]; carries L0 for the extension machinery."""

    def __init__(self, spline: CubicSpline, L0: float):
        super().__init__(spline)
        self.L0 = L0


def seed_w(ic: InitialCondition, rho: float = DEFAULT_RHO) -> _WSeed:
    """Sample w on [-L0, L0] (denser near the ends) and spline it.

    Grid size max(512, 16 rho) so the seed never limits the accuracy of the
    marching extension built at resolution rho.
    """
    L0 = ic.L0
    n = max(512, int(16 * rho))
    xs = np.linspace(-L0, L0, n)
    h = xs[1] - xs[0]
    extra = L0 - h * 0.5 ** np.arange(1, _END_REFINE + 1)
    xs = np.unique(np.concatenate([xs, -extra, extra]))
    G = _CumulativeG(ic)
    ws = 0.5 * (-ic.f_odd(xs) - G(xs))
    return _WSeed(CubicSpline(xs, ws, bc_type="not-a-knot"), L0)


@dataclass
class CharacteristicFunction:
    """Extended w: seed spline plus per-region splines (immutable once built)."""

    curve: PiecewiseCurve = field(repr=False)

    @property
    def xi_min(self) -> float:
        return self.curve.xi_min

    @property
    def xi_max(self) -> float:
        return self.curve.xi_max

    def value(self, xi):
        return self.curve.value(xi)


def extend_w(
    seed: _WSeed,
    motion: BoundaryMotion,
    grid: TimeGrid,
    split_regions: bool = True,
) -> CharacteristicFunction:
    """Transport w across the window; identical machinery to the transform
    extension with increment 0 (w is transported, not shifted)."""
    curve = extend_curve(seed, motion, grid, increment=0.0, split_regions=split_regions)
    return CharacteristicFunction(curve=curve)


def eval_u_char(wfun: CharacteristicFunction, x, t):
    """u(x, t) = w(t - x) - w(t + x)."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    out = wfun.value(t - x) - wfun.value(t + x)
    return out if (x.ndim or t.ndim) else float(out)


def residual_bc_w(wfun: CharacteristicFunction, motion: BoundaryMotion, t):
    """|w(t + L(t)) - w(t - L(t))|, the transport-relation residual."""
    t = np.asarray(t, dtype=float)
    L = motion.length(t)
    out = np.abs(wfun.value(t + L) - wfun.value(t - L))
    return out if t.ndim else float(out)


def residual_bc_w_rms(
    wfun: CharacteristicFunction,
    motion: BoundaryMotion,
    t_max: float | None = None,
    n_times: int = 2048,
) -> float:
    t_max = motion.t_max if t_max is None else float(t_max)
    ts = np.linspace(0.0, t_max, n_times)
    r = residual_bc_w(wfun, motion, ts)
    return float(np.sqrt(np.mean(r * r)))


@dataclass(frozen=True)
class CharacteristicSolution:
    """Evaluable wave solution from the characteristics route."""

    wfun: CharacteristicFunction

    def u(self, x, t):
        return eval_u_char(self.wfun, x, t)


def solve_characteristics(
    motion: BoundaryMotion,
    ic: InitialCondition,
    t_max: float | None = None,
    rho: float = DEFAULT_RHO,
) -> CharacteristicSolution:
    """Pipeline: seed w from the initial data, march, wrap as a solution."""
    seed = seed_w(ic, rho=rho)
    grid = build_time_grid(motion, t_max, rho)
    return CharacteristicSolution(wfun=extend_w(seed, motion, grid))
