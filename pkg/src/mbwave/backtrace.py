"""Reference method: evaluate the transform by backtracing reflections.

R(xi) is obtained by repeatedly solving the implicit equation
xi = t + L(t) (monotone in t since 1 + dL/dt > 0), stepping back to
xi' = t - L(t) and adding 2, until the coordinate lands in the seed
interval [-L0, L0].  No state is kept between evaluations on purpose: the
cost per point grows with the number of reflections, which is exactly the
behaviour the timing study compares against the marching reconstruction.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from .boundary import BoundaryMotion
from .errors import DomainError, NonTerminationError
from .reconstruction import _scalar_length
from .seed import SeedPolynomial
from .transform import Transform

_ROOT_XTOL = 1e-13
MAX_REFLECTIONS = 1_000_000


def backtrace_eval(
    seed: SeedPolynomial,
    motion: BoundaryMotion,
    xi: float,
    max_reflections: int = MAX_REFLECTIONS,
):
    """Value of the extended transform at one point, plus reflection count."""
    Lfun = _scalar_length(motion)
    L0 = seed.L0
    x = float(xi)
    if x < -L0 - 1e-9:
        raise DomainError(f"xi={x} below the seed interval")
    if x > motion.t_max + Lfun(motion.t_max) + 1e-9:
        raise DomainError(f"xi={x} beyond the covered interval")
    count = 0
    while x > L0 + 1e-13:
        if count >= max_reflections:
            raise NonTerminationError(
                f"backtracing exceeded {max_reflections} reflections"
            )
        hi = min(x, motion.t_max)
        t = brentq(lambda t: t + Lfun(t) - x, 0.0, hi, xtol=_ROOT_XTOL)
        x = t - Lfun(t)
        count += 1
    return seed.value(min(max(x, -L0), L0)) + 2.0 * count, count


def backtrace_eval_batch(
    seed: SeedPolynomial,
    motion: BoundaryMotion,
    xi,
    max_reflections: int = MAX_REFLECTIONS,
    with_derivative: bool = False,
    xtol: float = _ROOT_XTOL,
):
    """Vectorised backtracing over a whole batch of coordinates.

    The implicit solves run as elementwise bisection on the active subset;
    each round peels one reflection off every point still outside the seed
    interval.  Returns (values, counts) or (values, counts, derivatives).
    """
    x = np.array(xi, dtype=float, copy=True)
    shape = x.shape
    x = np.atleast_1d(x).ravel()
    L0 = seed.L0
    xi_top = motion.t_max + float(motion.length(motion.t_max))
    if x.size and (x.min() < -L0 - 1e-9 or x.max() > xi_top + 1e-9):
        raise DomainError("xi outside the covered interval")

    counts = np.zeros(x.shape, dtype=int)
    factor = np.ones_like(x)
    active = x > L0 + 1e-13
    rounds = 0
    while active.any():
        if rounds >= max_reflections:
            raise NonTerminationError(
                f"backtracing exceeded {max_reflections} reflections"
            )
        xa = x[active]
        lo = np.zeros_like(xa)
        hi = np.minimum(xa, motion.t_max)
        # bisection on t + L(t) - xi, increasing in t
        for _ in range(200):
            if np.max(hi - lo) <= xtol:
                break
            mid = 0.5 * (lo + hi)
            up = mid + motion.length(mid) > xa
            hi = np.where(up, mid, hi)
            lo = np.where(up, lo, mid)
        t = 0.5 * (lo + hi)
        if with_derivative:
            ld = motion.speed(t)
            f = factor[active]
            factor[active] = f * (1.0 - ld) / (1.0 + ld)
        x[active] = t - motion.length(t)
        counts[active] += 1
        active = x > L0 + 1e-13
        rounds += 1

    np.clip(x, -L0, L0, out=x)
    values = seed.value(x) + 2.0 * counts
    if with_derivative:
        derivs = seed.derivative(x) * factor
        return values.reshape(shape), counts.reshape(shape), derivs.reshape(shape)
    return values.reshape(shape), counts.reshape(shape)


class BacktraceTransform(Transform):
    """Transform interface over backtracing (no caching by design)."""

    def __init__(self, seed: SeedPolynomial, motion: BoundaryMotion):
        self.seed = seed
        self.motion = motion
        self.xi_min = -seed.L0
        self.xi_max = motion.t_max + float(motion.length(motion.t_max))

    def value(self, xi):
        vals, _ = backtrace_eval_batch(self.seed, self.motion, xi)
        return vals if np.ndim(xi) else float(vals)

    def derivative(self, xi):
        _, _, derivs = backtrace_eval_batch(
            self.seed, self.motion, xi, with_derivative=True
        )
        return derivs if np.ndim(xi) else float(derivs)
