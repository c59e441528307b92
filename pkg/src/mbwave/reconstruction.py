"""Interpolation-based reconstruction of the transform on a marching grid.

The functional equation R(t + L(t)) = R(t - L(t)) + 2 transports known
values forward: marching a time grid t_i and writing the transported value
at xi_i = t_i + L(t_i) extends the function from the seed interval
[-L(0), L(0)] to [-L(0), t_max + L(t_max)].  The extension consists of
*regions*, images of the seed interval under repeated transport, separated
by the reflection times t_hat with

    t_hat_0 = 0,   t_hat_{i+1} - L(t_hat_{i+1}) = t_hat_i + L(t_hat_i).

Across a region edge the function is only C^(degree-1) smooth, so each
region gets its own cubic spline (not-a-knot ends) and the t_hat values are
snapped into the grid so every edge is a shared sample.  The same machinery
transports the characteristics function w (increment 0 instead of +2).

Grid density follows the domain length: consecutive points are L(t)/rho
apart (one midpoint refinement), i.e. the point density is rho / L(t), so
steeper parts of the transform receive proportionally more samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .boundary import BoundaryMotion
from .errors import DomainError, PreconditionError, WaveSolverError
from .transform import Transform

DEFAULT_RHO = 1000.0
_ROOT_XTOL = 1e-13
_MERGE_TOL = 1e-12


def _scalar_length(motion: BoundaryMotion):
    """Fast scalar L(t) for the marching loop (math instead of numpy)."""
    import math

    p = motion.params
    if motion.kind == "linear":
        L0, v = p["L0"], p["v"]
        return lambda t: L0 + v * t
    if motion.kind == "exponential":
        k = p["k"]
        return lambda t: math.exp(-k * t)
    if motion.kind == "sinh_inverse":
        A, k, xi0 = p["A"], p["k"], p["xi0"]
        return lambda t: math.asinh(1.0 / (A * math.cosh(k * (t - xi0)))) / k
    return lambda t: float(motion._length(t))


@dataclass(frozen=True)
class RegionBoundaries:
    t_hat: np.ndarray  # reflection times, t_hat[0] = 0
    xi_hat: np.ndarray  # region edges xi_hat_i = t_hat_i + L(t_hat_i)


def find_region_boundaries(motion: BoundaryMotion, t_max: float | None = None) -> RegionBoundaries:
    """All reflection times t_hat <= t_max and their region edges.

    Each t_hat solves the implicit equation t - L(t) = xi_hat_prev; the map
    t -> t - L(t) is strictly increasing (|dL/dt| < 1), so the root is
    bracketed and unique.
    """
    t_max = motion.t_max if t_max is None else float(t_max)
    if t_max > motion.t_max + 1e-12:
        raise DomainError(f"t_max={t_max} exceeds motion window {motion.t_max}")
    Lfun = _scalar_length(motion)
    t_hat = [0.0]
    xi_hat = [Lfun(0.0)]
    while True:
        target = xi_hat[-1]
        lo = t_hat[-1]

        def h(t, target=target):
            return t - Lfun(t) - target

        if h(t_max) < 0.0:
            break  # next reflection happens after t_max
        root = brentq(h, lo, t_max, xtol=_ROOT_XTOL)
        t_hat.append(float(root))
        xi_hat.append(float(root) + Lfun(float(root)))
    return RegionBoundaries(t_hat=np.array(t_hat), xi_hat=np.array(xi_hat))


def time_after_reflections(motion: BoundaryMotion, n: int) -> float:
    """The n-th reflection time t_hat_n (raises if it exceeds the window).

    Solves the n implicit equations one by one with an expanding bracket, so
    the cost is n root-finds regardless of how many more reflections the
    window would hold.
    """
    Lfun = _scalar_length(motion)
    t = 0.0
    for _ in range(n):
        target = t + Lfun(t)

        def h(x, target=target):
            return x - Lfun(x) - target

        width = 2.0 * Lfun(t)
        hi = min(t + width, motion.t_max)
        while h(hi) < 0.0:
            if hi >= motion.t_max:
                raise DomainError(
                    f"reflection {n} lies beyond the motion window [0, {motion.t_max}]"
                )
            width *= 2.0
            hi = min(t + width, motion.t_max)
        t = brentq(h, t, hi, xtol=_ROOT_XTOL)
    return float(t)


@dataclass(frozen=True)
class TimeGrid:
    """Marching grid; boundary_mask marks the snapped reflection times."""

    times: np.ndarray
    boundary_mask: np.ndarray
    rho: float
    t_hat: np.ndarray
    xi_hat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "boundary_mask", np.asarray(self.boundary_mask, dtype=bool))


def build_time_grid(
    motion: BoundaryMotion,
    t_max: float | None = None,
    rho: float = DEFAULT_RHO,
    insert_boundaries: bool = True,
) -> TimeGrid:
    """March t_{i+1} = t_i + L(midpoint)/rho and merge the reflection times.

    With ``insert_boundaries`` the t_hat values are snapped into the grid
    (dedupe tolerance 1e-12) so every region edge is an exact sample; the
    flag exists so tests can measure how much that matters.
    """
    if rho < 4.0:
        raise PreconditionError(f"resolution rho={rho} must be >= 4")
    t_max = motion.t_max if t_max is None else float(t_max)
    bounds = find_region_boundaries(motion, t_max)
    Lfun = _scalar_length(motion)

    hats = list(bounds.t_hat[1:]) if insert_boundaries else []
    hat_pos = 0
    times = [0.0]
    flags = [True]
    t = 0.0
    while t < t_max - 1e-15 * max(1.0, t_max):
        step = Lfun(min(t + 0.5 * Lfun(t) / rho, t_max)) / rho
        tn = t + step
        # no-extrapolation guard: t_{i+1} - t_i < L(t_{i+1}) + L(t_i)
        while tn - t >= Lfun(min(tn, t_max)) + Lfun(t):
            step *= 0.5
            tn = t + step
        is_hat = False
        if hat_pos < len(hats) and tn >= hats[hat_pos] - _MERGE_TOL:
            tn = hats[hat_pos]
            hat_pos += 1
            is_hat = True
        if tn >= t_max - _MERGE_TOL:
            tn = t_max
        times.append(tn)
        flags.append(is_hat)
        t = tn
    return TimeGrid(
        times=np.array(times),
        boundary_mask=np.array(flags, dtype=bool),
        rho=float(rho),
        t_hat=bounds.t_hat,
        xi_hat=bounds.xi_hat,
    )


class SplineSegment:
    """Adapter giving a scipy spline the segment interface (value/derivative)."""

    def __init__(self, spline: CubicSpline):
        self._s = spline
        self._d = spline.derivative()

    def value(self, xi):
        out = self._s(np.asarray(xi, dtype=float))
        return out if np.ndim(xi) else float(out)

    def derivative(self, xi):
        out = self._d(np.asarray(xi, dtype=float))
        return out if np.ndim(xi) else float(out)


def _shift_poly(col: np.ndarray, d: float) -> np.ndarray:
    """Rebase a PPoly column p(x - b0) to the base b0 - d (Taylor shift).

    The returned coefficients represent the same cubic on a base point
    shifted left by ``d``; used to let a spline's first piece cover a small
    gap to its left exactly.
    """
    k = len(col) - 1
    out = np.empty_like(col)
    p = np.poly1d(col)
    fact = 1.0
    for j in range(k + 1):
        if j > 0:
            p = p.deriv()
            fact *= j
        out[k - j] = p(d) / fact
    return out


def _segment_pieces(segment0) -> tuple[np.ndarray, np.ndarray]:
    """Breakpoints and PPoly coefficient columns of the seed segment.

    A seed polynomial in u = xi + L0 is already in the local PPoly basis at
    the breakpoint -L0, so its representation here is exact.
    """
    from .seed import SeedPolynomial

    if isinstance(segment0, SeedPolynomial):
        a0, a1, a2, a3 = segment0.coeffs
        x = np.array([-segment0.L0, segment0.L0])
        c = np.array([[a3], [a2], [a1], [a0]])
        return x, c
    spline = segment0._s  # SplineSegment adapter
    return spline.x, spline.c


@dataclass
class PiecewiseCurve:
    """Seed segment on [xi_min, knots[0]] plus one cubic spline per region.

    Evaluation goes through a single composite PPoly (seed pieces and every
    region spline concatenated, region kinks preserved as breakpoints), so
    the per-point cost is uniform across the whole interval.
    """

    segment0: object
    knots: np.ndarray  # right edges: knots[0] = L(0), knots[-1] = xi_max
    splines: list = field(repr=False)
    xi_min: float = 0.0
    xi_max: float = 0.0

    def __post_init__(self):
        from scipy.interpolate import PPoly

        x0, c0 = _segment_pieces(self.segment0)
        xs = [np.asarray(x0, dtype=float)]
        cs = [np.asarray(c0, dtype=float)]
        for s in self.splines:
            prev_end = xs[-1][-1]
            cols = np.asarray(s.c, dtype=float)
            if s.x[0] < prev_end - 1e-12:
                raise WaveSolverError("overlapping region splines")
            if s.x[0] > prev_end:
                # grid built without snapped edges leaves a gap between the
                # last sample of one region and the first of the next; let the
                # newer spline cover it by rebasing its first piece (exact)
                cols = cols.copy()
                cols[:, 0] = _shift_poly(cols[:, 0], float(prev_end) - float(s.x[0]))
            xs.append(np.asarray(s.x[1:], dtype=float))
            cs.append(cols)
        breaks = np.concatenate(xs)
        coeffs = np.hstack(cs)
        self._pp = PPoly(coeffs, breaks, extrapolate=True)
        self._ppd = self._pp.derivative()

    def _checked(self, xi) -> np.ndarray:
        x = np.asarray(xi, dtype=float)
        tol = 1e-9 * max(1.0, abs(self.xi_max))
        if x.size and (np.min(x) < self.xi_min - tol or np.max(x) > self.xi_max + tol):
            raise DomainError(
                f"xi outside piecewise interval [{self.xi_min}, {self.xi_max}]"
            )
        return x

    def value(self, xi):
        x = self._checked(xi)
        out = self._pp(x)
        return out if x.ndim else float(out)

    def derivative(self, xi):
        x = self._checked(xi)
        out = self._ppd(x)
        return out if x.ndim else float(out)

    @property
    def n_regions(self) -> int:
        return len(self.splines)


def extend_curve(
    segment0,
    motion: BoundaryMotion,
    grid: TimeGrid,
    increment: float,
    split_regions: bool = True,
) -> PiecewiseCurve:
    """March the grid, transporting values through the functional equation.

    For each t_i (in order) the value at xi_i = t_i + L(t_i) is the value at
    the preimage t_i - L(t_i) plus ``increment``; preimages always fall in
    the previously finished region, so construction is region-by-region with
    vectorised inner evaluation.  ``split_regions=False`` replaces the
    per-region splines by one global spline over all samples (the naive
    interpolation baseline, kept for comparison tests).
    """
    times = grid.times
    L = motion.length(times)
    xi_img = times + L
    xi_pre = times - L
    if np.any(np.diff(xi_img) <= 0.0):
        raise WaveSolverError("image coordinates not strictly increasing")

    # Assign samples to regions.  With snapped edges consecutive regions
    # share their edge sample; without them, samples are grouped by the true
    # reflection times (used by the naive-interpolation comparison).
    slices: list[slice] = []
    if grid.boundary_mask.any():
        edge_idx = list(np.flatnonzero(grid.boundary_mask))
        for j in range(1, len(edge_idx)):
            slices.append(slice(edge_idx[j - 1], edge_idx[j] + 1))
        if edge_idx[-1] < len(times) - 1:
            slices.append(slice(edge_idx[-1], len(times)))
    else:
        region_of = np.searchsorted(grid.t_hat[1:], times, side="right")
        for r in range(int(region_of.max()) + 1):
            members = np.flatnonzero(region_of == r)
            if members.size:
                slices.append(slice(int(members[0]), int(members[-1]) + 1))

    vals = np.empty_like(times)
    splines: list[CubicSpline] = []
    knots = [float(grid.xi_hat[0])]
    prev_value = segment0.value
    for sl in slices:
        if sl.stop - sl.start < 2:
            continue  # zero-width trailing region (t_max coincides with a t_hat)
        pre = xi_pre[sl]
        v = prev_value(pre) + increment
        spline = CubicSpline(xi_img[sl], v, bc_type="not-a-knot")
        splines.append(spline)
        vals[sl] = v
        knots.append(float(xi_img[sl][-1]))
        prev_value = spline

    curve = PiecewiseCurve(
        segment0=segment0,
        knots=np.array(knots),
        splines=splines,
        xi_min=-_seed_halfwidth(segment0, grid),
        xi_max=float(knots[-1]),
    )
    if not split_regions:
        merged = CubicSpline(xi_img, vals, bc_type="not-a-knot")
        curve = PiecewiseCurve(
            segment0=segment0,
            knots=np.array([knots[0], float(xi_img[-1])]),
            splines=[merged],
            xi_min=curve.xi_min,
            xi_max=curve.xi_max,
        )
    return curve


def _seed_halfwidth(segment0, grid: TimeGrid) -> float:
    L0 = getattr(segment0, "L0", None)
    if L0 is not None:
        return float(L0)
    return float(grid.xi_hat[0])


class PiecewiseTransform(Transform):
    """Extended transform: seed polynomial plus per-region splines."""

    def __init__(self, curve: PiecewiseCurve, grid: TimeGrid):
        self.curve = curve
        self.grid = grid

    @property
    def xi_min(self) -> float:
        return self.curve.xi_min

    @property
    def xi_max(self) -> float:
        return self.curve.xi_max

    @property
    def knots(self) -> np.ndarray:
        return self.curve.knots

    def value(self, xi):
        return self.curve.value(xi)

    def derivative(self, xi):
        return self.curve.derivative(xi)


def extend_transform(
    seed,
    motion: BoundaryMotion,
    grid: TimeGrid,
    split_regions: bool = True,
) -> PiecewiseTransform:
    """Extend a seed polynomial to a transform on [-L0, t_max + L(t_max)]."""
    if abs(seed.L0 - motion.L0) > 1e-9 * max(1.0, motion.L0):
        raise PreconditionError(
            f"seed built for L0={seed.L0} but motion has L(0)={motion.L0}"
        )
    curve = extend_curve(seed, motion, grid, increment=2.0, split_regions=split_regions)
    return PiecewiseTransform(curve, grid)


def build_transform(
    motion: BoundaryMotion,
    t_max: float | None = None,
    rho: float = DEFAULT_RHO,
    seed_degree: int = 3,
) -> PiecewiseTransform:
    """Convenience pipeline: seed, grid, extension."""
    from .seed import build_seed

    seed = build_seed(motion.L0, motion.Ldot0, motion.Lddot0, degree=seed_degree)
    grid = build_time_grid(motion, t_max, rho)
    return extend_transform(seed, motion, grid)
