"""Small shared numerical helpers (quadrature panels, bisection, RK4).

Everything here is deterministic: fixed node layouts, fixed iteration
counts where possible, no randomness.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import NonTerminationError


@lru_cache(maxsize=32)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_nodes(a: float, b: float, n_panels: int, order: int = 15):
    """Gauss-Legendre nodes/weights for ``n_panels`` equal panels on [a, b].

    Returns flat arrays of length ``n_panels * order``.
    """
    x, w = _leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def cumulative_integral(g, xs: np.ndarray, order: int = 7) -> np.ndarray:
    """Cumulative antiderivative of ``g`` along the sorted grid ``xs``.

    Returns C with C[i] = integral of g from xs[0] to xs[i]; each
    sub-interval is handled by one Gauss-Legendre panel of the given order.
    """
    xs = np.asarray(xs, dtype=float)
    x, w = _leggauss(order)
    mid = 0.5 * (xs[:-1] + xs[1:])
    half = 0.5 * (xs[1:] - xs[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(g(nodes.ravel()), dtype=float).reshape(nodes.shape)
    pieces = half * (vals @ w)
    out = np.empty_like(xs)
    out[0] = 0.0
    np.cumsum(pieces, out=out[1:])
    return out


def integrate_panel(g, a, b, order: int = 7):
    """One Gauss-Legendre panel of ``g`` over [a, b]; a, b may be arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x, w = _leggauss(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = mid[..., None] + half[..., None] * x
    vals = np.asarray(g(nodes.ravel()), dtype=float).reshape(nodes.shape)
    return half * (vals @ w)


def bisect_monotone_batch(fn, lo, hi, xtol: float = 1e-13, max_iter: int = 200):
    """Roots of an increasing function for a whole batch of brackets.

    ``fn`` maps an array of t values to an array of residuals; fn(lo) <= 0
    and fn(hi) >= 0 elementwise is required.  Plain bisection: robust and
    vectorises cleanly.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(max_iter):
        if np.max(hi - lo) <= xtol:
            break
        mid = 0.5 * (lo + hi)
        up = fn(mid) > 0.0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    else:
        raise NonTerminationError("batch bisection failed to reach xtol")
    return 0.5 * (lo + hi)


def golden_refine_batch(fn, lo, hi, maximize: bool, iters: int = 60):
    """Golden-section refinement of extrema inside the brackets [lo, hi].

    Vectorised over brackets; returns the refined extreme values of ``fn``.
    """
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    sign = 1.0 if maximize else -1.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc = sign * np.asarray(fn(c), dtype=float)
    fd = sign * np.asarray(fn(d), dtype=float)
    for _ in range(iters):
        pick_c = fc > fd
        hi = np.where(pick_c, d, hi)
        lo = np.where(pick_c, lo, c)
        c = hi - invphi * (hi - lo)
        d = lo + invphi * (hi - lo)
        fc = sign * np.asarray(fn(c), dtype=float)
        fd = sign * np.asarray(fn(d), dtype=float)
    best = np.maximum(fc, fd)
    return sign * best


def rk4_path(f, y0: float, t0: float, t1: float, n_steps: int):
    """Classical fixed-step RK4 for a scalar ODE y' = f(t, y).

    Returns (t_array, y_array) including both endpoints.
    """
    ts = np.linspace(t0, t1, n_steps + 1)
    h = (t1 - t0) / n_steps
    ys = np.empty(n_steps + 1)
    ys[0] = y0
    y = y0
    for i in range(n_steps):
        t = ts[i]
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[i + 1] = y
    return ts, ys
