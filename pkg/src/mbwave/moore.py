"""Moore's perturbation series for the transform (Moore 1970).

For slowly moving boundaries the transform R can be expanded in a series
R(xi) = sum_l alpha_l(xi) whose coefficients obey a derivative recursion.
Two families admit closed-form coefficients:

* linear, L(t) = L0 + v t:
      c_0 = 1,  c_l = -sum_{i=1..l} c_{l-i} / (2i + 1)
      alpha_l(xi) = ln(1 + v xi / L0) * c_l * v^(2l - 1)
  The series converges for |v| < 1 (sum c_l x^(2l) is the Taylor series of
  2x / ln((1+x)/(1-x))).

* exponential, L(t) = exp(-k t), 0 < k < 1:
      c_0 = 1,  c_l = -sum_{i=1..l} (2l - 2i - 1)^(2i) / (2i+1)! * c_{l-i}
      alpha_0(xi) = (e^(k xi) - 1) / k
      alpha_l(xi) = (-1)^(l-1) (2l-1)^(2l-2) k^(2l-1) ctilde_l
                    * (e^((1-2l) k xi) - 1)
  where c_l = (-1)^l (2l-1)^(2l-1) ctilde_l for l >= 1.  Here |c_l| grows
  like (a l)^(2l), so the series is divergent (asymptotic): truncation at a
  finite optimal order gives the smallest achievable residual.

The scaled ctilde recursion keeps every intermediate O(1); coefficients are
also carried as (sign, log|c|) pairs since (2l-1)^(2l-1) overflows doubles
near l = 75.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryMotion
from .errors import DomainError, UnsupportedScenarioError
from .transform import Transform

_LN_OVERFLOW = 700.0  # exp() argument beyond which a double overflows


def linear_coefficients(n: int) -> np.ndarray:
    """Coefficients c_0..c_n of the linear-motion series."""
    if n < 0:
        raise ValueError("n must be >= 0")
    c = np.empty(n + 1)
    c[0] = 1.0
    for l in range(1, n + 1):
        c[l] = -sum(c[l - i] / (2 * i + 1) for i in range(1, l + 1))
    return c


def exponential_coefficients(n: int):
    """Scaled and raw coefficients of the exponential-motion series.

    Returns ``(c_tilde, c, c_sign, c_log_abs)`` for l = 0..n.  The raw
    values ``c`` are +-inf once (2l-1)^(2l-1) leaves double range; the
    (sign, log) pair stays exact for all l.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    ct = np.empty(n + 1)
    ct[0] = 1.0
    for l in range(1, n + 1):
        acc = 0.0
        for i in range(1, l):
            acc += (
                ((2 * l - 2 * i - 1) / (2 * l - 1)) ** (2 * l - 1)
                * ((-1) ** (i + 1) / math.factorial(2 * i + 1))
                * ct[l - i]
            )
        # i = l boundary term, computed in logs (it underflows quickly and
        # its closed form would overflow the power otherwise)
        ln_bnd = -math.lgamma(2 * l + 2) - (2 * l - 1) * math.log(2 * l - 1)
        if ln_bnd > -_LN_OVERFLOW:
            acc += (-1) ** (l + 1) * math.exp(ln_bnd)
        ct[l] = acc

    ls = np.arange(n + 1)
    c_sign = np.where(ls % 2 == 0, 1, -1) * np.sign(ct)
    c_sign[0] = 1
    with np.errstate(divide="ignore"):
        c_log_abs = np.where(
            ct == 0.0,
            -np.inf,
            (2.0 * ls - 1.0) * np.log(np.maximum(2.0 * ls - 1.0, 1.0))
            + np.log(np.abs(np.where(ct == 0.0, 1.0, ct))),
        )
    c_log_abs[0] = 0.0
    with np.errstate(over="ignore"):
        c = c_sign * np.exp(c_log_abs)
    c[0] = 1.0
    return ct, c, c_sign.astype(np.int8), c_log_abs


def exponential_coefficients_direct(n: int) -> np.ndarray:
    """Raw recursion for c_l, usable only while doubles hold the values.

    Kept as an independent cross-check of the scaled recursion.
    """
    c = np.empty(n + 1)
    c[0] = 1.0
    for l in range(1, n + 1):
        c[l] = -sum(
            (2 * l - 2 * i - 1) ** (2 * i) / math.factorial(2 * i + 1) * c[l - i]
            for i in range(1, l + 1)
        )
    return c


@dataclass(frozen=True)
class MooreSeries:
    """Coefficient table of one family, computed once and immutable."""

    family: str  # "linear" | "exponential"
    params: dict
    n_terms: int
    c: np.ndarray
    c_sign: np.ndarray
    c_log_abs: np.ndarray
    c_tilde: np.ndarray | None = None


def linear_series(L0: float, v: float, n_terms: int) -> MooreSeries:
    c = linear_coefficients(n_terms)
    with np.errstate(divide="ignore"):
        log_abs = np.where(c == 0.0, -np.inf, np.log(np.abs(np.where(c == 0.0, 1.0, c))))
    return MooreSeries(
        family="linear",
        params={"L0": float(L0), "v": float(v)},
        n_terms=n_terms,
        c=c,
        c_sign=np.sign(c).astype(np.int8),
        c_log_abs=log_abs,
    )


def exponential_series(k: float, n_terms: int) -> MooreSeries:
    ct, c, sign, log_abs = exponential_coefficients(n_terms)
    return MooreSeries(
        family="exponential",
        params={"k": float(k)},
        n_terms=n_terms,
        c=c,
        c_sign=sign,
        c_log_abs=log_abs,
        c_tilde=ct,
    )


def series_for_motion(motion: BoundaryMotion, n_terms: int) -> MooreSeries:
    if motion.kind == "linear":
        return linear_series(motion.params["L0"], motion.params["v"], n_terms)
    if motion.kind == "exponential":
        return exponential_series(motion.params["k"], n_terms)
    raise UnsupportedScenarioError(
        "perturbation coefficients exist in closed form only for the linear "
        f"and exponential families, not {motion.kind!r}"
    )


def _terms_linear(series: MooreSeries, n: int, xi: np.ndarray) -> np.ndarray:
    L0, v = series.params["L0"], series.params["v"]
    if v == 0.0:
        out = np.zeros((n + 1,) + xi.shape)
        out[0] = xi / L0
        return out
    arg = 1.0 + v * xi / L0
    if np.any(arg <= 0.0):
        raise DomainError("log argument 1 + v xi / L0 <= 0 in truncated series")
    base = np.log(arg)
    ls = np.arange(n + 1, dtype=float)
    fac = series.c[: n + 1] * v ** (2.0 * ls - 1.0)
    return fac[:, None] * base[None, :] if xi.ndim else fac * base


def _terms_exponential(series: MooreSeries, n: int, xi: np.ndarray) -> np.ndarray:
    k = series.params["k"]
    ct = series.c_tilde
    out = np.empty((n + 1,) + xi.shape)
    out[0] = np.expm1(k * xi) / k
    for l in range(1, n + 1):
        e = np.expm1((1.0 - 2.0 * l) * k * xi)
        # ln((2l-1)^(2l-2) k^(2l-1) |ctilde_l|); assembled in logs because the
        # power factor overflows doubles near l = 75
        ln_fac = (
            (2 * l - 2) * math.log(2 * l - 1)
            + (2 * l - 1) * math.log(k)
            + math.log(abs(ct[l]))
        )
        sgn = (-1) ** (l - 1) * (1 if ct[l] >= 0 else -1)
        if ln_fac > _LN_OVERFLOW:
            out[l] = np.inf * sgn * np.sign(e)
        else:
            out[l] = sgn * math.exp(ln_fac) * e
    return out


def term_values(series: MooreSeries, n: int, xi) -> np.ndarray:
    """alpha_0(xi) .. alpha_n(xi); first axis is the term index."""
    if n > series.n_terms:
        raise ValueError(f"series holds {series.n_terms} terms, asked for {n}")
    x = np.asarray(xi, dtype=float)
    if series.family == "linear":
        return _terms_linear(series, n, x)
    return _terms_exponential(series, n, x)


def moore_truncated_r(series: MooreSeries, n: int, xi):
    """Partial sum R_n(xi) of the first n + 1 series terms."""
    terms = term_values(series, n, xi)
    out = terms.sum(axis=0)
    return out if np.ndim(xi) else float(out)


def term_magnitudes(series: MooreSeries, xi: float, n: int | None = None) -> np.ndarray:
    """|alpha_l(xi)| for l = 0..n, the divergence diagnostic of the family."""
    n = series.n_terms if n is None else n
    return np.abs(term_values(series, n, float(xi)))


def divergence_onset(magnitudes: np.ndarray, run: int = 3) -> int | None:
    """First l after which |alpha| increases ``run`` times in a row."""
    inc = np.diff(magnitudes) > 0.0
    for l in range(len(inc) - run + 1):
        if inc[l : l + run].all():
            return l
    return None


@dataclass(frozen=True)
class MooreTransform(Transform):
    """Truncated perturbation series R_n as an evaluable transform."""

    series: MooreSeries
    n: int

    @property
    def xi_min(self) -> float:
        if self.series.family == "linear":
            L0, v = self.series.params["L0"], self.series.params["v"]
            if v > 0.0:
                return -L0 / v
        return -np.inf

    @property
    def xi_max(self) -> float:
        if self.series.family == "linear":
            L0, v = self.series.params["L0"], self.series.params["v"]
            if v < 0.0:
                return -L0 / v
        return np.inf

    def value(self, xi):
        self._check(xi)
        return moore_truncated_r(self.series, self.n, xi)

    def derivative(self, xi):
        self._check(xi)
        x = np.asarray(xi, dtype=float)
        if self.series.family == "linear":
            L0, v = self.series.params["L0"], self.series.params["v"]
            ls = np.arange(self.n + 1, dtype=float)
            amp = float(np.sum(self.series.c[: self.n + 1] * v ** (2.0 * ls)))
            out = amp / (L0 + v * x)
        else:
            k = self.series.params["k"]
            out = np.zeros_like(x)
            for l in range(self.n + 1):
                c_l = float(self.series.c[l])
                out += c_l * k ** (2 * l) * np.exp((1.0 - 2.0 * l) * k * x)
        return out if np.ndim(xi) else float(out)


@dataclass(frozen=True)
class TruncationScan:
    """Result of scanning the truncation order against the residual."""

    n_opt: int
    rms_residual: float
    residuals: np.ndarray  # rms residual for n = 0..n_scan
    term_magnitudes: np.ndarray  # |alpha_l(xi_probe)|
    onset: int | None  # divergence onset at the probe point
    escalated: bool  # True when the scan needed extended precision


def optimal_truncation(
    series: MooreSeries,
    motion: BoundaryMotion,
    xi_probe: float,
    t_max: float | None = None,
    n_scan: int = 40,
    n_times: int = 2048,
) -> TruncationScan:
    """Truncation order minimising the rms boundary residual on [0, t_max].

    Ties break toward smaller n.  If the double-precision minimum sits below
    1e-13 the scan is repeated in 50-digit arithmetic (on a 128-point grid)
    so that rounding noise cannot scramble the argmin; this happens for very
    slow motions whose true optimum lies far below double rounding.
    """
    n_scan = min(n_scan, series.n_terms)
    t_max = motion.t_max if t_max is None else float(t_max)
    ts = np.linspace(0.0, t_max, n_times)
    L = motion.length(ts)
    terms_plus = term_values(series, n_scan, ts + L)
    terms_minus = term_values(series, n_scan, ts - L)
    partial = np.cumsum(terms_plus - terms_minus, axis=0) - 2.0
    residuals = np.sqrt(np.mean(partial * partial, axis=1))

    escalated = False
    if series.family == "exponential" and float(residuals.min()) < 1e-13:
        residuals = _scan_extended(series, motion, t_max, n_scan, n_times=128)
        escalated = True

    n_opt = int(np.argmin(residuals))  # argmin returns the first (smallest n) tie
    mags = term_magnitudes(series, float(xi_probe), n_scan)
    return TruncationScan(
        n_opt=n_opt,
        rms_residual=float(residuals[n_opt]),
        residuals=residuals,
        term_magnitudes=mags,
        onset=divergence_onset(mags),
        escalated=escalated,
    )


def _scan_extended(
    series: MooreSeries, motion: BoundaryMotion, t_max: float, n_scan: int, n_times: int
) -> np.ndarray:
    import mpmath as mp

    if series.family != "exponential":
        raise UnsupportedScenarioError("extended-precision scan only needed for the exponential family")
    k = series.params["k"]
    with mp.workdps(50):
        ct = [mp.mpf(1)]
        for l in range(1, n_scan + 1):
            acc = mp.mpf(0)
            for i in range(1, l):
                acc += (
                    (mp.mpf(2 * l - 2 * i - 1) / (2 * l - 1)) ** (2 * l - 1)
                    * (-1) ** (i + 1)
                    / mp.factorial(2 * i + 1)
                    * ct[l - i]
                )
            acc += mp.mpf((-1) ** (l + 1)) / (mp.factorial(2 * l + 1) * mp.mpf(2 * l - 1) ** (2 * l - 1))
            ct.append(acc)

        def terms(xi):
            out = [(mp.e ** (k * xi) - 1) / k]
            for l in range(1, n_scan + 1):
                out.append(
                    (-1) ** (l - 1)
                    * mp.mpf(2 * l - 1) ** (2 * l - 2)
                    * mp.mpf(k) ** (2 * l - 1)
                    * ct[l]
                    * (mp.e ** ((1 - 2 * l) * k * xi) - 1)
                )
            return out

        sums = [mp.mpf(0)] * (n_scan + 1)
        for i in range(n_times):
            t = mp.mpf(t_max) * i / (n_times - 1)
            L = mp.e ** (-k * t)
            tp, tm = terms(t + L), terms(t - L)
            acc = mp.mpf(0)
            for n in range(n_scan + 1):
                acc += tp[n] - tm[n]
                r = acc - 2
                sums[n] += r * r
        return np.array([float(mp.sqrt(s / n_times)) for s in sums])
