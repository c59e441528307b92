"""Boundary-motion families L(t) and the inverse recovery of L from a transform.

A motion is the distance L(t) between the fixed wall at x = 0 and the
moving wall, with the wave speed normalised to 1, so physical motions
satisfy L(t) > 0 and |dL/dt| < 1 on the whole window [0, t_max].

Built-in families:

* ``linear``:        L(t) = L0 + v t
* ``exponential``:   L(t) = exp(-k t)
* ``sinh_inverse``:  L(t) = asinh(sech(k (t - xi0)) / A) / k, the motion whose
  exact conformal transform is A sinh(k (xi - xi0))
* ``custom``:        user callbacks (derivative optional, else finite
  differences)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    InvalidMotionError,
    NonTerminationError,
    PreconditionError,
    SingularityError,
)
from .numutil import golden_refine_batch, rk4_path

# Sampling density of validate_motion: ten times the default grid resolution.
_VALIDATION_SAMPLES = 10_000
_SPEED_LIMIT = 1.0 - 1e-9


@dataclass(frozen=True)
class BoundaryMotion:
    """Immutable boundary motion; all evaluations are pure and thread-safe."""

    kind: str
    params: dict
    t_max: float
    _length: Callable = field(repr=False)
    _speed: Callable | None = field(repr=False, default=None)
    _accel: Callable | None = field(repr=False, default=None)

    # -- construction ------------------------------------------------------

    @staticmethod
    def linear(L0: float, v: float, t_max: float) -> "BoundaryMotion":
        L0, v = float(L0), float(v)
        return BoundaryMotion(
            kind="linear",
            params={"L0": L0, "v": v},
            t_max=float(t_max),
            _length=lambda t: L0 + v * np.asarray(t, dtype=float),
            _speed=lambda t: np.full_like(np.asarray(t, dtype=float), v),
            _accel=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        )

    @staticmethod
    def exponential(k: float, t_max: float) -> "BoundaryMotion":
        k = float(k)
        return BoundaryMotion(
            kind="exponential",
            params={"k": k},
            t_max=float(t_max),
            _length=lambda t: np.exp(-k * np.asarray(t, dtype=float)),
            _speed=lambda t: -k * np.exp(-k * np.asarray(t, dtype=float)),
            _accel=lambda t: k * k * np.exp(-k * np.asarray(t, dtype=float)),
        )

    @staticmethod
    def sinh_inverse(A: float, k: float, xi0: float, t_max: float) -> "BoundaryMotion":
        A, k, xi0 = float(A), float(k), float(xi0)

        def length(t):
            th = k * (np.asarray(t, dtype=float) - xi0)
            return np.arcsinh(1.0 / (A * np.cosh(th))) / k

        def speed(t):
            th = k * (np.asarray(t, dtype=float) - xi0)
            z = 1.0 / (A * np.cosh(th))
            return -z * np.tanh(th) / np.sqrt(1.0 + z * z)

        def accel(t):
            th = k * (np.asarray(t, dtype=float) - xi0)
            z = 1.0 / (A * np.cosh(th))
            w2 = 1.0 + z * z
            sech2 = 1.0 / np.cosh(th) ** 2
            tanh2 = np.tanh(th) ** 2
            return -k * z * ((sech2 - tanh2) + z * z * tanh2 / w2) / np.sqrt(w2)

        return BoundaryMotion(
            kind="sinh_inverse",
            params={"A": A, "k": k, "xi0": xi0},
            t_max=float(t_max),
            _length=length,
            _speed=speed,
            _accel=accel,
        )

    @staticmethod
    def custom(
        length: Callable,
        t_max: float,
        speed: Callable | None = None,
        accel: Callable | None = None,
        name: str = "custom",
    ) -> "BoundaryMotion":
        return BoundaryMotion(
            kind=name,
            params={},
            t_max=float(t_max),
            _length=lambda t: np.asarray(length(np.asarray(t, dtype=float)), dtype=float),
            _speed=None if speed is None else (
                lambda t: np.asarray(speed(np.asarray(t, dtype=float)), dtype=float)
            ),
            _accel=None if accel is None else (
                lambda t: np.asarray(accel(np.asarray(t, dtype=float)), dtype=float)
            ),
        )

    # -- evaluation --------------------------------------------------------

    def _check_window(self, t) -> None:
        t = np.asarray(t, dtype=float)
        tol = 1e-12 * max(1.0, self.t_max)
        if t.size and (np.min(t) < -tol or np.max(t) > self.t_max + tol):
            bad = float(np.min(t)) if np.min(t) < -tol else float(np.max(t))
            raise DomainError(
                f"t={bad!r} outside motion window [0, {self.t_max}]"
            )

    def length(self, t):
        """L(t); raises DomainError outside [0, t_max]."""
        self._check_window(t)
        out = self._length(t)
        return out if np.ndim(t) else float(out)

    def speed(self, t):
        """dL/dt; finite differences when no derivative callback exists."""
        self._check_window(t)
        if self._speed is not None:
            out = self._speed(t)
            return out if np.ndim(t) else float(out)
        out = self._fd_speed(np.atleast_1d(np.asarray(t, dtype=float)))
        return out if np.ndim(t) else float(out[0])

    def accel(self, t):
        """Second derivative of L; finite differences as a fallback."""
        self._check_window(t)
        if self._accel is not None:
            out = self._accel(t)
            return out if np.ndim(t) else float(out)
        out = self._fd_accel(np.atleast_1d(np.asarray(t, dtype=float)))
        return out if np.ndim(t) else float(out[0])

    def _fd_speed(self, t: np.ndarray) -> np.ndarray:
        h = max(1e-6, 1e-8 * self.t_max)
        # second-order stencils, shifted to one-sided near the window edges so
        # the length callback is never evaluated outside [0, t_max]
        out = np.empty_like(t)
        left = t < h
        right = t > self.t_max - h
        mid = ~(left | right)
        if np.any(mid):
            tm = t[mid]
            out[mid] = (self._length(tm + h) - self._length(tm - h)) / (2.0 * h)
        if np.any(left):
            tl = t[left]
            out[left] = (
                -3.0 * self._length(tl) + 4.0 * self._length(tl + h) - self._length(tl + 2 * h)
            ) / (2.0 * h)
        if np.any(right):
            tr = t[right]
            out[right] = (
                3.0 * self._length(tr) - 4.0 * self._length(tr - h) + self._length(tr - 2 * h)
            ) / (2.0 * h)
        return out

    def _fd_accel(self, t: np.ndarray) -> np.ndarray:
        h = max(1e-5, 1e-7 * self.t_max)
        t0 = np.clip(t, h, self.t_max - h)
        return (self._length(t0 + h) - 2.0 * self._length(t0) + self._length(t0 - h)) / (h * h)

    # -- shortcuts used all over the solver --------------------------------

    @property
    def L0(self) -> float:
        return float(self._length(0.0))

    @property
    def Ldot0(self) -> float:
        return float(self.speed(0.0))

    @property
    def Lddot0(self) -> float:
        return float(self.accel(0.0))

    def config(self) -> dict:
        return {"motion": {"type": self.kind, **self.params}, "t_max": self.t_max}


def motion_from_config(cfg: dict) -> BoundaryMotion:
    """Build a motion from a config record.

    Expected shape: ``{"motion": {"type": "linear"|"exponential"|"sinh_inverse",
    <params>...}, "t_max": <number>}``.
    """
    try:
        spec = dict(cfg["motion"])
        t_max = float(cfg["t_max"])
        kind = spec.pop("type")
    except (KeyError, TypeError, ValueError) as exc:
        raise PreconditionError(f"malformed motion config: {exc}") from exc
    if kind == "linear":
        return BoundaryMotion.linear(spec["L0"], spec["v"], t_max)
    if kind == "exponential":
        return BoundaryMotion.exponential(spec["k"], t_max)
    if kind == "sinh_inverse":
        return BoundaryMotion.sinh_inverse(spec["A"], spec["k"], spec["xi0"], t_max)
    raise PreconditionError(f"unknown motion type {kind!r}")


@dataclass(frozen=True)
class MotionReport:
    """Result of validate_motion on an accepted motion."""

    max_speed: float
    t_at_max_speed: float
    min_length: float
    t_at_min_length: float
    n_samples: int


def validate_motion(motion: BoundaryMotion, n_samples: int = _VALIDATION_SAMPLES) -> MotionReport:
    """Sample |dL/dt| and L over the window and reject unphysical motions.

    The coarse scan is refined locally (golden section) around the sampled
    extrema before the thresholds are applied.  Raises InvalidMotionError
    (with the offending time) if max |dL/dt| >= 1 - 1e-9 or min L <= 0.
    """
    ts = np.linspace(0.0, motion.t_max, n_samples)
    speeds = np.abs(motion.speed(ts))
    lengths = motion.length(ts)

    i = int(np.argmax(speeds))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, n_samples - 1)]
    smax = float(
        golden_refine_batch(lambda t: np.abs(motion.speed(t)), [lo], [hi], maximize=True)[0]
    )
    smax = max(smax, float(speeds[i]))
    t_smax = float(ts[i])

    j = int(np.argmin(lengths))
    lo, hi = ts[max(j - 1, 0)], ts[min(j + 1, n_samples - 1)]
    lmin = float(golden_refine_batch(motion.length, [lo], [hi], maximize=False)[0])
    lmin = min(lmin, float(lengths[j]))
    t_lmin = float(ts[j])

    if smax >= _SPEED_LIMIT:
        raise InvalidMotionError(
            f"boundary speed |dL/dt| = {smax:.6g} >= 1 near t = {t_smax:.6g}",
            t_offending=t_smax,
        )
    if lmin <= 0.0:
        raise InvalidMotionError(
            f"length L = {lmin:.6g} <= 0 near t = {t_lmin:.6g}", t_offending=t_lmin
        )

    # A supplied derivative callback must be consistent with the length values.
    if motion._speed is not None and motion.kind not in ("linear", "exponential", "sinh_inverse"):
        tchk = np.linspace(0.0, motion.t_max, 1000)
        fd = motion._fd_speed(tchk)
        an = motion._speed(tchk)
        scale = np.maximum(np.abs(an), 1.0)
        worst = int(np.argmax(np.abs(an - fd) / scale))
        if np.abs(an[worst] - fd[worst]) / scale[worst] > 1e-6:
            raise InvalidMotionError(
                "derivative callback disagrees with finite differences of the "
                f"length callback near t = {tchk[worst]:.6g}",
                t_offending=float(tchk[worst]),
            )

    return MotionReport(
        max_speed=smax,
        t_at_max_speed=t_smax,
        min_length=lmin,
        t_at_min_length=t_lmin,
        n_samples=n_samples,
    )


@dataclass(frozen=True)
class RecoveredLength:
    """Dense samples of the length recovered from a transform."""

    times: np.ndarray
    lengths: np.ndarray
    step: float
    refinement_gap: float  # sup-difference between the last two refinements


def recover_length_from_transform(
    transform, L0: float, t_max: float, agreement_tol: float = 1e-10
) -> RecoveredLength:
    """Integrate dL/dt = (R'(t-L) - R'(t+L)) / (R'(t-L) + R'(t+L)).

    ``transform`` must expose ``value`` and ``derivative``.  The initial
    value must satisfy R(L0) - R(-L0) = 2 to 1e-8.  Classical RK4 at fixed
    step t_max/4096, halved until two successive refinements agree to
    ``agreement_tol`` in the sup norm.
    """
    gap = abs(float(transform.value(L0)) - float(transform.value(-L0)) - 2.0)
    if gap > 1e-8:
        raise PreconditionError(
            f"R(L0) - R(-L0) - 2 = {gap:.3e}: transform/length pair inconsistent"
        )

    def rhs(t: float, L: float) -> float:
        dm = float(transform.derivative(t - L))
        dp = float(transform.derivative(t + L))
        den = dm + dp
        if abs(den) < 1e-14:
            raise SingularityError(f"R'(t-L) + R'(t+L) vanished at t = {t:.6g}")
        return (dm - dp) / den

    n = 4096
    ts, ys = rk4_path(rhs, float(L0), 0.0, float(t_max), n)
    for _ in range(8):
        ts2, ys2 = rk4_path(rhs, float(L0), 0.0, float(t_max), 2 * n)
        diff = float(np.max(np.abs(ys2[::2] - ys)))
        ts, ys, n = ts2, ys2, 2 * n
        if diff <= agreement_tol:
            return RecoveredLength(times=ts, lengths=ys, step=t_max / n, refinement_gap=diff)
    raise NonTerminationError(
        f"inverse-method refinements did not settle below {agreement_tol:g}"
    )
