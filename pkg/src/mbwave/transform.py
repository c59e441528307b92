"""Evaluable transforms and the boundary-condition residual.

A transform is a strictly increasing function R on an interval of the
characteristic coordinate xi = t +- x.  Together with a boundary motion it
must satisfy the functional equation R(t + L(t)) - R(t - L(t)) = 2; the
residual of that equation is the error indicator eps_BC_R.

Closed forms implemented here (matched to their motions):

* ``ExactLinearTransform``  for L(t) = L0 + v t:
      R(xi) = 2 ln|1 + v xi / L0| / ln((1+v)/(1-v)),  xi != -L0/v
  (the v -> 0 limit R(xi) = xi / L0 is taken below |v| = 1e-12).
* ``ExactSinhTransform``    for L(t) = asinh(sech(k (t - xi0))/A)/k:
      R(xi) = A sinh(k (xi - xi0)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryMotion
from .errors import DomainError, SingularityError, UnsupportedScenarioError

_V_EPS = 1e-12  # below this the linear closed form switches to xi / L0


class Transform:
    """Interface: value(xi), derivative(xi) on [xi_min, xi_max]."""

    xi_min: float = -np.inf
    xi_max: float = np.inf

    def value(self, xi):
        raise NotImplementedError

    def derivative(self, xi):
        raise NotImplementedError

    def _check(self, xi) -> None:
        xi = np.asarray(xi, dtype=float)
        if xi.size == 0:
            return
        tol = 1e-9
        if np.min(xi) < self.xi_min - tol or np.max(xi) > self.xi_max + tol:
            raise DomainError(
                f"xi outside transform interval [{self.xi_min}, {self.xi_max}]"
            )


@dataclass(frozen=True)
class ExactLinearTransform(Transform):
    L0: float
    v: float

    @property
    def xi_min(self) -> float:
        if abs(self.v) < _V_EPS:
            return -np.inf
        return -self.L0 / self.v if self.v > 0 else -np.inf

    @property
    def xi_max(self) -> float:
        if abs(self.v) < _V_EPS or self.v > 0:
            return np.inf
        return -self.L0 / self.v

    def value(self, xi):
        self._check(xi)
        x = np.asarray(xi, dtype=float)
        if abs(self.v) < _V_EPS:
            out = x / self.L0
            return out if np.ndim(xi) else float(out)
        arg = 1.0 + self.v * x / self.L0
        if np.any(np.abs(arg) < 1e-14):
            raise SingularityError(f"R has a pole at xi = {-self.L0 / self.v}")
        out = 2.0 * np.log(np.abs(arg)) / np.log((1.0 + self.v) / (1.0 - self.v))
        return out if np.ndim(xi) else float(out)

    def derivative(self, xi):
        self._check(xi)
        x = np.asarray(xi, dtype=float)
        if abs(self.v) < _V_EPS:
            out = np.full_like(x, 1.0 / self.L0)
            return out if np.ndim(xi) else float(out)
        arg = 1.0 + self.v * x / self.L0
        if np.any(np.abs(arg) < 1e-14):
            raise SingularityError(f"R' has a pole at xi = {-self.L0 / self.v}")
        out = 2.0 * (self.v / self.L0) / (np.log((1.0 + self.v) / (1.0 - self.v)) * arg)
        return out if np.ndim(xi) else float(out)


@dataclass(frozen=True)
class ExactSinhTransform(Transform):
    A: float
    k: float
    xi0: float

    def value(self, xi):
        x = np.asarray(xi, dtype=float)
        out = self.A * np.sinh(self.k * (x - self.xi0))
        return out if np.ndim(xi) else float(out)

    def derivative(self, xi):
        x = np.asarray(xi, dtype=float)
        out = self.A * self.k * np.cosh(self.k * (x - self.xi0))
        return out if np.ndim(xi) else float(out)


def exact_transform_for(motion: BoundaryMotion) -> Transform:
    """Closed-form transform matching a built-in motion, if one exists."""
    if motion.kind == "linear":
        return ExactLinearTransform(L0=motion.params["L0"], v=motion.params["v"])
    if motion.kind == "sinh_inverse":
        return ExactSinhTransform(
            A=motion.params["A"], k=motion.params["k"], xi0=motion.params["xi0"]
        )
    raise UnsupportedScenarioError(
        f"no exact transform catalogued for motion kind {motion.kind!r}"
    )


def check_covers(transform: Transform, motion: BoundaryMotion, t_max: float | None = None) -> None:
    """Ensure the transform is defined on [-L(0), t_max + L(t_max)]."""
    t_max = motion.t_max if t_max is None else float(t_max)
    lo, hi = -motion.L0, t_max + float(motion.length(t_max))
    if transform.xi_min > lo + 1e-12 or transform.xi_max < hi - 1e-12:
        raise DomainError(
            f"transform valid on [{transform.xi_min}, {transform.xi_max}] does not "
            f"cover [{lo}, {hi}]"
        )


def residual_bc_r(transform: Transform, motion: BoundaryMotion, t):
    """|R(t + L(t)) - R(t - L(t)) - 2| at one or many times."""
    t = np.asarray(t, dtype=float)
    L = motion.length(t)
    out = np.abs(transform.value(t + L) - transform.value(t - L) - 2.0)
    return out if t.ndim else float(out)


def residual_bc_r_rms(
    transform: Transform, motion: BoundaryMotion, t_max: float | None = None, n_times: int = 2048
) -> float:
    """RMS of the boundary residual over a uniform time grid on [0, t_max]."""
    t_max = motion.t_max if t_max is None else float(t_max)
    ts = np.linspace(0.0, t_max, n_times)
    r = residual_bc_r(transform, motion, ts)
    return float(np.sqrt(np.mean(r * r)))
