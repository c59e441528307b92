"""Seed polynomial: the freely chosen part of the transform on [-L0, L0].

The functional equation R(t + L(t)) - R(t - L(t)) = 2 determines the
transform everywhere once it is fixed on the initial interval.  We pin the
endpoints to R(-L0) = 0 and R(L0) = 2 and enforce the junction relations
obtained by differentiating the functional equation at t = 0:

    first derivative:   R'(L0) (1 + L'(0)) = R'(-L0) (1 - L'(0))
    second derivative:  R''(L0) (1 + L'(0))^2 - R''(-L0) (1 - L'(0))^2
                        + L''(0) (R'(L0) + R'(-L0)) = 0

Degree 2 yields the closed-form quadratic (the first-derivative relation is
then automatic); degree 3 additionally enforces the second relation, which
makes the extended transform twice continuously differentiable across
region boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, DomainError


@dataclass(frozen=True)
class SeedPolynomial:
    """Polynomial in u = xi + L0 on [-L0, L0]; immutable and thread-safe."""

    coeffs: tuple  # (a0, a1, a2, a3), highest coefficients may be zero
    L0: float
    Ldot0: float
    degree: int

    def _check(self, xi) -> None:
        xi = np.asarray(xi, dtype=float)
        tol = 1e-9 * max(1.0, self.L0)
        if xi.size and (np.min(xi) < -self.L0 - tol or np.max(xi) > self.L0 + tol):
            raise DomainError(
                f"xi outside seed interval [{-self.L0}, {self.L0}]"
            )

    def value(self, xi):
        self._check(xi)
        u = np.asarray(xi, dtype=float) + self.L0
        a0, a1, a2, a3 = self.coeffs
        out = ((a3 * u + a2) * u + a1) * u + a0
        return out if np.ndim(xi) else float(out)

    def derivative(self, xi):
        self._check(xi)
        u = np.asarray(xi, dtype=float) + self.L0
        _, a1, a2, a3 = self.coeffs
        out = (3.0 * a3 * u + 2.0 * a2) * u + a1
        return out if np.ndim(xi) else float(out)

    def second_derivative(self, xi):
        self._check(xi)
        u = np.asarray(xi, dtype=float) + self.L0
        out = 6.0 * self.coeffs[3] * u + 2.0 * self.coeffs[2]
        return out if np.ndim(xi) else float(out)


def build_seed(
    L0: float, Ldot0: float, Lddot0: float = 0.0, degree: int = 3
) -> SeedPolynomial:
    """Construct the seed polynomial of the requested degree.

    Degree 2 is the closed-form quadratic

        R(xi) = (1 + Ldot0)/L0 * (xi + L0) - Ldot0/(2 L0^2) * (xi + L0)^2;

    degree 3 solves the 4x4 linear system of both junction relations plus
    the endpoint values.  Raises ConstructionError (with the stationary
    point) if the result is not strictly increasing on [-L0, L0].
    """
    L0 = float(L0)
    lam = float(Ldot0)
    if L0 <= 0.0:
        raise ConstructionError(f"L0 = {L0} must be positive")
    if abs(lam) >= 1.0:
        raise ConstructionError(f"|Ldot0| = {abs(lam)} must be < 1")
    if degree == 2:
        coeffs = (0.0, (1.0 + lam) / L0, -lam / (2.0 * L0 * L0), 0.0)
    elif degree == 3:
        mu = float(Lddot0)
        # unknowns (a0, a1, a2, a3); rows: R(-L0)=0, R(L0)=2, junction 1 & 2
        A = np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 2.0 * L0, 4.0 * L0**2, 8.0 * L0**3],
                [0.0, 2.0 * lam, 4.0 * L0 * (1.0 + lam), 12.0 * L0**2 * (1.0 + lam)],
                [
                    0.0,
                    2.0 * mu,
                    8.0 * lam + 4.0 * L0 * mu,
                    12.0 * L0 * (1.0 + lam) ** 2 + 12.0 * L0**2 * mu,
                ],
            ]
        )
        b = np.array([0.0, 2.0, 0.0, 0.0])
        try:
            coeffs = tuple(np.linalg.solve(A, b))
        except np.linalg.LinAlgError as exc:
            # e.g. Lddot0 = -3/L0 at Ldot0 = 0: the junction system degenerates
            raise ConstructionError(
                f"cubic junction system is singular for L0={L0}, Ldot0={lam}, "
                f"Lddot0={mu}: no cubic seed satisfies all constraints"
            ) from exc
    else:
        raise ConstructionError(f"seed degree must be 2 or 3, got {degree}")

    seed = SeedPolynomial(coeffs=coeffs, L0=L0, Ldot0=lam, degree=degree)
    _reject_if_not_monotone(seed)
    return seed


def _reject_if_not_monotone(seed: SeedPolynomial) -> None:
    # R'(u) = a1 + 2 a2 u + 3 a3 u^2 is a parabola: its minimum over
    # [0, 2 L0] sits at an endpoint or at the vertex u = -a2 / (3 a3)
    _, a1, a2, a3 = seed.coeffs
    candidates = [0.0, 2.0 * seed.L0]
    if a3 != 0.0:
        vertex = -a2 / (3.0 * a3)
        if 0.0 < vertex < 2.0 * seed.L0:
            candidates.append(float(vertex))
    for u in candidates:
        d = (3.0 * a3 * u + 2.0 * a2) * u + a1
        if d <= 0.0:
            raise ConstructionError(
                f"seed polynomial not strictly increasing: R' = {d:.3e} at "
                f"xi = {u - seed.L0:.6g}",
                stationary_point=u - seed.L0,
            )
