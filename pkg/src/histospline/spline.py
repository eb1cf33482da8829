"""Cubic spline machinery: B-spline basis recursion, interpolating-spline
construction under clamped/natural/not-a-knot boundary conditions,
evaluation, and differentiation.

The basis functions follow the standard recursion

    N[i,0](u) = 1 on [tau_i, tau_{i+1}), else 0
    N[i,p](u) = (u - tau_i)/(tau_{i+p} - tau_i) * N[i,p-1](u)
              + (tau_{i+p+1} - u)/(tau_{i+p+1} - tau_{i+1}) * N[i+1,p-1](u)

with the 0/0 := 0 convention for repeated knots, and the degree-0
interval closed on the right at the final knot of the vector so that the
partition of unity extends to the right end of the domain.

Fitted splines are stored per segment in the local power basis
``c0 + c1*s + c2*s**2 + c3*s**3`` with ``s = u - knots[i]``; the
coefficients come from solving the classic second-derivative (moment)
system, which keeps evaluation and differentiation exact and cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError, NumericError, OutOfSupportError

__all__ = [
    "Boundary",
    "CubicSplineModel",
    "as_knot_vector",
    "bspline_basis",
    "bspline_basis_derivative",
    "fit_interpolating_spline",
]


class Boundary(str, Enum):
    """End condition of an interpolating cubic spline."""

    CLAMPED = "clamped"          # zero first derivative at both ends
    NATURAL = "natural"          # zero second derivative at both ends
    NOT_A_KNOT = "not-a-knot"    # first two / last two segments share one cubic

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


def as_knot_vector(tau) -> np.ndarray:
    """Validate and return a knot vector as a read-only float array."""
    arr = np.array(tau, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DataError("knot vector must be 1-d with at least 2 knots")
    if not np.all(np.isfinite(arr)):
        raise DataError("knots must be finite")
    if np.any(np.diff(arr) < 0.0):
        raise DataError("knot vector must be non-decreasing")
    arr.setflags(write=False)
    return arr


def bspline_basis(i: int, p: int, tau, u: float) -> float:
    """Evaluate the basis function ``N[i,p]`` on knots ``tau`` at ``u``.

    Defined for any real ``u``; the function is nonnegative and vanishes
    identically outside its support ``[tau[i], tau[i+p+1]]``.
    """
    tau = as_knot_vector(tau)
    if p < 0:
        raise DataError("spline degree must be nonnegative")
    n = tau.size
    if not 0 <= i <= n - p - 2:
        raise IndexError(f"basis index {i} out of range [0, {n - p - 2}] for degree {p}")
    return _basis(i, p, tau, float(u))


def _basis(i: int, p: int, tau: np.ndarray, u: float) -> float:
    if p == 0:
        if u == tau[-1]:  # close the final interval so the domain end is covered
            return 1.0 if tau[i] < u <= tau[i + 1] else 0.0
        return 1.0 if tau[i] <= u < tau[i + 1] else 0.0
    total = 0.0
    left_den = tau[i + p] - tau[i]
    if left_den > 0.0:
        total += (u - tau[i]) / left_den * _basis(i, p - 1, tau, u)
    right_den = tau[i + p + 1] - tau[i + 1]
    if right_den > 0.0:
        total += (tau[i + p + 1] - u) / right_den * _basis(i + 1, p - 1, tau, u)
    return total


def bspline_basis_derivative(i: int, p: int, tau, u: float) -> float:
    """First derivative of ``N[i,p]`` at ``u``.

    Uses the derivative recursion

        N'[i,p] = p/(tau_{i+p} - tau_i) * N[i,p-1]
                - p/(tau_{i+p+1} - tau_{i+1}) * N[i+1,p-1]

    with zero-denominator terms dropped (the 0/0 convention).
    """
    tau = as_knot_vector(tau)
    if p < 1:
        raise DataError("derivative recursion requires degree >= 1")
    n = tau.size
    if not 0 <= i <= n - p - 2:
        raise IndexError(f"basis index {i} out of range [0, {n - p - 2}] for degree {p}")
    u = float(u)
    total = 0.0
    left_den = tau[i + p] - tau[i]
    if left_den > 0.0:
        total += p / left_den * _basis(i, p - 1, tau, u)
    right_den = tau[i + p + 1] - tau[i + 1]
    if right_den > 0.0:
        total -= p / right_den * _basis(i + 1, p - 1, tau, u)
    return total


@dataclass(frozen=True)
class CubicSplineModel:
    """Piecewise cubic in local power form.

    ``coefficients[i] = (c0, c1, c2, c3)`` describes segment ``i`` as
    ``c0 + c1*s + c2*s**2 + c3*s**3`` with ``s = u - knots[i]``.
    Evaluation outside ``[knots[0], knots[-1]]`` raises
    :class:`OutOfSupportError`; a probability model has no meaning beyond
    its support, so there is no extrapolation.
    """

    knots: np.ndarray
    coefficients: np.ndarray
    boundary: Boundary

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        coeffs = np.asarray(self.coefficients, dtype=float)
        if knots.ndim != 1 or knots.size < 2:
            raise DataError("need at least 2 knots")
        if np.any(np.diff(knots) <= 0.0):
            raise DataError("knots must be strictly increasing")
        if coeffs.shape != (knots.size - 1, 4):
            raise DataError(f"coefficients must have shape ({knots.size - 1}, 4)")
        if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(coeffs))):
            raise DataError("knots and coefficients must be finite")
        knots = knots.copy()
        knots.setflags(write=False)
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def support(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def _local(self, u):
        """Map evaluation points to (segment index, local offset)."""
        arr = np.asarray(u, dtype=float)
        lo, hi = self.knots[0], self.knots[-1]
        if arr.size and (np.min(arr) < lo or np.max(arr) > hi):
            bad = arr.flat[int(np.argmax((arr < lo) | (arr > hi)))]
            raise OutOfSupportError(
                f"evaluation point {bad!r} outside support [{lo!r}, {hi!r}]"
            )
        idx = np.searchsorted(self.knots, arr, side="right") - 1
        idx = np.clip(idx, 0, self.knots.size - 2)
        return idx, arr - self.knots[idx]

    def __call__(self, u):
        """Spline value at ``u`` (scalar or array)."""
        idx, s = self._local(u)
        c0, c1, c2, c3 = self.coefficients[idx].T
        val = c0 + s * (c1 + s * (c2 + s * c3))
        return float(val) if np.ndim(u) == 0 else val

    def derivative(self, u, order: int = 1):
        """Derivative of the spline at ``u``; ``order`` may be 1, 2, or 3."""
        if order not in (1, 2, 3):
            raise DataError("derivative order must be 1, 2, or 3")
        idx, s = self._local(u)
        _, c1, c2, c3 = self.coefficients[idx].T
        if order == 1:
            val = c1 + s * (2.0 * c2 + 3.0 * c3 * s)
        elif order == 2:
            val = 2.0 * c2 + 6.0 * c3 * s
        else:
            val = 6.0 * c3 + 0.0 * s
        return float(val) if np.ndim(u) == 0 else val


def fit_interpolating_spline(x, F, boundary: Boundary | str) -> CubicSplineModel:
    """Fit the cubic spline interpolating ``(x[i], F[i])`` under ``boundary``.

    Parameters
    ----------
    x : array_like
        Strictly increasing abscissae, length ``m >= 2`` (``m >= 4`` for
        not-a-knot, which needs two distinct segments at each end).
    F : array_like
        Ordinates, same length as ``x``.
    boundary : Boundary or str
        ``clamped`` imposes zero first derivative at both ends,
        ``natural`` zero second derivative at both ends, and
        ``not-a-knot`` third-derivative continuity across the second and
        penultimate knots.

    Returns
    -------
    CubicSplineModel
        The unique C^2 interpolant satisfying the boundary condition.
    """
    boundary = Boundary(boundary)
    x = np.asarray(x, dtype=float)
    F = np.asarray(F, dtype=float)
    if x.ndim != 1 or F.shape != x.shape:
        raise DataError("x and F must be 1-d arrays of equal length")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(F))):
        raise DataError("x and F must be finite")
    m = x.size
    if m < 2:
        raise DataError("need at least 2 interpolation points")
    if boundary is Boundary.NOT_A_KNOT and m < 4:
        raise DataError("not-a-knot requires at least 4 points (two distinct end segments)")
    if np.any(np.diff(x) <= 0.0):
        raise DataError("x must be strictly increasing")

    h = np.diff(x)
    slopes = np.diff(F) / h

    # Unknowns are the second derivatives (moments) M_i at the knots.
    A = np.zeros((m, m))
    rhs = np.zeros(m)
    for i in range(1, m - 1):
        A[i, i - 1] = h[i - 1]
        A[i, i] = 2.0 * (h[i - 1] + h[i])
        A[i, i + 1] = h[i]
        rhs[i] = 6.0 * (slopes[i] - slopes[i - 1])

    if boundary is Boundary.NATURAL:
        A[0, 0] = 1.0
        A[m - 1, m - 1] = 1.0
    elif boundary is Boundary.CLAMPED:
        A[0, 0] = 2.0 * h[0]
        A[0, 1] = h[0]
        rhs[0] = 6.0 * slopes[0]  # S'(x_0) = 0
        A[m - 1, m - 2] = h[-1]
        A[m - 1, m - 1] = 2.0 * h[-1]
        rhs[m - 1] = -6.0 * slopes[-1]  # S'(x_{m-1}) = 0
    else:
        # S''' continuous across x_1 and x_{m-2}.
        A[0, 0] = h[1]
        A[0, 1] = -(h[0] + h[1])
        A[0, 2] = h[0]
        A[m - 1, m - 3] = h[-1]
        A[m - 1, m - 2] = -(h[-2] + h[-1])
        A[m - 1, m - 1] = h[-2]

    try:
        moments = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular spline system for boundary {boundary.value}") from exc

    c0 = F[:-1]
    c1 = slopes - h * (2.0 * moments[:-1] + moments[1:]) / 6.0
    c2 = moments[:-1] / 2.0
    c3 = (moments[1:] - moments[:-1]) / (6.0 * h)
    return CubicSplineModel(
        knots=x,
        coefficients=np.column_stack([c0, c1, c2, c3]),
        boundary=boundary,
    )
