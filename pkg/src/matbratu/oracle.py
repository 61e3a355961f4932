"""Independent verification machinery.

Fixed-step RK4 integration of the Bratu equations from initial data, a
series-based matrix exponential, and high-order numerical differentiation.
Nothing in this module reuses the analytic-derivative pathways it is meant
to cross-check.
"""

from __future__ import annotations

import math

import numpy as np

from . import linalg
from .errors import SpdLossError, ValidationError
from .trajectory import Trajectory


def series_expm(M, terms=30) -> np.ndarray:
    """Taylor-series matrix exponential with argument halving.

    The argument is scaled by 2^-k until its max-norm is at most 0.5, the
    series is summed by Horner's rule to the given order, and the result is
    squared k times. With terms >= 20 this agrees with the Pade route to
    about 1e-12 for max-norm up to 5.
    """
    M = linalg.require_finite(linalg.require_square(M), "series_expm argument")
    M = np.asarray(M, dtype=float)
    if terms < 1:
        raise ValidationError("series_expm needs at least one term")
    nrm = linalg.max_norm(M)
    k = 0 if nrm <= 0.5 else max(0, math.ceil(math.log2(nrm / 0.5)))
    S = M / (2.0**k)
    n = M.shape[0]
    acc = np.eye(n)
    for j in range(terms, 0, -1):
        acc = np.eye(n) + (S @ acc) / j
    for _ in range(k):
        acc = acc @ acc
    return acc


def num_diff(f, s, order=1, step=1e-2):
    """Derivative of a scalar-to-matrix function by central differences.

    A 5-point stencil (fourth order) evaluated at two step sizes and combined
    by Richardson extrapolation; good to about 1e-10 for unit-scale smooth f.
    ``order`` is 1 or 2.
    """
    s = float(s)

    def stencil(h):
        if order == 1:
            return (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (
                12 * h
            )
        if order == 2:
            return (
                -f(s + 2 * h)
                + 16 * f(s + h)
                - 30 * f(s)
                + 16 * f(s - h)
                - f(s - 2 * h)
            ) / (12 * h * h)
        raise ValidationError("num_diff supports order 1 or 2")

    coarse = stencil(step)
    fine = stencil(step / 2)
    return (16.0 * fine - coarse) / 15.0


def log_derivative_residual(hfun, rhs, s, step=1e-2) -> float:
    """Residual of (h' h^{-1})' = rhs at s, derivatives by finite differences.

    ``hfun`` maps s to a symmetric positive matrix, ``rhs`` to the target
    right-hand side. Uses h'' h^{-1} - (h' h^{-1})^2 for the left side.
    """
    h = hfun(s)
    hinv = linalg.spd_inverse(h)
    dh = num_diff(hfun, s, order=1, step=step)
    d2h = num_diff(hfun, s, order=2, step=step)
    P = dh @ hinv
    return linalg.max_norm(d2h @ hinv - P @ P - rhs(s))


def _rk4(deriv, y0, span, step, guard):
    """Classical RK4 with a per-step acceptance guard on the state."""
    s0, s1 = float(span[0]), float(span[1])
    step = float(step)
    if step <= 0:
        raise ValidationError("step must be positive")
    count = int(round((s1 - s0) / step))
    if count < 1 or abs(s0 + count * step - s1) > 1e-9 * max(1.0, abs(s1)):
        raise ValidationError("span must be an integer number of steps")
    grid = [s0]
    states = [y0]
    y = y0
    s = s0
    for _ in range(count):
        k1 = deriv(y)
        k2 = deriv(tuple(a + 0.5 * step * b for a, b in zip(y, k1)))
        k3 = deriv(tuple(a + 0.5 * step * b for a, b in zip(y, k2)))
        k4 = deriv(tuple(a + step * b for a, b in zip(y, k3)))
        y = tuple(
            a + (step / 6.0) * (b1 + 2 * b2 + 2 * b3 + b4)
            for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)
        )
        s += step
        if not guard(y):
            raise SpdLossError(
                f"state left the SPD cone at s = {s:.6g}", last_valid_s=grid[-1]
            )
        grid.append(s)
        states.append(y)
    return np.array(grid), states


def _spd_guard(h):
    # reject once symmetry drifts or a Cholesky pivot fails
    if linalg.max_norm(h - h.T) > 1e-8 * max(1.0, linalg.max_norm(h)):
        return False
    return linalg.is_spd(linalg.symmetrize(h))


def integrate_bratu_bdi(h0, P0, a, span, step) -> Trajectory:
    """RK4 integration of h' = P h, P' = (a a^T) h^{-1} from (h0, P0).

    ``h0`` must be symmetric positive definite. Matching the exponential
    solution means h0 = I and P0 = b of the generator. Raises SpdLossError
    (carrying the last valid s) if the state leaves the cone.
    """
    h0 = linalg.require_symmetric(np.asarray(h0, dtype=float), name="h0")
    if not linalg.is_spd(h0):
        raise ValidationError("h0 must be positive definite")
    P0 = np.asarray(P0, dtype=float)
    a = np.asarray(a, dtype=float)
    aat = a @ a.T

    def deriv(y):
        h, P = y
        return (P @ h, aat @ linalg.spd_inverse(linalg.symmetrize(h)))

    grid, states = _rk4(deriv, (h0, P0), span, step, guard=lambda y: _spd_guard(y[0]))
    return Trajectory(grid, np.array([h for h, _ in states]))


def integrate_bratu_ci(h0, P0, c, span, step) -> Trajectory:
    """RK4 integration of h' = P h, P' = (c h^{-1})^2 from (h0, P0)."""
    h0 = linalg.require_symmetric(np.asarray(h0, dtype=float), name="h0")
    if not linalg.is_spd(h0):
        raise ValidationError("h0 must be positive definite")
    P0 = np.asarray(P0, dtype=float)
    c = linalg.require_symmetric(np.asarray(c, dtype=float), name="c")

    def deriv(y):
        h, P = y
        chinv = c @ linalg.spd_inverse(linalg.symmetrize(h))
        return (P @ h, chinv @ chinv)

    grid, states = _rk4(deriv, (h0, P0), span, step, guard=lambda y: _spd_guard(y[0]))
    return Trajectory(grid, np.array([h for h, _ in states]))
