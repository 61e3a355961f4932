"""Variational layer for the BDI family.

The squared-velocity functional (1/2) tr((G' G^{-1})^2) of a cone trajectory
splits, after the block-Gauss change of variables G -> (h, n1, n2), into

    tr((h' h^{-1})^2) + 2 tr(h n1' n1'^T) + tr(h m^T h m),
    m = n1 n1'^T + n2'^T,  m skew.

(m is the lower-left block of N^{-1} N'; with the extraction n2 = h^{-1} G13
used here the transpose on n2' is forced, and the conserved-matrix identity
below pins it numerically.)

Its constrained Euler-Lagrange equations are G' G^{-1} = const, which in the
factored variables reads

    (h' h^{-1})' = h n1' n1'^T - c h^{-1} c h^{-1},
    h n1' + c n1 = a,
    h m^T h     = c,

with (a, c) the constant generator blocks; the last two lines are the
conserved matrices of the flow. All derivatives here are analytic through
G' = B G except in ``geodesic_residual``, which deliberately uses finite
differences as an independent pathway. Residual norms are entrywise max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, oracle
from .bdi import BdiGenerator, gauss_jet
from .errors import ValidationError
from .trajectory import Trajectory

IDENTITY_TOL = 1e-9
SKEW_TOL = 1e-10


@dataclass(frozen=True)
class LagrangianBreakdown:
    """Split of the squared-velocity functional at one parameter value.

    total is (1/2) tr((G' G^{-1})^2); the parts are the h-kinetic term, the
    rectangular cross term and the skew twist term. The split identity and
    the skewness of m are validated on construction.
    """

    total: float
    kinetic_h: float
    cross: float
    twist: float
    m: np.ndarray

    def __post_init__(self):
        gap = abs(self.total - (self.kinetic_h + self.cross + self.twist))
        if gap > IDENTITY_TOL * max(1.0, abs(self.total)):
            raise ValidationError(f"lagrangian split violated (gap {gap:.3e})")
        if linalg.max_norm(self.m + self.m.T) > SKEW_TOL * max(
            1.0, linalg.max_norm(self.m)
        ):
            raise ValidationError("m is not skew")


@dataclass(frozen=True)
class ConservedQuantities:
    """First integrals of the factored flow: c_tilde skew, a_tilde (n, r)."""

    c_tilde: np.ndarray
    a_tilde: np.ndarray

    def __post_init__(self):
        if linalg.max_norm(self.c_tilde + self.c_tilde.T) > SKEW_TOL * max(
            1.0, linalg.max_norm(self.c_tilde)
        ):
            raise ValidationError("c_tilde is not skew")


def lagrangian_breakdown(gen: BdiGenerator, s) -> LagrangianBreakdown:
    """Evaluate the split of (1/2) tr((G' G^{-1})^2) along exp(sB).

    The total equals (1/2) tr(B^2) since G' G^{-1} = B; it is computed from
    the trajectory data rather than from B so the identity check is not
    circular.
    """
    jet = gauss_jet(gen, s)
    Ginv = linalg.spd_inverse(jet.G)
    B = gen.embed()
    Q = (B @ jet.G) @ Ginv
    total = 0.5 * float(np.trace(Q @ Q))
    P = jet.dh @ jet.hinv
    kinetic = float(np.trace(P @ P))
    cross = 2.0 * float(np.trace(jet.h @ jet.dn1 @ jet.dn1.T))
    m = jet.n1 @ jet.dn1.T + jet.dn2.T
    twist = float(np.trace(jet.h @ m.T @ jet.h @ m))
    return LagrangianBreakdown(total, kinetic, cross, twist, m)


def _check_pattern(X, n, r, strict, name):
    X = linalg.require_finite(np.asarray(X, dtype=float), name)
    if X.shape != (2 * n + r, 2 * n + r):
        raise ValidationError(f"{name} has shape {X.shape}, expected {(2*n+r,)*2}")
    cuts = (0, n, n + r, 2 * n + r)
    for i in range(3):
        for j in range(3):
            block = X[cuts[i] : cuts[i + 1], cuts[j] : cuts[j + 1]]
            forbidden = (j > i) if not strict else (j >= i)
            if forbidden and linalg.max_norm(block) != 0.0:
                raise ValidationError(
                    f"{name} must be {'strictly ' if strict else ''}block lower "
                    f"triangular; block ({i+1},{j+1}) is nonzero"
                )
    return X


def trace_orthogonality(X1, X2, n, r) -> float:
    """tr(X1 X2) for X1 block lower and X2 strictly block lower, sizes (n, r, n).

    Every summand of the trace pairs a zero against something, so the value
    is exactly 0.0; the dense product is computed anyway and returned so the
    structural claim is checked rather than assumed.
    """
    X1 = _check_pattern(X1, n, r, strict=False, name="X1")
    X2 = _check_pattern(X2, n, r, strict=True, name="X2")
    return float(np.trace(X1 @ X2))


def geodesic_residual(gen: BdiGenerator, grid) -> float:
    """Max-norm residual of (G' G^{-1})' = 0 by nested finite differences.

    Both derivative layers use the 5-point stencil with the grid spacing as
    step, independent of the analytic G' = B G route. Needs at least 5
    uniformly spaced grid points.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 5:
        raise ValidationError("geodesic_residual needs at least 5 grid points")
    spacing = np.diff(grid)
    if linalg.max_norm(spacing - spacing[0]) > 1e-9 * max(1.0, abs(spacing[0])):
        raise ValidationError("geodesic_residual needs a uniform grid")
    step = float(spacing[0])
    B = gen.embed()

    def G(t):
        return linalg.expm(t * B)

    def logderiv(t):
        dG = oracle.num_diff(G, t, order=1, step=step)
        return dG @ linalg.spd_inverse(linalg.symmetrize(G(t)))

    worst = 0.0
    for s in grid:
        worst = max(worst, linalg.max_norm(oracle.num_diff(logderiv, s, order=1, step=step)))
    return worst


def el_point(gen: BdiGenerator, s) -> tuple[np.ndarray, tuple[float, float, float]]:
    """h(s) and the three Euler-Lagrange residuals at one parameter value."""
    jet = gauss_jet(gen, s)
    a, c = gen.a, gen.c
    hinv = jet.hinv
    P = jet.dh @ hinv
    m = jet.n1 @ jet.dn1.T + jet.dn2.T
    eq_h = linalg.max_norm(
        (jet.d2h @ hinv - P @ P) - (jet.h @ jet.dn1 @ jet.dn1.T - c @ hinv @ c @ hinv)
    )
    eq_n1 = linalg.max_norm(jet.h @ jet.dn1 + c @ jet.n1 - a)
    eq_n2 = linalg.max_norm(jet.h @ m.T @ jet.h - c)
    return jet.h, (eq_h, eq_n1, eq_n2)


def el_system_residuals(gen: BdiGenerator, grid) -> Trajectory:
    """Residual curves of the three-equation system along exp(sB).

    Valid for any generator, c = 0 or not; with c = 0 the first equation
    reduces to the Bratu equation after substituting h n1' = a.
    """
    grid = np.asarray(grid, dtype=float)
    hs = []
    cols = {"eq_h": [], "eq_n1": [], "eq_n2": []}
    for s in grid:
        h, (r1, r2, r3) = el_point(gen, s)
        hs.append(h)
        cols["eq_h"].append(r1)
        cols["eq_n1"].append(r2)
        cols["eq_n2"].append(r3)
    return Trajectory(grid, np.array(hs), {k: np.array(v) for k, v in cols.items()})


def conserved_quantities(gen: BdiGenerator, grid):
    """Evaluate the first integrals along the flow and their drift.

    Returns (ConservedQuantities, drift) where the quantities are taken at
    the first grid point and drift is the largest max-norm deviation of
    either curve from that value over the grid. For exponential trajectories
    both equal the generator blocks (c, a).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValidationError("conserved_quantities needs a nonempty grid")
    ct_curve, at_curve = [], []
    for s in grid:
        jet = gauss_jet(gen, s)
        m = jet.n1 @ jet.dn1.T + jet.dn2.T
        ct_curve.append(jet.h @ m.T @ jet.h)
        at_curve.append(jet.h @ jet.dn1 + gen.c @ jet.n1)
    ct0, at0 = ct_curve[0], at_curve[0]
    drift = 0.0
    for ct, at in zip(ct_curve, at_curve):
        drift = max(drift, linalg.max_norm(ct - ct0), linalg.max_norm(at - at0))
    return ConservedQuantities(linalg.skew_part(ct0), at0), drift
