"""Type-BDI layer: generators, the reflection-constrained positive cone,
block-Gauss factorization and exponential Bratu solutions.

Conventions
-----------
Matrices of size 2n+r are split into blocks of sizes (n, r, n). The
reflection

    J = [[0, 0, I], [0, I, 0], [I, 0, 0]]

defines the cone of symmetric positive definite G with J G J = G^{-1}. Its
tangent generators are the symmetric matrices B with J B J = -B; every such
B is

    B(b, a, c) = [[ b,   a,   c  ],
                  [ a^T, 0,  -a^T],
                  [ c^T, -a, -b  ]]

with b symmetric (n x n), a rectangular (n x r) and c skew (n x n). The
one-parameter family G(s) = exp(s B) stays in the cone, and the leading
n x n block of its block-Gauss factorization solves the matrix Bratu
equation (h' h^{-1})' = (a a^T) h^{-1} whenever c = 0.

The block-Gauss factorization writes G = N A N^T with N unit lower
block-triangular and A = diag(h, I, h^{-1}); expanding the product gives the
closed-form extraction h = G11, n1 = h^{-1} G12, n2 = h^{-1} G13 used here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ConsistencyError, PreconditionError, ValidationError
from .trajectory import Trajectory

MEMBERSHIP_TOL = 1e-10
FACTOR_TOL = 1e-10


def j_reflection(n, r) -> np.ndarray:
    """The block anti-diagonal reflection J for block sizes (n, r, n)."""
    N = 2 * n + r
    J = np.zeros((N, N))
    J[:n, n + r :] = np.eye(n)
    J[n : n + r, n : n + r] = np.eye(r)
    J[n + r :, :n] = np.eye(n)
    return J


@dataclass(frozen=True)
class BdiGenerator:
    """Generator data (b, a, c) with b symmetric, c skew and a of shape (n, r).

    Inputs are validated to 1e-13 relative and then symmetrized /
    skew-symmetrized exactly, so the embedded matrix satisfies B = B^T and
    J B J = -B without rounding.
    """

    b: np.ndarray
    a: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        b = linalg.require_symmetric(np.asarray(self.b, dtype=float), name="b")
        c = linalg.require_skew(np.asarray(self.c, dtype=float), name="c")
        a = linalg.require_finite(np.asarray(self.a, dtype=float), "a")
        if a.ndim != 2 or a.shape[0] != b.shape[0] or c.shape[0] != b.shape[0]:
            raise ValidationError(
                f"inconsistent generator shapes b{b.shape} a{a.shape} c{c.shape}"
            )
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @property
    def r(self) -> int:
        return self.a.shape[1]

    def embed(self) -> np.ndarray:
        """The symmetric (2n+r) x (2n+r) matrix B(b, a, c)."""
        n, r = self.n, self.r
        B = np.zeros((2 * n + r, 2 * n + r))
        B[:n, :n] = self.b
        B[:n, n : n + r] = self.a
        B[:n, n + r :] = self.c
        B[n : n + r, :n] = self.a.T
        B[n : n + r, n + r :] = -self.a.T
        B[n + r :, :n] = self.c.T
        B[n + r :, n : n + r] = -self.a
        B[n + r :, n + r :] = -self.b
        return B

    def scaled(self, t) -> "BdiGenerator":
        return BdiGenerator(t * self.b, t * self.a, t * self.c)


def make_generator(b, a, c) -> BdiGenerator:
    """Validating constructor for BdiGenerator."""
    return BdiGenerator(b, a, c)


@dataclass(frozen=True)
class BdiPoint:
    """A point G of the cone: symmetric positive definite with J G J = G^{-1}."""

    G: np.ndarray
    n: int
    r: int

    def __post_init__(self):
        G = linalg.require_symmetric(
            np.asarray(self.G, dtype=float), tol=1e-12, name="G"
        )
        if G.shape[0] != 2 * self.n + self.r:
            raise ValidationError(
                f"G has size {G.shape[0]}, expected {2 * self.n + self.r}"
            )
        Ginv = linalg.spd_inverse(G)  # raises if not positive definite
        J = j_reflection(self.n, self.r)
        defect = linalg.max_norm(J @ G @ J - Ginv)
        if defect > MEMBERSHIP_TOL * max(1.0, linalg.max_norm(Ginv)):
            raise ValidationError(
                f"J G J = G^-1 violated (defect {defect:.3e})"
            )
        object.__setattr__(self, "G", G)


def exp_trajectory(gen: BdiGenerator, s) -> BdiPoint:
    """The cone point exp(s B) of the one-parameter family of ``gen``."""
    G = linalg.expm(float(s) * gen.embed())
    return BdiPoint(linalg.symmetrize(G), gen.n, gen.r)


@dataclass(frozen=True)
class BdiGaussFactors:
    """Block-Gauss data (h, n1, n2) with h positive definite.

    Membership of the unipotent factor requires n2 + n2^T = -n1 n1^T, which
    is validated here to 1e-10 relative.
    """

    h: np.ndarray
    n1: np.ndarray
    n2: np.ndarray

    def __post_init__(self):
        h = linalg.require_symmetric(np.asarray(self.h, dtype=float), name="h")
        if not linalg.is_spd(h):
            raise ValidationError("h block is not positive definite")
        n1 = linalg.require_finite(np.asarray(self.n1, dtype=float), "n1")
        n2 = linalg.require_finite(np.asarray(self.n2, dtype=float), "n2")
        closure = n2 + n2.T + n1 @ n1.T
        if linalg.max_norm(closure) > FACTOR_TOL * max(1.0, linalg.max_norm(n2)):
            raise ValidationError(
                "unipotent factor constraint n2 + n2^T = -n1 n1^T violated "
                f"(defect {linalg.max_norm(closure):.3e})"
            )
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "n1", n1)
        object.__setattr__(self, "n2", n2)

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def r(self) -> int:
        return self.n1.shape[1]


def block_gauss(point: BdiPoint) -> BdiGaussFactors:
    """Decompose G = N A N^T into (h, n1, n2).

    Reads the first block column: h = G11, n1 = h^{-1} G12, n2 = h^{-1} G13.
    """
    n, r = point.n, point.r
    G = point.G
    h = linalg.symmetrize(G[:n, :n])
    try:
        n1 = linalg.solve_spd(h, G[:n, n : n + r])
        n2 = linalg.solve_spd(h, G[:n, n + r :])
    except ValidationError as exc:
        raise ConsistencyError(f"leading block of a cone point not SPD: {exc}") from exc
    return BdiGaussFactors(h, n1, n2)


def gauss_compose(factors: BdiGaussFactors) -> BdiPoint:
    """Rebuild the cone point N A N^T from its block-Gauss data."""
    n, r = factors.n, factors.r
    N = np.eye(2 * n + r)
    N[n : n + r, :n] = factors.n1.T
    N[n + r :, :n] = factors.n2.T
    N[n + r :, n : n + r] = -factors.n1
    A = np.zeros((2 * n + r, 2 * n + r))
    A[:n, :n] = factors.h
    A[n : n + r, n : n + r] = np.eye(r)
    A[n + r :, n + r :] = linalg.spd_inverse(factors.h)
    G = linalg.symmetrize(N @ A @ N.T)
    return BdiPoint(G, n, r)


@dataclass(frozen=True)
class GaussJet:
    """Block-Gauss factors along exp(sB) together with analytic derivatives.

    With G' = B G and G'' = B^2 G, differentiating h = G11, G12 = h n1 and
    G13 = h n2 gives

        h'  = (B G)11,            h'' = (B^2 G)11,
        n1' = h^{-1} ((B G)12 - h' n1),
        n2' = h^{-1} ((B G)13 - h' n2).
    """

    h: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    dh: np.ndarray
    dn1: np.ndarray
    dn2: np.ndarray
    d2h: np.ndarray
    G: np.ndarray
    hinv: np.ndarray


def gauss_jet(gen: BdiGenerator, s) -> GaussJet:
    """Factors and first derivatives (plus h'') at one parameter value."""
    n, r = gen.n, gen.r
    B = gen.embed()
    G = linalg.symmetrize(linalg.expm(float(s) * B))
    BG = B @ G
    B2G = B @ BG
    h = linalg.symmetrize(G[:n, :n])
    hinv = linalg.spd_inverse(h)
    n1 = hinv @ G[:n, n : n + r]
    n2 = hinv @ G[:n, n + r :]
    dh = BG[:n, :n]
    dn1 = hinv @ (BG[:n, n : n + r] - dh @ n1)
    dn2 = hinv @ (BG[:n, n + r :] - dh @ n2)
    d2h = B2G[:n, :n]
    return GaussJet(h, n1, n2, dh, dn1, dn2, d2h, G, hinv)


def bratu_point(gen: BdiGenerator, s) -> tuple[np.ndarray, float]:
    """h(s) of the exponential solution and its Bratu residual at one point.

    The residual is |h'' h^{-1} - (h' h^{-1})^2 - (a a^T) h^{-1}| in max-norm,
    all derivatives analytic.
    """
    jet = gauss_jet(gen, s)
    P = jet.dh @ jet.hinv
    lhs = jet.d2h @ jet.hinv - P @ P
    rhs = (gen.a @ gen.a.T) @ jet.hinv
    return jet.h, linalg.max_norm(lhs - rhs)


def bratu_solution(gen: BdiGenerator, grid) -> Trajectory:
    """Exponential solution h(s) of (h' h^{-1})' = (a a^T) h^{-1} on a grid.

    Requires c = 0 exactly; generators with c != 0 obey the three-equation
    system handled in the lagrangian module instead.
    """
    if linalg.max_norm(gen.c) != 0.0:
        raise PreconditionError(
            "bratu_solution needs c = 0; for c != 0 use "
            "lagrangian.el_system_residuals"
        )
    grid = np.asarray(grid, dtype=float)
    hs, res = [], []
    for s in grid:
        h, rnorm = bratu_point(gen, s)
        hs.append(h)
        res.append(rnorm)
    return Trajectory(grid, np.array(hs), {"bratu": np.array(res)})
