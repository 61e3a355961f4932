"""Type-CI layer: the symplectic analog of the BDI construction.

Blocks have sizes (n, n). The real characterization keeps every cone
computation real: the cone is the set of symmetric positive definite G of
size 2n with G K G^T = K, where K = [[0, I], [-I, 0]]; generators are the
symmetric matrices

    B(b, c) = [[b, c], [c, -b]],   b, c symmetric.

Block-Gauss factorization G = N A N^T with N = [[I, 0], [n1, I]] (n1
symmetric) and A = diag(h, h^{-1}) extracts h = G11, n1 = G21 h^{-1}; along
exp(sB) this h solves (h' h^{-1})' = (c h^{-1})^2.

Complex arithmetic appears only in the upper-half-space kernel: points are
classes [U] of full-rank (2n, n) complex matrices, paired through

    Delta(u1, u2) = (U1 G1^{-1})^* Jc (U2 G2^{-1}),
    Jc = [[0, i I], [-i I, 0]],  Gj = second block of Uj,

and the kernel pathway h(s) = Delta(exp(sB) u0, exp(sB) u0)^{-1} equals half
the block-Gauss h of exp(-2sB) and solves the same equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, oracle
from .errors import (
    ConsistencyError,
    PointAtInfinityError,
    ValidationError,
)
from .trajectory import Trajectory

MEMBERSHIP_TOL = 1e-10
SYMMETRY_TOL = 1e-10


def k_form(n) -> np.ndarray:
    """The real symplectic form K = [[0, I], [-I, 0]]."""
    K = np.zeros((2 * n, 2 * n))
    K[:n, n:] = np.eye(n)
    K[n:, :n] = -np.eye(n)
    return K


def j_pairing(n) -> np.ndarray:
    """The complex pairing Jc = i K used by the upper-half-space kernel."""
    return 1j * k_form(n)


@dataclass(frozen=True)
class CiGenerator:
    """Generator data (b, c), both symmetric n x n."""

    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        b = linalg.require_symmetric(np.asarray(self.b, dtype=float), name="b")
        c = linalg.require_symmetric(np.asarray(self.c, dtype=float), name="c")
        if b.shape != c.shape:
            raise ValidationError("b and c must have the same size")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def embed(self) -> np.ndarray:
        """The symmetric 2n x 2n matrix [[b, c], [c, -b]]."""
        n = self.n
        B = np.zeros((2 * n, 2 * n))
        B[:n, :n] = self.b
        B[:n, n:] = self.c
        B[n:, :n] = self.c
        B[n:, n:] = -self.b
        return B

    def scaled(self, t) -> "CiGenerator":
        return CiGenerator(t * self.b, t * self.c)


def make_generator(b, c) -> CiGenerator:
    return CiGenerator(b, c)


@dataclass(frozen=True)
class CiPoint:
    """A symmetric positive definite symplectic matrix of size 2n."""

    G: np.ndarray
    n: int

    def __post_init__(self):
        G = linalg.require_symmetric(
            np.asarray(self.G, dtype=float), tol=1e-12, name="G"
        )
        if G.shape[0] != 2 * self.n:
            raise ValidationError(f"G has size {G.shape[0]}, expected {2 * self.n}")
        if not linalg.is_spd(G):
            raise ValidationError("G is not positive definite")
        K = k_form(self.n)
        defect = linalg.max_norm(G @ K @ G.T - K)
        if defect > MEMBERSHIP_TOL:
            raise ValidationError(f"G K G^T = K violated (defect {defect:.3e})")
        object.__setattr__(self, "G", G)


def exp_trajectory(gen: CiGenerator, s) -> CiPoint:
    """The symplectic cone point exp(s B)."""
    G = linalg.expm(float(s) * gen.embed())
    return CiPoint(linalg.symmetrize(G), gen.n)


@dataclass(frozen=True)
class CiGaussFactors:
    """Block-Gauss data (h, n1), h positive definite and n1 symmetric."""

    h: np.ndarray
    n1: np.ndarray

    def __post_init__(self):
        h = linalg.require_symmetric(np.asarray(self.h, dtype=float), name="h")
        if not linalg.is_spd(h):
            raise ValidationError("h block is not positive definite")
        n1 = linalg.require_symmetric(
            np.asarray(self.n1, dtype=float), tol=SYMMETRY_TOL, name="n1"
        )
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "n1", n1)

    @property
    def n(self) -> int:
        return self.h.shape[0]


def block_gauss(point: CiPoint) -> CiGaussFactors:
    """Decompose G = N A N^T into (h, n1) with h = G11, n1 = G21 h^{-1}."""
    n = point.n
    G = point.G
    h = linalg.symmetrize(G[:n, :n])
    try:
        n1 = linalg.solve_spd(h, G[:n, n:])
    except ValidationError as exc:
        raise ConsistencyError(f"leading block of a cone point not SPD: {exc}") from exc
    return CiGaussFactors(h, n1)


def gauss_compose(factors: CiGaussFactors) -> CiPoint:
    """Rebuild the cone point N A N^T from (h, n1)."""
    n = factors.n
    N = np.eye(2 * n)
    N[n:, :n] = factors.n1
    A = np.zeros((2 * n, 2 * n))
    A[:n, :n] = factors.h
    A[n:, n:] = linalg.spd_inverse(factors.h)
    return CiPoint(linalg.symmetrize(N @ A @ N.T), n)


@dataclass(frozen=True)
class CiJet:
    h: np.ndarray
    n1: np.ndarray
    dh: np.ndarray
    dn1: np.ndarray
    d2h: np.ndarray
    G: np.ndarray
    hinv: np.ndarray


def gauss_jet(gen: CiGenerator, s) -> CiJet:
    """Factors with analytic derivatives via G' = B G at one parameter value."""
    n = gen.n
    B = gen.embed()
    G = linalg.symmetrize(linalg.expm(float(s) * B))
    BG = B @ G
    B2G = B @ BG
    h = linalg.symmetrize(G[:n, :n])
    hinv = linalg.spd_inverse(h)
    n1 = G[n:, :n] @ hinv
    dh = BG[:n, :n]
    dn1 = (BG[n:, :n] - n1 @ dh) @ hinv
    d2h = B2G[:n, :n]
    return CiJet(h, n1, dh, dn1, d2h, G, hinv)


def bratu_point(gen: CiGenerator, s) -> tuple[np.ndarray, float]:
    """h(s) and the residual of (h' h^{-1})' = (c h^{-1})^2, analytic route."""
    jet = gauss_jet(gen, s)
    P = jet.dh @ jet.hinv
    chinv = gen.c @ jet.hinv
    res = linalg.max_norm(jet.d2h @ jet.hinv - P @ P - chinv @ chinv)
    return jet.h, res


def bratu_solution(gen: CiGenerator, grid) -> Trajectory:
    """Exponential solution of the symplectic analog on a grid."""
    grid = np.asarray(grid, dtype=float)
    hs, res = [], []
    for s in grid:
        h, rnorm = bratu_point(gen, s)
        hs.append(h)
        res.append(rnorm)
    return Trajectory(grid, np.array(hs), {"ci": np.array(res)})


def lagrangian_identity(gen: CiGenerator, s) -> tuple[float, float, float]:
    """(total, kinetic_h, cross) of the squared-velocity split.

    total = (1/2) tr((G' G^{-1})^2) = (1/2) tr(B^2); the split is
    tr((h' h^{-1})^2) + tr(h n1'^T h n1').
    """
    jet = gauss_jet(gen, s)
    Ginv = linalg.spd_inverse(jet.G)
    Q = (gen.embed() @ jet.G) @ Ginv
    total = 0.5 * float(np.trace(Q @ Q))
    P = jet.dh @ jet.hinv
    kinetic = float(np.trace(P @ P))
    cross = float(np.trace(jet.h @ jet.dn1.T @ jet.h @ jet.dn1))
    return total, kinetic, cross


@dataclass(frozen=True)
class CiDomainPoint:
    """A projective point [U] with U complex of shape (2n, n), full rank."""

    U: np.ndarray
    n: int

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex)
        if U.shape != (2 * self.n, self.n):
            raise ValidationError(
                f"representative has shape {U.shape}, expected ({2 * self.n}, {self.n})"
            )
        if not np.all(np.isfinite(U.real)) or not np.all(np.isfinite(U.imag)):
            raise ValidationError("representative contains non-finite entries")
        sv = np.linalg.svd(U, compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            raise ValidationError("representative is column rank deficient")
        object.__setattr__(self, "U", U)


def halfspace_basepoint(n) -> CiDomainPoint:
    """The interior reference point [i I; I]."""
    return CiDomainPoint(np.vstack([1j * np.eye(n), np.eye(n)]), n)


def shilov_basepoint(n) -> CiDomainPoint:
    """The boundary reference point [0; I]."""
    return CiDomainPoint(np.vstack([np.zeros((n, n)), np.eye(n)]), n)


def halfspace_membership(point: CiDomainPoint) -> tuple[np.ndarray, float]:
    """(Hermitian slack, Lagrangian defect) of a point.

    Membership in the upper half space needs the slack U^* Jc U positive
    definite and the defect |U^T K U| at most 1e-10 relative; the Shilov
    boundary is slack zero.
    """
    U = point.U
    n = point.n
    slack = U.conj().T @ j_pairing(n) @ U
    slack = 0.5 * (slack + slack.conj().T)
    defect = linalg.max_norm(np.abs(U.T @ k_form(n) @ U))
    return slack, defect


def delta(u1: CiDomainPoint, u2: CiDomainPoint) -> np.ndarray:
    """Upper-half-space kernel, an n x n complex matrix.

    Hermitian positive definite on the diagonal, independent of the chosen
    representatives; raises PointAtInfinityError for singular second blocks.
    """
    n = u1.n
    if u2.n != n:
        raise ValidationError("kernel arguments have mismatched sizes")

    def normalize(u):
        gamma = u.U[n:]
        sv = np.linalg.svd(gamma, compute_uv=False)
        if sv.size == 0 or sv[-1] <= 0.0 or sv[0] / sv[-1] > 1e12:
            raise PointAtInfinityError("point at infinity relative to the frame")
        return u.U @ np.linalg.inv(gamma)

    X1, X2 = normalize(u1), normalize(u2)
    return X1.conj().T @ j_pairing(n) @ X2


def to_domain(point: CiPoint) -> CiDomainPoint:
    """The realization map F(G) = [i I - G21; G11] of a symplectic cone point."""
    n = point.n
    G = point.G
    U = np.vstack([1j * np.eye(n) - G[n:, :n], G[:n, :n]])
    return CiDomainPoint(U, n)


def leading_block(point: CiPoint) -> np.ndarray:
    return linalg.symmetrize(point.G[: point.n, : point.n])


def cone_action(g, point: CiPoint) -> CiPoint:
    """g . G = g^{-T} G g^{-1} for a real symplectic g."""
    ginv = np.linalg.inv(g)
    return CiPoint(linalg.symmetrize(ginv.T @ point.G @ ginv), point.n)


def domain_action(g, u: CiDomainPoint) -> CiDomainPoint:
    return CiDomainPoint(np.asarray(g) @ u.U, u.n)


def isometry_generator(n, Y) -> np.ndarray:
    """An element X = K Y of the symplectic algebra, Y symmetric of size 2n."""
    Y = linalg.require_symmetric(Y, name="Y")
    if Y.shape[0] != 2 * n:
        raise ValidationError("symmetric seed has the wrong size")
    return k_form(n) @ Y


def _real_part(M, what) -> np.ndarray:
    scale = max(1.0, linalg.max_norm(np.abs(M)))
    imag = linalg.max_norm(M.imag)
    if imag > 1e-12 * scale:
        raise ConsistencyError(f"{what} has imaginary part {imag:.3e}")
    return linalg.symmetrize(M.real)


def kernel_pathway_h(gen: CiGenerator, s) -> np.ndarray:
    """h(s) = Delta(exp(sB) u0, exp(sB) u0)^{-1}, real symmetric by construction."""
    n = gen.n
    g = linalg.expm(float(s) * gen.embed())
    u = CiDomainPoint(g @ halfspace_basepoint(n).U, n)
    d = delta(u, u)
    return _real_part(np.linalg.inv(d), "kernel pathway h")


def kernel_point(gen: CiGenerator, s, step=1e-2) -> tuple[np.ndarray, float]:
    """h(s) of the kernel pathway with its finite-difference residual.

    The residual checks (h' h^{-1})' = (c h^{-1})^2, the same equation as the
    block-Gauss route; the two solutions differ by the exact factor
    h = (1/2) htilde with htilde taken along exp(-2sB).
    """

    def hfun(t):
        return kernel_pathway_h(gen, t)

    def rhs(t):
        chinv = gen.c @ linalg.spd_inverse(hfun(t))
        return chinv @ chinv

    h = hfun(s)
    return h, oracle.log_derivative_residual(hfun, rhs, s, step=step)


def kernel_solution(gen: CiGenerator, grid, step=1e-2) -> Trajectory:
    """Kernel-pathway solution h(s) with finite-difference residuals."""
    grid = np.asarray(grid, dtype=float)
    hs, res = [], []
    for s in grid:
        h, rnorm = kernel_point(gen, s, step=step)
        hs.append(h)
        res.append(rnorm)
    return Trajectory(grid, np.array(hs), {"ci2": np.array(res)})


def half_gauss_h(gen: CiGenerator, s) -> np.ndarray:
    """(1/2) htilde(s) with htilde the block-Gauss h of exp(-2sB)."""
    return 0.5 * block_gauss(exp_trajectory(gen.scaled(-2.0), s)).h
