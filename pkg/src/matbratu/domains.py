"""Siegel and bounded realizations of the BDI family.

Projective points are classes [U] of full-column-rank (2n+r) x n matrices
under the right GL(n) action. Two pairings produce Bratu solutions:

* the Siegel-side kernel Delta(u1, u2) = (U1 G1^{-1})^T Jd (U2 G2^{-1}) with
  normalizers Gj = W^T Uj (third block) and the NEGATED reflection
  Jd = -[[0,0,I],[0,I,0],[I,0,0]];
* the bounded-side kernel psi(v1, v2) = (V1 G1^{-1})^T L (V2 G2^{-1}) with
  L = diag(I, -I, -I) and normalizers Gj = Z^T Vj.

The sign split matters: the cone in the bdi module uses the reflection
without the minus, the kernels here use the negated one; the identity
(1/2) h = Delta(F(G), F(G))^{-1} is the numerical cross-check that the
pairing conventions are consistent.

The orthogonal Cayley matrix A links the two realizations: L = A Jd A^T,
psi(A u1, A u2) = Delta(u1, u2), and the basepoints map as V0 = A U0,
Z = A W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .bdi import BdiGenerator, BdiPoint, block_gauss, exp_trajectory, j_reflection
from .errors import PointAtInfinityError, PreconditionError, ValidationError
from .trajectory import Trajectory

KERNEL_TOL = 1e-10
RANK_TOL = 1e-10
COND_LIMIT = 1e12


def j_pairing(n, r) -> np.ndarray:
    """The negated reflection used by the Siegel-side kernel."""
    return -j_reflection(n, r)


def indefinite_form(n, r) -> np.ndarray:
    """L = diag(I_n, -I_r, -I_n), the bounded-side pairing matrix."""
    return np.diag(np.concatenate([np.ones(n), -np.ones(r), -np.ones(n)]))


def cayley_matrix(n, r) -> np.ndarray:
    """The orthogonal change of frame with L = A Jd A^T."""
    A = np.zeros((2 * n + r, 2 * n + r))
    invsqrt2 = 1.0 / math.sqrt(2.0)
    A[:n, :n] = invsqrt2 * np.eye(n)
    A[:n, n + r :] = -invsqrt2 * np.eye(n)
    A[n : n + r, n : n + r] = np.eye(r)
    A[n + r :, :n] = invsqrt2 * np.eye(n)
    A[n + r :, n + r :] = invsqrt2 * np.eye(n)
    return A


@dataclass(frozen=True)
class DomainPoint:
    """A projective point [U] with U of shape (2n+r, n) and full column rank.

    ``canonical`` marks representatives normalized against a reference frame
    (third block = I on the Siegel side, first block = I on the bounded
    side); points whose normalizer is singular are kept raw and unflagged.
    """

    U: np.ndarray
    n: int
    r: int
    canonical: bool = False

    def __post_init__(self):
        U = linalg.require_finite(np.asarray(self.U, dtype=float), "U")
        if U.shape != (2 * self.n + self.r, self.n):
            raise ValidationError(
                f"representative has shape {U.shape}, expected "
                f"({2 * self.n + self.r}, {self.n})"
            )
        sv = np.linalg.svd(U, compute_uv=False)
        if sv[-1] <= RANK_TOL * sv[0]:
            raise ValidationError("representative is column rank deficient")
        object.__setattr__(self, "U", U)

    def blocks(self):
        n, r = self.n, self.r
        return self.U[:n], self.U[n : n + r], self.U[n + r :]


def siegel_basepoint(n, r) -> DomainPoint:
    """The interior reference point [-I; 0; I]."""
    U = np.vstack([-np.eye(n), np.zeros((r, n)), np.eye(n)])
    return DomainPoint(U, n, r, canonical=True)


def shilov_basepoint(n, r) -> DomainPoint:
    """The boundary reference point [0; 0; I] (zero membership slack)."""
    U = np.vstack([np.zeros((n, n)), np.zeros((r, n)), np.eye(n)])
    return DomainPoint(U, n, r, canonical=True)


def bounded_basepoint(n, r) -> DomainPoint:
    """A U0 = -sqrt(2) [I; 0; 0], the bounded-side reference point."""
    U = np.vstack([-math.sqrt(2.0) * np.eye(n), np.zeros((r, n)), np.zeros((n, n))])
    return DomainPoint(U, n, r)


def bounded_shilov(n, r) -> DomainPoint:
    """A W = (1/sqrt(2)) [-I; 0; I], the bounded-side boundary reference."""
    invsqrt2 = 1.0 / math.sqrt(2.0)
    U = np.vstack([-invsqrt2 * np.eye(n), np.zeros((r, n)), invsqrt2 * np.eye(n)])
    return DomainPoint(U, n, r)


def _normalize(U, gamma, what) -> np.ndarray:
    sv = np.linalg.svd(gamma, compute_uv=False)
    if sv.size == 0 or sv[-1] <= 0.0 or sv[0] / sv[-1] > COND_LIMIT:
        raise PointAtInfinityError(f"point at infinity relative to {what}")
    return U @ np.linalg.inv(gamma)


def delta(u1: DomainPoint, u2: DomainPoint) -> np.ndarray:
    """Siegel-side kernel of two points, an n x n real matrix.

    Independent of the chosen representatives. Raises PointAtInfinityError
    when a third block is singular (condition number above 1e12).
    """
    n, r = u1.n, u1.r
    if (u2.n, u2.r) != (n, r):
        raise ValidationError("kernel arguments have mismatched block sizes")
    X1 = _normalize(u1.U, u1.blocks()[2], "the Siegel frame")
    X2 = _normalize(u2.U, u2.blocks()[2], "the Siegel frame")
    return X1.T @ j_pairing(n, r) @ X2


def siegel_slack(u: DomainPoint) -> np.ndarray:
    """Membership slack -U1^T - U1 - U2^T U2 of the normalized representative.

    Positive definite slack means the point lies in the Siegel domain; zero
    slack puts it on the Shilov boundary. Equals delta(u, u) up to exact
    symmetrization.
    """
    X = _normalize(u.U, u.blocks()[2], "the Siegel frame")
    n, r = u.n, u.r
    U1, U2 = X[:n], X[n : n + r]
    return linalg.symmetrize(-U1.T - U1 - U2.T @ U2)


def canonicalize_siegel(u: DomainPoint) -> DomainPoint:
    """Representative with third block I when the normalizer is invertible.

    Points at infinity are returned unchanged (still unflagged).
    """
    if u.canonical:
        return u
    try:
        X = _normalize(u.U, u.blocks()[2], "the Siegel frame")
    except PointAtInfinityError:
        return u
    return DomainPoint(X, u.n, u.r, canonical=True)


def to_domain(point: BdiPoint) -> DomainPoint:
    """The realization map F(G) = [G31 - I; G21; G11] of a cone point."""
    n, r = point.n, point.r
    G = point.G
    U = np.vstack([G[n + r :, :n] - np.eye(n), G[n : n + r, :n], G[:n, :n]])
    return DomainPoint(U, n, r)


def leading_block(point: BdiPoint) -> np.ndarray:
    """The leading n x n block of a cone point (its block-Gauss h)."""
    return linalg.symmetrize(point.G[: point.n, : point.n])


def isometry_generator(n, r, S) -> np.ndarray:
    """An element X = S J of the isometry algebra, S skew of size 2n+r.

    exp(t X) preserves both the cone (via g . G = g^{-T} G g^{-1}) and the
    domain (via [U] -> [g U]).
    """
    S = linalg.require_skew(S, name="S")
    if S.shape[0] != 2 * n + r:
        raise ValidationError("skew seed has the wrong size")
    return S @ j_reflection(n, r)


def cone_action(g, point: BdiPoint) -> BdiPoint:
    """g . G = g^{-T} G g^{-1} for an isometry g."""
    ginv = np.linalg.inv(g)
    return BdiPoint(linalg.symmetrize(ginv.T @ point.G @ ginv), point.n, point.r)


def domain_action(g, u: DomainPoint) -> DomainPoint:
    """[U] -> [g U]."""
    return DomainPoint(np.asarray(g) @ u.U, u.n, u.r)


def _orbit_point(gen: BdiGenerator, base: DomainPoint, s) -> DomainPoint:
    g = linalg.expm(float(s) * gen.embed())
    return DomainPoint(g @ base.U, gen.n, gen.r)


def _taylor_fit(phi, step=1e-3):
    """First and second s=0 Taylor coefficients of a matrix curve.

    Central differences at {+-h, +-2h} combined by Richardson extrapolation;
    the second coefficient returned is phi''(0), i.e. twice the s^2 series
    coefficient's denominator convention phi = phi'(0) s + phi''(0) s^2/2.
    """
    f0 = phi(0.0)

    def d1(h):
        return (phi(h) - phi(-h)) / (2 * h)

    def d2(h):
        return (phi(h) - 2 * f0 + phi(-h)) / (h * h)

    order1 = (4.0 * d1(step) - d1(2 * step)) / 3.0
    order2 = (4.0 * d2(step) - d2(2 * step)) / 3.0
    return order1, order2


def taylor_delta_fit(gen: BdiGenerator, step=1e-3):
    """Fitted expansion of s -> delta(w, exp(sB) w) at the boundary basepoint.

    Returns (order1, order2) which match (-c, a a^T - b c - c b) for a
    generator B(b, a, c), to finite-difference accuracy (about 1e-4).
    """
    w = shilov_basepoint(gen.n, gen.r)

    def phi(s):
        return delta(w, _orbit_point(gen, w, s))

    return _taylor_fit(phi, step=step)


def delta_pathway_h(gen: BdiGenerator, s) -> np.ndarray:
    """h(s) = delta(exp(sB) u0, exp(sB) u0)^{-1} on the Siegel side."""
    u = _orbit_point(gen, siegel_basepoint(gen.n, gen.r), s)
    return linalg.spd_inverse(linalg.symmetrize(delta(u, u)))


def delta_bratu_point(gen: BdiGenerator, s, step=1e-2) -> tuple[np.ndarray, float]:
    """h(s) of the kernel pathway and its residual for (h'h^{-1})' = 2(aa^T)h^{-1}.

    Derivatives by finite differences; the analytic route lives in the bdi
    module through the half-scaling h = (1/2) htilde with htilde the
    block-Gauss solution of the generator -2B.
    """
    from . import oracle

    aat2 = 2.0 * (gen.a @ gen.a.T)

    def hfun(t):
        return delta_pathway_h(gen, t)

    def rhs(t):
        return aat2 @ linalg.spd_inverse(hfun(t))

    h = hfun(s)
    return h, oracle.log_derivative_residual(hfun, rhs, s, step=step)


def delta_bratu_solution(gen: BdiGenerator, grid, step=1e-2) -> Trajectory:
    """Kernel-pathway Bratu solution h(s) with finite-difference residuals.

    Requires c = 0 (the kernel pathway only produces Bratu solutions for
    generators with vanishing skew block).
    """
    if linalg.max_norm(gen.c) != 0.0:
        raise PreconditionError("delta_bratu_solution needs c = 0")
    grid = np.asarray(grid, dtype=float)
    hs, res = [], []
    for s in grid:
        h, rnorm = delta_bratu_point(gen, s, step=step)
        hs.append(h)
        res.append(rnorm)
    return Trajectory(grid, np.array(hs), {"bratu2": np.array(res)})


def half_gauss_h(gen: BdiGenerator, s) -> np.ndarray:
    """(1/2) htilde(s) where htilde is the block-Gauss h of exp(-2sB).

    The kernel pathway equals this exactly; it is the cross-check used by
    the tests and the verification suites.
    """
    return 0.5 * block_gauss(exp_trajectory(gen.scaled(-2.0), s)).h


def cayley_map(u: DomainPoint) -> DomainPoint:
    """Bounded-side image [A U] of a Siegel-side point."""
    return DomainPoint(cayley_matrix(u.n, u.r) @ u.U, u.n, u.r)


def psi(v1: DomainPoint, v2: DomainPoint) -> np.ndarray:
    """Bounded-side kernel; psi(A u1, A u2) = delta(u1, u2)."""
    n, r = v1.n, v1.r
    if (v2.n, v2.r) != (n, r):
        raise ValidationError("kernel arguments have mismatched block sizes")
    invsqrt2 = 1.0 / math.sqrt(2.0)

    def normalize(v):
        b1, _, b3 = v.blocks()
        return _normalize(v.U, invsqrt2 * (b3 - b1), "the bounded frame")

    X1, X2 = normalize(v1), normalize(v2)
    return X1.T @ indefinite_form(n, r) @ X2


def bounded_slack(v: DomainPoint) -> np.ndarray:
    """Membership slack I - V2^T V2 - V3^T V3 of the first-block-normalized rep."""
    b1, _, _ = v.blocks()
    X = _normalize(v.U, b1, "the bounded frame")
    n, r = v.n, v.r
    V2, V3 = X[n : n + r], X[n + r :]
    return linalg.symmetrize(np.eye(n) - V2.T @ V2 - V3.T @ V3)


@dataclass(frozen=True)
class BoundedGenerator:
    """Bounded-side generator [[0, C^T], [C, 0]] with C of shape (n+r, n)."""

    C: np.ndarray
    n: int
    r: int

    def __post_init__(self):
        C = linalg.require_finite(np.asarray(self.C, dtype=float), "C")
        if C.shape != (self.n + self.r, self.n):
            raise ValidationError(
                f"C has shape {C.shape}, expected ({self.n + self.r}, {self.n})"
            )
        object.__setattr__(self, "C", C)

    def embed(self) -> np.ndarray:
        n, r = self.n, self.r
        B = np.zeros((2 * n + r, 2 * n + r))
        B[:n, n:] = self.C.T
        B[n:, :n] = self.C
        return B

    @classmethod
    def from_matrix(cls, B, n) -> "BoundedGenerator":
        """Validate the off-diagonal shape of an embedded matrix and wrap it."""
        B = linalg.require_symmetric(B, name="bounded generator")
        N = B.shape[0]
        r = N - 2 * n
        if r < 0:
            raise ValidationError("matrix too small for the requested block size")
        scale = max(1.0, linalg.max_norm(B))
        if (
            linalg.max_norm(B[:n, :n]) > 1e-12 * scale
            or linalg.max_norm(B[n:, n:]) > 1e-12 * scale
        ):
            raise ValidationError("matrix does not have the off-diagonal block shape")
        return cls(B[n:, :n].copy(), n, r)

    @classmethod
    def from_bdi(cls, gen: BdiGenerator) -> "BoundedGenerator":
        """Conjugate a cone generator into the bounded frame: A B A^T."""
        A = cayley_matrix(gen.n, gen.r)
        return cls.from_matrix(A @ gen.embed() @ A.T, gen.n)


@dataclass(frozen=True)
class SvdFactors:
    """SVD of the C block arranged for the closed-form solution.

    ``left`` is the completed orthogonal factor with the singular directions
    in its trailing n columns, so C = left @ [[0], [diag(sigma)]] @ q^T. The
    views p (bottom-right n x n) and p3 (top-right r x n) are the blocks
    entering the closed form. sigma may contain zeros and repeats.
    """

    left: np.ndarray
    sigma: np.ndarray
    q: np.ndarray
    n: int
    r: int

    @property
    def p(self) -> np.ndarray:
        return self.left[self.r :, self.r :]

    @property
    def p3(self) -> np.ndarray:
        return self.left[: self.r, self.r :]


def generator_svd(gen: BoundedGenerator) -> SvdFactors:
    """Factor C and validate orthogonality and reconstruction."""
    left, sigma, q = linalg.svd_bottom(gen.C)
    nr = gen.n + gen.r
    ortho = linalg.max_norm(left.T @ left - np.eye(nr))
    if ortho > 1e-12:
        raise ValidationError(f"left SVD factor not orthogonal (defect {ortho:.3e})")
    rebuilt = left @ linalg.bottom_embed(sigma, gen.r) @ q.T
    defect = linalg.max_norm(rebuilt - gen.C)
    if defect > 1e-11 * max(1.0, linalg.max_norm(gen.C)):
        raise ValidationError(f"SVD reconstruction failed (defect {defect:.3e})")
    return SvdFactors(left, sigma, q, gen.n, gen.r)


def closed_form_from_factors(p, q, sigma, grid) -> Trajectory:
    """h(s) = (1/2) e(s) e(s)^T with e(s) = p sh(s sigma) - q ch(s sigma).

    The result only depends on the factored matrix C, not on the particular
    SVD: simultaneous column sign flips or permutations of (p, q, sigma),
    rotations inside repeated-sigma blocks, and independent rotations of the
    q columns belonging to zero singular values all leave h unchanged.
    """
    grid = np.asarray(grid, dtype=float)
    hs = []
    for s in grid:
        ch, sh = linalg.hyperbolics(sigma, s)
        e = p @ sh - q @ ch
        hs.append(linalg.symmetrize(0.5 * (e @ e.T)))
    return Trajectory(grid, np.array(hs))


def closed_form_h(gen: BoundedGenerator, grid) -> Trajectory:
    """Closed-form kernel-pathway solution on the bounded side."""
    f = generator_svd(gen)
    return closed_form_from_factors(f.p, f.q, f.sigma, grid)


def psi_pathway_h(gen: BoundedGenerator, grid) -> Trajectory:
    """h(s) = psi(exp(sB) v0, exp(sB) v0)^{-1}, the direct kernel evaluation.

    Serves as the independent oracle for the closed form.
    """
    grid = np.asarray(grid, dtype=float)
    n, r = gen.n, gen.r
    B = gen.embed()
    V0 = bounded_basepoint(n, r).U
    hs = []
    for s in grid:
        v = DomainPoint(linalg.expm(float(s) * B) @ V0, n, r)
        hs.append(linalg.spd_inverse(linalg.symmetrize(psi(v, v))))
    return Trajectory(grid, np.array(hs))


def taylor_psi_fit(gen: BoundedGenerator, step=1e-3):
    """Fitted expansion of s -> psi(z, exp(sB) z) at the bounded boundary point.

    Used to verify, per instance, the quadratic-leading-term hypothesis of
    the bounded-side Bratu statement.
    """
    n, r = gen.n, gen.r
    z = bounded_shilov(n, r)
    B = gen.embed()

    def phi(s):
        v = DomainPoint(linalg.expm(float(s) * B) @ z.U, n, r)
        return psi(z, v)

    return _taylor_fit(phi, step=step)


def power_series_h(gen: BoundedGenerator, order) -> list[np.ndarray]:
    """Taylor coefficients of the closed-form h(s) through the given order.

    Writing 2 h(s) in double-angle form,

        2 h(s) = I + (1/2) q (ch(2 s sigma) - I) q^T
                   + (1/2) p (ch(2 s sigma) - I) p^T
                   - (1/2) (q sh(2 s sigma) p^T + p sh(2 s sigma) q^T),

    the s^k coefficient for k >= 1 is

        (2^k / (4 k!)) * (q sigma^k q^T + p sigma^k p^T)        (k even)
        -(2^k / (4 k!)) * (q sigma^k p^T + p sigma^k q^T)       (k odd)

    and the constant term is I/2. Even coefficients are positive
    semidefinite combinations, odd ones are the mixed terms.
    """
    order = int(order)
    if order < 1:
        raise ValidationError("series order must be at least 1")
    f = generator_svd(gen)
    p, q, sigma = f.p, f.q, f.sigma
    coeffs = [0.5 * np.eye(gen.n)]
    fact = 1.0
    for k in range(1, order + 1):
        fact *= k
        D = np.diag(sigma**k) * (2.0**k) / (4.0 * fact)
        if k % 2 == 0:
            coeffs.append(q @ D @ q.T + p @ D @ p.T)
        else:
            coeffs.append(-(q @ D @ p.T + p @ D @ q.T))
    return coeffs


def eval_power_series(coeffs, s) -> np.ndarray:
    """Evaluate a coefficient list at s by Horner's rule."""
    s = float(s)
    acc = np.zeros_like(coeffs[-1])
    for c in reversed(coeffs):
        acc = c + s * acc
    return acc
