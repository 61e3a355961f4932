"""Dense matrix kernel.

Small dense real matrices (complex only where a caller genuinely needs it).
Everything here is a pure function; tolerances are relative to the entrywise
max-norm of the inputs unless a docstring says otherwise.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import ValidationError


def max_norm(M) -> float:
    """Entrywise max-abs norm. Empty arrays have norm 0."""
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def require_finite(M, name="matrix") -> np.ndarray:
    M = np.asarray(M)
    if M.size and not np.all(np.isfinite(M)):
        raise ValidationError(f"{name} contains non-finite entries")
    return M


def require_square(M, name="matrix") -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {M.shape}")
    return M


def symmetrize(M) -> np.ndarray:
    """(M + M^T)/2, exactly symmetric in floating point."""
    M = np.asarray(M)
    return 0.5 * (M + M.T)


def skew_part(M) -> np.ndarray:
    """(M - M^T)/2, exactly skew with zero diagonal."""
    M = np.asarray(M)
    return 0.5 * (M - M.T)


def require_symmetric(M, tol=1e-13, name="matrix") -> np.ndarray:
    """Validate near-symmetry and return an exactly symmetrized copy."""
    M = require_finite(require_square(M, name), name)
    defect = max_norm(M - M.T)
    if defect > tol * max(1.0, max_norm(M)):
        raise ValidationError(f"{name} is not symmetric (defect {defect:.3e})")
    return symmetrize(M)


def require_skew(M, tol=1e-13, name="matrix") -> np.ndarray:
    """Validate near-skewness and return an exactly skew-symmetrized copy."""
    M = require_finite(require_square(M, name), name)
    defect = max_norm(M + M.T)
    if defect > tol * max(1.0, max_norm(M)):
        raise ValidationError(f"{name} is not skew-symmetric (defect {defect:.3e})")
    return skew_part(M)


def expm(M) -> np.ndarray:
    """Matrix exponential.

    Scaling-and-squaring with a high-order Pade core (scipy). Relative
    accuracy is comfortably below 1e-12 for the norms used here (|M| <= 10).
    """
    M = require_finite(require_square(M), "expm argument")
    return scipy.linalg.expm(M)


def chol_is_spd(M, tol=1e-12) -> tuple[bool, int | None]:
    """Cholesky-based positive definiteness test for a symmetric matrix.

    Runs an LDL^T elimination and accepts the matrix iff every pivot exceeds
    ``tol * max_norm(M)``. Returns ``(True, None)`` on success, else
    ``(False, k)`` with ``k`` the 1-based index of the first failing pivot.
    Asymmetric input is rejected with a ValidationError.
    """
    M = require_symmetric(M, name="chol_is_spd argument")
    n = M.shape[0]
    thresh = tol * max_norm(M)
    A = M.copy()
    for k in range(n):
        piv = A[k, k]
        if not piv > thresh:
            return False, k + 1
        if k + 1 < n:
            col = A[k + 1 :, k] / piv
            A[k + 1 :, k + 1 :] -= np.outer(col, A[k + 1 :, k])
    return True, None


def is_spd(M, tol=1e-12) -> bool:
    ok, _ = chol_is_spd(M, tol=tol)
    return ok


def spd_inverse(M) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky solves.

    The result is exactly symmetrized. Raises ValidationError if the
    factorization fails.
    """
    M = require_symmetric(M, name="spd_inverse argument")
    try:
        cf = scipy.linalg.cho_factor(M, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ValidationError(f"matrix is not positive definite: {exc}") from exc
    inv = scipy.linalg.cho_solve(cf, np.eye(M.shape[0]), check_finite=False)
    return symmetrize(inv)


def solve_spd(M, B) -> np.ndarray:
    """Solve M X = B for symmetric positive definite M."""
    M = require_symmetric(M, name="solve_spd matrix")
    try:
        cf = scipy.linalg.cho_factor(M, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ValidationError(f"matrix is not positive definite: {exc}") from exc
    return scipy.linalg.cho_solve(cf, np.asarray(B, dtype=float), check_finite=False)


def svd_bottom(C) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD of a tall matrix, arranged with the singular block at the bottom.

    For C of shape (n+r, n) with r >= 0, returns ``(left, sigma, right)`` with

        C = left @ vstack([zeros((r, n)), diag(sigma)]) @ right.T,

    ``left`` orthogonal of size n+r, ``right`` orthogonal of size n, and
    ``sigma`` descending and nonnegative. The columns ``left[:, r:]`` carry the
    singular directions, so the trailing blocks of ``left`` line up with
    ``sigma`` and ``right``. C = 0 is fine (sigma = 0, factors arbitrary but
    orthogonal).

    Parameters
    ----------
    C : (n+r, n) real array, rows >= cols.
    """
    C = require_finite(np.asarray(C, dtype=float), "svd argument")
    if C.ndim != 2 or C.shape[0] < C.shape[1]:
        raise ValidationError(f"svd_bottom expects rows >= cols, got {C.shape}")
    rows, cols = C.shape
    r = rows - cols
    U, s, Vt = np.linalg.svd(C, full_matrices=True)
    # move the singular-direction columns of U behind the complement columns
    order = list(range(cols, rows)) + list(range(cols))
    left = U[:, order]
    return left, s, Vt.T


def bottom_embed(sigma, r) -> np.ndarray:
    """The (n+r, n) matrix vstack([0, diag(sigma)]) used with svd_bottom."""
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0]
    out = np.zeros((n + r, n))
    out[r:, :] = np.diag(sigma)
    return out


def hyperbolics(sigma, s) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise hyperbolic pair on a diagonal argument.

    Given diagonal entries ``sigma`` (a 1-D array, or a 2-D diagonal matrix)
    and a real scale ``s``, returns the diagonal matrices
    (cosh(s*sigma), sinh(s*sigma)). The pair satisfies ch^2 - sh^2 = I to
    rounding for moderate arguments.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim == 2:
        if max_norm(sigma - np.diag(np.diag(sigma))) != 0.0:
            raise ValidationError("hyperbolics expects a diagonal matrix")
        sigma = np.diag(sigma)
    elif sigma.ndim != 1:
        raise ValidationError("hyperbolics expects a vector or diagonal matrix")
    x = float(s) * sigma
    return np.diag(np.cosh(x)), np.diag(np.sinh(x))
