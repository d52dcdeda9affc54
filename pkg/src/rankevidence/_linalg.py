"""Dense linear-algebra helpers shared across the package.

Positive-definite systems are always handled through a Cholesky factor, never
an explicit inverse.  Rank decisions use the scale-invariant threshold
``sigma_max * max(rows, cols) * machine_eps`` on singular values.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


class NumericalError(RuntimeError):
    """A matrix factorization failed; the message carries diagnostics."""


def symmetrize(M: np.ndarray) -> np.ndarray:
    """Return the symmetric part (M + M^T) / 2."""
    return 0.5 * (M + M.T)


def spd_cholesky(M: np.ndarray, *, context: str = "") -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive-definite matrix.

    The input is symmetrized first to absorb asymmetry from accumulated
    rounding.  No jitter is added: failure is surfaced as
    :class:`NumericalError` with shape and diagonal diagnostics rather than
    silently repaired.
    """
    M = symmetrize(np.asarray(M, dtype=float))
    try:
        return scipy.linalg.cholesky(M, lower=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        where = f" in {context}" if context else ""
        diag = np.diag(M)
        detail = (
            f"shape={M.shape}, finite={bool(np.isfinite(M).all())}, "
            f"diag=[{diag.min():.6g}, {diag.max():.6g}]"
            if diag.size
            else f"shape={M.shape}"
        )
        raise NumericalError(
            f"Cholesky factorization failed{where} ({detail}): {exc}"
        ) from exc


def chol_logdet(L: np.ndarray) -> float:
    """log det of the matrix whose lower Cholesky factor is ``L``."""
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def chol_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``M x = b`` given the lower Cholesky factor ``L`` of ``M``."""
    return scipy.linalg.cho_solve((L, True), b)


def rank_tolerance(singular_values: np.ndarray, shape: tuple[int, int]) -> float:
    """Threshold below which a singular value counts as zero."""
    if singular_values.size == 0:
        return 0.0
    return float(singular_values.max()) * max(shape) * np.finfo(float).eps


def numerical_rank(M: np.ndarray) -> int:
    """Numerical rank of a matrix via its singular value spectrum."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.count_nonzero(s > rank_tolerance(s, M.shape)))


def psd_spectral_rank(eigenvalues: np.ndarray, size: int) -> int:
    """Count of eigenvalues of a PSD matrix that are numerically nonzero.

    ``size`` is the relevant matrix dimension for noise scaling (eigenvalues
    of a computed Gram matrix carry rounding noise of order
    ``eig_max * eps``, not ``eps**2``).
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.size == 0:
        return 0
    top = float(eigenvalues.max())
    if top <= 0.0:
        return 0
    tol = top * size * np.finfo(float).eps
    return int(np.count_nonzero(eigenvalues > tol))
