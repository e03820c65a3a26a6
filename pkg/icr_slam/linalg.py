"""
Small dense linear-algebra helpers shared across modules.
"""

import logging

import numpy as np

from icr_slam.errors import InvalidInputError

logger = logging.getLogger(__name__)


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (A + Aᵀ) / 2."""
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def is_symmetric(a: np.ndarray, tol: float = 1e-10) -> bool:
    return a.shape[-1] == a.shape[-2] and bool(np.all(np.abs(a - np.swapaxes(a, -1, -2)) <= tol))


def is_spd(a: np.ndarray, tol: float = 1e-10) -> bool:
    """Check symmetric positive definiteness via Cholesky."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or not is_symmetric(a, tol):
        return False
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return False
    return True


def is_psd(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or not is_symmetric(a, tol):
        return False
    return bool(np.min(np.linalg.eigvalsh(symmetrize(a))) >= -tol)


def require_spd(a, name: str) -> np.ndarray:
    """Validate and return ``a`` as a float SPD matrix.

    Raises:
        InvalidInputError: If the matrix is not symmetric positive definite
    """
    a = np.asarray(a, dtype=float)
    if not is_spd(a):
        raise InvalidInputError(f"{name} must be symmetric positive definite")
    return a


def require_psd(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if not is_psd(a):
        raise InvalidInputError(f"{name} must be symmetric positive semidefinite")
    return a


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD matrix (zero eigenvalues allowed)."""
    eigvals, eigvecs = np.linalg.eigh(symmetrize(np.asarray(a, dtype=float)))
    return (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T


def clip_psd(a: np.ndarray, floor: float = 0.0) -> np.ndarray:
    """Symmetrize and clip negative eigenvalues to ``floor``.

    Returns:
        The nearest (Frobenius) PSD matrix when floor is 0
    """
    sym = symmetrize(a)
    eigvals, eigvecs = np.linalg.eigh(sym)
    if eigvals[0] >= floor:
        return sym
    if eigvals[0] < -1e-9:
        logger.warning(f"Clipping covariance eigenvalue {eigvals[0]:.3e} to {floor}")
    clipped = np.clip(eigvals, floor, None)
    return symmetrize((eigvecs * clipped) @ eigvecs.T)
