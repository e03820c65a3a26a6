"""
Landmark covariance propagation.

For static landmarks observed through a block-diagonal information matrix
the covariance stays block diagonal, and each 2×2 block Σ⁽ʲ⁾ is stored as
the triple σ⁽ʲ⁾ = (Σ₁₁, Σ₁₂, Σ₂₂) (``vecbl``). Each block evolves by

    σ⁽ʲ⁾ ← ḡ(σ⁽ʲ⁾, m⁽ʲ⁾(x)),   m = (M̄₁₁, M̄₁₂, M̄₂₂),

with the closed forms implemented in ``riccati_block_vector``. The general
matrix map A(Σ⁻¹ + M)⁻¹Aᵀ + Ξ is kept for reference checks.
"""

import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg

from icr_slam.errors import InvalidInputError, NumericalError
from icr_slam.geometry.se2 import PoseLike
from icr_slam.linalg import is_psd, is_spd, symmetrize
from icr_slam.sensing.fov_sensing import (
    SensorModel,
    info_vector,
    info_vector_gradient,
    landmark_array,
)

logger = logging.getLogger(__name__)

# Gradient of tr(Σ⁽ʲ⁾) with respect to σ⁽ʲ⁾
TRACE_WEIGHTS = np.array([1.0, 0.0, 1.0])


def riccati_general(sigma: np.ndarray, m: np.ndarray, a: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Σ⁺ = A (Σ⁻¹ + M)⁻¹ Aᵀ + Ξ.

    Args:
        sigma: Prior covariance (SPD)
        m: Sensor information matrix (PSD)
        a: Target transition matrix
        xi: Target process noise (PSD)

    Returns:
        Propagated covariance, symmetrized

    Raises:
        InvalidInputError: If sigma is not SPD or m is not PSD
    """
    sigma = np.asarray(sigma, dtype=float)
    m = np.asarray(m, dtype=float)
    if not is_spd(sigma):
        raise InvalidInputError("Sigma must be symmetric positive definite")
    if not is_psd(m):
        raise InvalidInputError("M must be symmetric positive semidefinite")
    n = sigma.shape[0]
    sigma_inv = scipy.linalg.solve(sigma, np.eye(n), assume_a="pos")
    posterior = scipy.linalg.solve(symmetrize(sigma_inv + m), np.eye(n), assume_a="pos")
    return symmetrize(a @ posterior @ a.T + xi)


def check_cov_vector(sigma: np.ndarray) -> np.ndarray:
    """Validate a covariance vector (length 3·n_l with SPD triples).

    Returns:
        The vector as a float array

    Raises:
        InvalidInputError: If a triple is not positive definite
    """
    sigma = np.asarray(sigma, dtype=float).reshape(-1)
    if sigma.size == 0 or sigma.size % 3 != 0:
        raise InvalidInputError("covariance vector length must be a positive multiple of 3")
    triples = sigma.reshape(-1, 3)
    s1, s2, s3 = triples.T
    if not (np.all(s1 > 0) and np.all(s3 > 0) and np.all(s1 * s3 - s2 * s2 > 0)):
        raise InvalidInputError("covariance vector contains a non positive definite block")
    return sigma


def vecbl(blocks: np.ndarray) -> np.ndarray:
    """Stack 2×2 SPD blocks of shape (n_l, 2, 2) into (Σ₁₁, Σ₁₂, Σ₂₂) triples."""
    blocks = np.asarray(blocks, dtype=float)
    if blocks.ndim == 2:
        blocks = blocks[None]
    if blocks.ndim != 3 or blocks.shape[1:] != (2, 2):
        raise InvalidInputError("covariance blocks must have shape (n_l, 2, 2)")
    if np.any(np.abs(blocks[:, 0, 1] - blocks[:, 1, 0]) > 1e-12):
        raise InvalidInputError("covariance blocks must be symmetric")
    sigma = np.stack([blocks[:, 0, 0], blocks[:, 0, 1], blocks[:, 1, 1]], axis=1).reshape(-1)
    return check_cov_vector(sigma)


def unvecbl(sigma: np.ndarray) -> np.ndarray:
    """Inverse of ``vecbl``: triples back to an (n_l, 2, 2) block array."""
    triples = check_cov_vector(sigma).reshape(-1, 3)
    blocks = np.empty((triples.shape[0], 2, 2))
    blocks[:, 0, 0] = triples[:, 0]
    blocks[:, 0, 1] = blocks[:, 1, 0] = triples[:, 1]
    blocks[:, 1, 1] = triples[:, 2]
    return blocks


def block_trace(sigma: np.ndarray) -> float:
    """Trace of the block-diagonal covariance, Σⱼ σ₁⁽ʲ⁾ + σ₃⁽ʲ⁾."""
    triples = np.asarray(sigma, dtype=float).reshape(-1, 3)
    return float(np.sum(triples[:, 0] + triples[:, 2]))


def block_logdet(sigma: np.ndarray) -> float:
    """log det of the block-diagonal covariance (reporting only)."""
    triples = np.asarray(sigma, dtype=float).reshape(-1, 3)
    return float(np.sum(np.log(triples[:, 0] * triples[:, 2] - triples[:, 1] ** 2)))


def _normalizer(s, m) -> float:
    s1, s2, s3 = s
    m1, m2, m3 = m
    return (s2 * s2 * (m2 * m2 - m1 * m3) + 2.0 * s2 * m2 + s3 * m3
            + s1 * (m1 * (s3 * m3 + 1.0) - s3 * m2 * m2) + 1.0)


def riccati_block_vector(sigma: np.ndarray, m: np.ndarray) -> np.ndarray:
    """One block of the vectorized Riccati update, ḡ(σ, m).

    Args:
        sigma: (σ₁, σ₂, σ₃) of a positive definite block
        m: (m₁, m₂, m₃) of the information block

    Returns:
        The updated triple

    Raises:
        NumericalError: If the normalizer f(σ, m) is not positive
    """
    s1, s2, s3 = np.asarray(sigma, dtype=float)
    m1, m2, m3 = np.asarray(m, dtype=float)
    f = _normalizer((s1, s2, s3), (m1, m2, m3))
    if not f > 0:
        raise NumericalError(f"Riccati normalizer f = {f:.3e} is not positive", module="covariance_dynamics")
    det_s = s1 * s3 - s2 * s2
    return np.array([
        (s1 + det_s * m3) / f,
        (s2 - det_s * m2) / f,
        (s3 + det_s * m1) / f,
    ])


def riccati_block_jacobians(sigma: np.ndarray, m: np.ndarray):
    """Closed-form ∂ḡ/∂σ and ∂ḡ/∂m of one block (each 3×3).

    Returns:
        Tuple (dg_dsigma, dg_dm)
    """
    s1, s2, s3 = np.asarray(sigma, dtype=float)
    m1, m2, m3 = np.asarray(m, dtype=float)
    f = _normalizer((s1, s2, s3), (m1, m2, m3))
    if not f > 0:
        raise NumericalError(f"Riccati normalizer f = {f:.3e} is not positive", module="covariance_dynamics")
    g = riccati_block_vector((s1, s2, s3), (m1, m2, m3))
    det_s = s1 * s3 - s2 * s2
    det_m = m1 * m3 - m2 * m2

    df_dsigma = np.array([m1 + s3 * det_m, 2.0 * m2 - 2.0 * s2 * det_m, m3 + s1 * det_m])
    r = np.array([
        [1.0 + s3 * m3, -2.0 * s2 * m3, s1 * m3],
        [-s3 * m2, 1.0 + 2.0 * s2 * m2, -s1 * m2],
        [s3 * m1, -2.0 * s2 * m1, 1.0 + s1 * m1],
    ])
    dg_dsigma = (r - np.outer(g, df_dsigma)) / f

    df_dm = np.array([s1 + det_s * m3, 2.0 * s2 - 2.0 * det_s * m2, s3 + det_s * m1])
    r_tilde = np.array([
        [0.0, 0.0, 1.0],
        [0.0, -1.0, 0.0],
        [1.0, 0.0, 0.0],
    ])
    dg_dm = (det_s * r_tilde - np.outer(g, df_dm)) / f
    return dg_dsigma, dg_dm


def riccati_step(sigma: np.ndarray, x_next: PoseLike, landmarks_hat, sensor: SensorModel) -> np.ndarray:
    """Full vector map g(σ, x): every landmark block updated with m⁽ʲ⁾(x_next)."""
    triples = check_cov_vector(sigma).reshape(-1, 3)
    landmarks_hat = landmark_array(landmarks_hat)
    if triples.shape[0] != landmarks_hat.shape[0]:
        raise InvalidInputError("covariance vector and landmark set sizes differ")
    out = np.empty_like(triples)
    for j, y in enumerate(landmarks_hat):
        out[j] = riccati_block_vector(triples[j], info_vector(x_next, y, sensor))
    return out.reshape(-1)


class RiccatiJacobians(NamedTuple):
    """F in block form (n_l, 3, 3) and G stacked as (3·n_l, 3)."""
    F_blocks: np.ndarray
    G: np.ndarray

    def F_dense(self) -> np.ndarray:
        return scipy.linalg.block_diag(*self.F_blocks)

    def apply_F_transpose(self, v: np.ndarray) -> np.ndarray:
        """Fᵀv computed block by block."""
        return np.einsum("jab,ja->jb", self.F_blocks, v.reshape(-1, 3)).reshape(-1)


def riccati_jacobians(sigma_k: np.ndarray, x_next: PoseLike, landmarks_hat, sensor: SensorModel) -> RiccatiJacobians:
    """F = ∂g/∂σ and G = ∂g/∂x at (σₖ, xₖ₊₁) with frozen landmark estimates."""
    triples = check_cov_vector(sigma_k).reshape(-1, 3)
    landmarks_hat = landmark_array(landmarks_hat)
    n_l = triples.shape[0]
    if n_l != landmarks_hat.shape[0]:
        raise InvalidInputError("covariance vector and landmark set sizes differ")
    f_blocks = np.empty((n_l, 3, 3))
    g = np.empty((3 * n_l, 3))
    for j, y in enumerate(landmarks_hat):
        m = info_vector(x_next, y, sensor)
        dg_dsigma, dg_dm = riccati_block_jacobians(triples[j], m)
        f_blocks[j] = dg_dsigma
        g[3 * j:3 * j + 3] = dg_dm @ info_vector_gradient(x_next, y, sensor)
    return RiccatiJacobians(F_blocks=f_blocks, G=g)
