"""Dense generalized symmetric eigenproblem ``K_tot phi = omega^2 M phi``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BuckledError, ModelError, NumericalError

RESIDUAL_RTOL = 1e-8
ORTHO_TOL = 1e-8
# Eigenvalues below -NEG_TOL * max|lambda| mean the prestress exceeds buckling.
NEG_TOL = 1e-10


@dataclass(frozen=True)
class ModalResult:
    frequencies: np.ndarray  # Hz, ascending
    shapes: np.ndarray  # columns, M-normalized
    residuals: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n_modes(self) -> int:
        return len(self.frequencies)


def _fix_signs(phi: np.ndarray) -> None:
    for j in range(phi.shape[1]):
        col = phi[:, j]
        big = np.flatnonzero(np.abs(col) > 1e-6 * np.abs(col).max())
        if big.size and col[big[0]] < 0:
            phi[:, j] = -col


def _ld_matmul(A, B):
    ld = np.longdouble
    return A.astype(ld) @ B.astype(ld)


def _refine(K, M, X, sweeps=2):
    """Subspace iteration with K^-1 started from the dense eigenvectors.

    The dense solve carries an absolute error of order eps * lambda_max, which
    is large relative to the lowest eigenvalues of micro-scale frames.  Inverse
    iteration restores their relative accuracy.  Returns None if ``K`` is not
    positive definite.
    """
    d = 1.0 / np.sqrt(np.diag(K))
    try:
        cf = scipy.linalg.cho_factor(K * d[:, None] * d[None, :])
    except np.linalg.LinAlgError:
        return None

    def solve(B):
        Y = d[:, None] * scipy.linalg.cho_solve(cf, d[:, None] * B)
        for _ in range(2):
            R = (B - _ld_matmul(K, Y)).astype(float)
            Y = Y + d[:, None] * scipy.linalg.cho_solve(cf, d[:, None] * R)
        return Y

    lam = None
    for _ in range(sweeps):
        X = solve(M @ X)
        Kr = (X.T @ _ld_matmul(K, X)).astype(float)
        Mr = (X.T @ _ld_matmul(M, X)).astype(float)
        lam, Q = scipy.linalg.eigh(0.5 * (Kr + Kr.T), 0.5 * (Mr + Mr.T))
        X = X @ Q
    return lam, X


def generalized_modes(K_tot, M, n_modes: int) -> ModalResult:
    """Lowest ``n_modes`` eigenpairs of the pencil ``(K_tot, M)``.

    A Jacobi-scaled dense solve supplies starting vectors, which are then
    polished by two sweeps of subspace iteration.  Shapes are mass-normalized
    with the first significant component positive.
    """
    K_tot = np.asarray(K_tot, dtype=float)
    M = np.asarray(M, dtype=float)
    n = K_tot.shape[0]
    if K_tot.shape != (n, n) or M.shape != (n, n):
        raise ModelError(f"matrix shapes differ: K{K_tot.shape}, M{M.shape}")
    if not 1 <= n_modes <= n:
        raise ModelError(f"n_modes must be in [1, {n}], got {n_modes}")
    dm = np.diag(M)
    if np.any(dm <= 0):
        raise NumericalError("mass matrix has a non-positive diagonal")
    s = 1.0 / np.sqrt(dm)
    Ks = K_tot * s[:, None] * s[None, :]
    Ms = M * s[:, None] * s[None, :]
    Ks = 0.5 * (Ks + Ks.T)
    Ms = 0.5 * (Ms + Ms.T)
    n_block = min(n, n_modes + 4)
    try:
        lam, v = scipy.linalg.eigh(Ks, Ms, subset_by_index=[0, n_block - 1])
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigen factorization failed: {exc}") from None
    if lam[0] < -NEG_TOL * np.abs(np.diag(Ks)).max():
        raise BuckledError(
            f"buckled configuration: prestress exceeds critical load (lambda_min = {lam[0]:.4g})"
        )
    phi = s[:, None] * v
    refined = _refine(K_tot, M, phi) if lam[0] > 0 else None
    if refined is not None:
        lam, phi = refined
    lam, phi = lam[:n_modes], phi[:, :n_modes]
    lam = np.clip(lam, 0.0, None)
    phi = phi / np.sqrt(np.einsum("ij,ij->j", phi, (M @ phi)))
    _fix_signs(phi)

    kphi = _ld_matmul(K_tot, phi)
    res = np.linalg.norm((kphi - _ld_matmul(M, phi) * lam).astype(float), axis=0)
    denom = np.linalg.norm(kphi.astype(float), axis=0)
    residuals = np.where(denom > 0, res / np.where(denom > 0, denom, 1.0), res)
    if not np.all(np.isfinite(residuals)):
        raise NumericalError("non-finite eigenvector residual")
    freqs = np.sqrt(lam) / (2.0 * math.pi)
    return ModalResult(freqs, phi, residuals, lam)


def orthonormality_error(result: ModalResult, M) -> float:
    """max |phi_i^T M phi_j - delta_ij| over the retained modes."""
    g = result.shapes.T @ np.asarray(M) @ result.shapes
    return float(np.abs(g - np.eye(g.shape[0])).max())
