"""Finite Naimark dilation of a resolution of the identity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotNormalized
from .linalg import DEFAULT_TOL, ToleranceConfig, dagger, operator_norm, psd_sqrt


@dataclass
class NaimarkDilation:
    """Isometry ``V: C^d -> C^{M d}`` and block coordinate projections.

    ``E_j`` projects onto the j-th block of ``d`` coordinates, so
    ``V^* E_j V = A_j`` when the j-th block of ``V`` is ``A_j^{1/2}``.
    """

    V: np.ndarray
    M: int
    d: int

    @property
    def D(self) -> int:
        return self.M * self.d

    def block(self, j: int) -> slice:
        return slice(j * self.d, (j + 1) * self.d)

    def projection_indices(self, j: int) -> list[int]:
        return list(range(j * self.d, (j + 1) * self.d))

    def projection(self, j: int) -> np.ndarray:
        E = np.zeros((self.D, self.D), dtype=np.complex128)
        s = self.block(j)
        E[s, s] = np.eye(self.d)
        return E

    @property
    def projections(self) -> list[np.ndarray]:
        return [self.projection(j) for j in range(self.M)]

    def compressed(self, j: int) -> np.ndarray:
        """``V^* E_j V``."""
        B = self.V[self.block(j)]
        return dagger(B) @ B

    def spectral_operator(self, values) -> np.ndarray:
        """``sum_j h(j) E_j`` for scalars ``values[j]`` (a diagonal matrix)."""
        values = np.asarray(values, dtype=np.complex128)
        return np.diag(np.repeat(values, self.d))

    def projection_diagonals(self) -> np.ndarray:
        """Row ``j`` is the diagonal of ``E_j``; shape ``(M, D)``."""
        diag = np.zeros((self.M, self.D))
        for j in range(self.M):
            diag[j, self.block(j)] = 1.0
        return diag

    def residuals(self) -> dict:
        """Isometry, projection and reconstruction residuals.

        The ``E_j`` are diagonal, so every operator norm below is a max of
        absolute values of diagonal entries and no dense ``D x D`` matrix
        is formed.
        """
        e = self.projection_diagonals()
        # ||E_j E_l|| for j != l is the largest product of the two biggest
        # |entries| in any column
        top = -np.sort(-np.abs(e), axis=0)
        orth = float(np.max(top[0] * top[1])) if self.M > 1 else 0.0
        return {
            "isometry": operator_norm(dagger(self.V) @ self.V - np.eye(self.d)),
            "idempotent": float(np.max(np.abs(e * e - e))),
            "hermitian": float(np.max(np.abs(e - np.conj(e)))),
            "orthogonal": orth,
            "resolution": float(np.max(np.abs(e.sum(axis=0) - 1.0))),
        }


def naimark(weights, tol: ToleranceConfig = DEFAULT_TOL) -> NaimarkDilation:
    """Dilate PSD weights summing to the identity to a projection valued measure.

    Parameters
    ----------
    weights : array_like, shape (M, d, d)
        Each weight PSD up to ``eig_floor``; ``||sum A_j - I|| <= moment_tol``.

    Returns
    -------
    NaimarkDilation
        ``V`` stacks ``A_j^{1/2}`` vertically; dimension ``D = M d``.
    """
    W = np.asarray(weights, dtype=np.complex128)
    if W.ndim == 2:
        W = W[None]
    if W.ndim != 3 or W.shape[1] != W.shape[2]:
        raise DimensionError(f"weights must have shape (M, d, d), got {W.shape}")
    M, d = W.shape[0], W.shape[1]
    resid = operator_norm(W.sum(axis=0) - np.eye(d))
    if resid > tol.moment_tol:
        raise NotNormalized(f"weights sum to I only within {resid:.3e}", residual=resid)
    V = np.concatenate([psd_sqrt(A, tol) for A in W], axis=0)
    return NaimarkDilation(V=V, M=M, d=d)
