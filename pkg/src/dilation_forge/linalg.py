"""Dense complex matrix substrate and the tolerance policy.

Every PSD computation in the package goes through :func:`psd_eigh`, a
Hermitian eigendecomposition that clamps round-off negatives to zero and
rejects genuinely indefinite input.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import DimensionError, NotHermitian, NotPSD


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances threaded explicitly through every operation.

    Attributes
    ----------
    eig_floor : float
        Eigenvalues in ``[-eig_floor, 0)`` are round-off and get clamped to
        zero; anything more negative is an error.
    null_sigma : float
        Relative singular value threshold below which a direction counts as
        numerically null.
    moment_tol : float
        Relative tolerance on matrix moments and on normalization.
    cluster_tol : float
        Relative radius for merging nearly equal points.
    unitary_tol : float
        Tolerance for isometry, projection and normality identities.
    commute_tol : float
        Relative tolerance on commutators used when building matrix tuples.
    """

    eig_floor: float = 1e-10
    null_sigma: float = 1e-9
    moment_tol: float = 1e-8
    cluster_tol: float = 1e-8
    unitary_tol: float = 1e-10
    commute_tol: float = 1e-9

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {f.name} must be strictly positive, got {value!r}")

    def override(self, **kwargs) -> "ToleranceConfig":
        """Return a copy with the non-None keyword values replaced."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOL = ToleranceConfig()


def as_matrix(M, square=True) -> np.ndarray:
    """Coerce to a 2-D complex128 array with finite entries."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


def operator_norm(M) -> float:
    """Largest singular value (0 for empty or zero input)."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim == 0:
        return float(abs(A))
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def commutator_residual(matrices) -> float:
    """Max over pairs of ||[A_i, A_j]|| / (1 + ||A_i|| ||A_j||)."""
    mats = [as_matrix(A) for A in matrices]
    if not mats:
        return 0.0
    d = mats[0].shape[0]
    for A in mats:
        if A.shape != (d, d):
            raise DimensionError(f"tuple mixes shapes {(d, d)} and {A.shape}")
    norms = [operator_norm(A) for A in mats]
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = operator_norm(mats[i] @ mats[j] - mats[j] @ mats[i])
            worst = max(worst, c / (1.0 + norms[i] * norms[j]))
    return worst


def commutes(matrices, tol: float) -> bool:
    """True iff every pair commutes within ``tol * (1 + ||A_i|| ||A_j||)``."""
    if hasattr(matrices, "matrices"):
        matrices = matrices.matrices
    return commutator_residual(matrices) <= tol


def hermitian_residual(M) -> float:
    A = as_matrix(M)
    return operator_norm(A - dagger(A))


def psd_eigh(M, tol: ToleranceConfig = DEFAULT_TOL):
    """Eigendecomposition of a PSD matrix with clamping.

    Returns ``(w, U)`` with ``w >= 0``. Raises :class:`NotHermitian` if the
    skew part exceeds ``unitary_tol * (1 + ||M||)`` and :class:`NotPSD` if
    the smallest eigenvalue is below ``-eig_floor``.
    """
    A = as_matrix(M)
    scale = 1.0 + operator_norm(A)
    skew = hermitian_residual(A)
    if skew > tol.unitary_tol * scale:
        raise NotHermitian(f"matrix is not Hermitian (skew residual {skew:.3e})", skew=skew)
    w, U = np.linalg.eigh(0.5 * (A + dagger(A)))
    if w.size and w[0] < -tol.eig_floor:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e} below -eig_floor", min_eig=float(w[0]))
    return np.clip(w, 0.0, None), U


def psd_sqrt(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root."""
    w, U = psd_eigh(M, tol)
    S = (U * np.sqrt(w)) @ dagger(U)
    return 0.5 * (S + dagger(S))


def psd_inv_sqrt(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Inverse square root of a positive definite matrix."""
    w, U = psd_eigh(M, tol)
    if w.size and w[0] <= tol.eig_floor:
        raise NotPSD(f"matrix is singular (min eigenvalue {w[0]:.3e})", min_eig=float(w[0]))
    S = (U / np.sqrt(w)) @ dagger(U)
    return 0.5 * (S + dagger(S))


def symmetric_renormalize(weights, tol: ToleranceConfig = DEFAULT_TOL):
    """Map each A_j to S^{-1/2} A_j S^{-1/2} where S = sum_j A_j.

    Returns ``(new_weights, residual)`` with ``residual = ||S - I||``.
    """
    W = np.asarray(weights, dtype=np.complex128)
    S = W.sum(axis=0)
    d = S.shape[0]
    residual = operator_norm(S - np.eye(d))
    R = psd_inv_sqrt(S, tol)
    out = R @ W @ R
    return 0.5 * (out + dagger(out)), residual


def isometry_residual(V) -> float:
    V = np.asarray(V, dtype=np.complex128)
    return operator_norm(dagger(V) @ V - np.eye(V.shape[1]))


def normality_residual(M) -> float:
    A = as_matrix(M)
    return operator_norm(A @ dagger(A) - dagger(A) @ A)


def complete_to_unitary(v: np.ndarray) -> np.ndarray:
    """Unitary matrix whose first column is the unit vector ``v``."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    d = v.size
    Q, _ = np.linalg.qr(np.column_stack([v, np.eye(d, dtype=np.complex128)]))
    # QR may flip the phase of the first column; restore it.
    phase = np.vdot(Q[:, 0], v)
    Q[:, 0] *= phase / abs(phase)
    return Q[:, :d]


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph
