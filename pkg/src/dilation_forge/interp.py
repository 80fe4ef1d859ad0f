"""Lower triangular Toeplitz matrices and the nilpotent shift."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import operator_norm


@dataclass
class LowerToeplitz:
    """``A[i, j] = a_{i-j}`` for ``i >= j``, zero above the diagonal."""

    symbol_coeffs: np.ndarray

    def __post_init__(self):
        self.symbol_coeffs = np.asarray(self.symbol_coeffs, dtype=np.complex128).reshape(-1)
        if self.symbol_coeffs.size == 0:
            raise ValueError("need at least one coefficient")

    @property
    def d(self) -> int:
        return self.symbol_coeffs.size

    def matrix(self) -> np.ndarray:
        d = self.d
        i, j = np.indices((d, d))
        A = np.zeros((d, d), dtype=np.complex128)
        lower = i >= j
        A[lower] = self.symbol_coeffs[(i - j)[lower]]
        return A

    @classmethod
    def from_matrix(cls, A, atol: float = 0.0) -> "LowerToeplitz":
        A = np.asarray(A, dtype=np.complex128)
        out = cls(A[:, 0])
        if not np.allclose(out.matrix(), A, rtol=0.0, atol=atol):
            raise ValueError("matrix is not lower triangular Toeplitz")
        return out

    def __matmul__(self, other: "LowerToeplitz") -> "LowerToeplitz":
        # truncated power series product
        return LowerToeplitz(np.convolve(self.symbol_coeffs, other.symbol_coeffs)[: self.d])

    def __add__(self, other: "LowerToeplitz") -> "LowerToeplitz":
        return LowerToeplitz(self.symbol_coeffs + other.symbol_coeffs)


def nilpotent_shift(d: int) -> np.ndarray:
    """The ``d x d`` matrix with ones on the subdiagonal."""
    if d < 1:
        raise ValueError(f"d must be at least 1, got {d}")
    return np.eye(d, k=-1, dtype=np.complex128)


def eval_symbol_at_shift(coeffs, d: int | None = None) -> np.ndarray:
    """``p(S_d) = sum_k a_k S_d^k`` for ``p(z) = a_0 + ... + a_{d-1} z^{d-1}``."""
    a = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    d = a.size if d is None else int(d)
    if a.size != d:
        raise ValueError(f"expected {d} coefficients, got {a.size}")
    S = nilpotent_shift(d)
    out = np.zeros((d, d), dtype=np.complex128)
    P = np.eye(d, dtype=np.complex128)
    for k in range(d):
        out += a[k] * P
        P = P @ S
    return out


def toeplitz_contraction_test(A: LowerToeplitz, tol: float = 1e-12) -> bool:
    """True iff ``||A|| <= 1 + tol``.

    For lower triangular Toeplitz matrices this is equivalent to the
    existence of a disc algebra function bounded by one whose first ``d``
    Taylor coefficients are the symbol coefficients; that function is not
    computed here.
    """
    M = A.matrix() if isinstance(A, LowerToeplitz) else np.asarray(A)
    return operator_norm(M) <= 1.0 + tol
