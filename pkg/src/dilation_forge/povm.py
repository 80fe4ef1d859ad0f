"""Discrete positive operator valued measures on point clouds in C^n."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import DimensionError, NotIsometry, NotNormal, NotNormalized, NotPSD, NotStrictContraction, ValidationError
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    dagger,
    hermitian_residual,
    isometry_residual,
    normality_residual,
    operator_norm,
    symmetric_renormalize,
)
from .monomials import eval_monomials, graded_multi_indices
from .spectrum import MatrixTuple, simultaneous_triangularize

STRICT_CONTRACTION_MARGIN = 1e-6


class DiscretePOVM:
    """Finitely many atoms ``(w_j, A_j)`` with ``w_j`` in C^n and ``A_j >= 0``.

    Parameters
    ----------
    points : array_like, shape (M, n) or (M,)
        Support points. A 1-D array is read as ``n = 1``.
    weights : array_like, shape (M, d, d)
        PSD weights; they should sum to the identity.
    """

    def __init__(self, points, weights):
        P = np.asarray(points, dtype=np.complex128)
        if P.ndim == 1:
            P = P[:, None]
        W = np.asarray(weights, dtype=np.complex128)
        if W.ndim == 1:
            W = W[:, None, None]
        if P.ndim != 2 or W.ndim != 3 or W.shape[1] != W.shape[2]:
            raise DimensionError(f"bad POVM shapes: points {P.shape}, weights {W.shape}")
        if P.shape[0] != W.shape[0] or P.shape[0] == 0:
            raise DimensionError(f"{P.shape[0]} points but {W.shape[0]} weights")
        if not (np.all(np.isfinite(P)) and np.all(np.isfinite(W))):
            raise ValueError("POVM has non-finite entries")
        self.points = P
        self.weights = W

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def d(self) -> int:
        return self.weights.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"DiscretePOVM(atoms={len(self)}, n={self.n}, d={self.d})"

    @property
    def total(self) -> np.ndarray:
        return self.weights.sum(axis=0)

    @property
    def normalization_residual(self) -> float:
        return operator_norm(self.total - np.eye(self.d))


class MomentBasis:
    """Complex monomials ``z^alpha`` and their real/imaginary split.

    Every non-constant monomial ``f`` contributes ``Re f`` and ``Im f`` to
    the real function list, in monomial order, so ``k = 2 (#monomials - 1)``
    and ``L = k + 1`` counts the constant as well.
    """

    def __init__(self, n: int, m: int):
        self.n = int(n)
        self.m = int(m)
        self.complex_monomials = graded_multi_indices(self.n, self.m)

    @classmethod
    def from_monomials(cls, n, monomials):
        obj = cls.__new__(cls)
        obj.n = int(n)
        obj.complex_monomials = [tuple(int(a) for a in alpha) for alpha in monomials]
        if any(len(a) != obj.n for a in obj.complex_monomials):
            raise DimensionError("monomial length differs from n")
        obj.m = max((sum(a) for a in obj.complex_monomials), default=0)
        return obj

    @property
    def has_constant(self) -> bool:
        return (0,) * self.n in self.complex_monomials

    @property
    def nonconstant(self) -> list:
        return [a for a in self.complex_monomials if any(a)]

    @property
    def real_functions(self) -> list:
        return [(alpha, part) for alpha in self.nonconstant for part in ("re", "im")]

    @property
    def k(self) -> int:
        return 2 * len(self.nonconstant)

    @property
    def L(self) -> int:
        return self.k + 1

    def real_values(self, points) -> np.ndarray:
        """``g_1..g_k`` evaluated at each point, shape ``(P, k)``."""
        vals = eval_monomials(points, self.nonconstant)
        out = np.empty((vals.shape[0], self.k))
        out[:, 0::2] = vals.real
        out[:, 1::2] = vals.imag
        return out

    def __repr__(self):
        return f"MomentBasis(n={self.n}, m={self.m}, monomials={len(self.complex_monomials)}, L={self.L})"


def full_basis_size(n, m):
    return comb(n + m, n)


@dataclass
class POVMReport:
    min_eigenvalue: float
    normalization_residual: float
    hermitian_residual: float
    merged: int
    povm: DiscretePOVM = field(repr=False)

    def to_dict(self):
        return {
            "atoms": len(self.povm),
            "min_eigenvalue": self.min_eigenvalue,
            "normalization_residual": self.normalization_residual,
            "hermitian_residual": self.hermitian_residual,
            "merged": self.merged,
        }


def cluster_labels(points, radius: float) -> np.ndarray:
    """Single-linkage clusters at ``radius``, labelled in lexicographic order.

    Labels depend only on the point set: cluster ``0`` contains the
    lexicographically smallest point, and so on.
    """
    Z = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    M = Z.shape[0]
    R = np.concatenate([Z.real, Z.imag], axis=1)
    pairs = cKDTree(R).query_pairs(radius, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(M, M))
    _, raw = connected_components(graph, directed=False)
    # lexicographic on (re_1, im_1, re_2, im_2, ...)
    keys = np.empty((M, 2 * Z.shape[1]))
    keys[:, 0::2] = Z.real
    keys[:, 1::2] = Z.imag
    order = np.lexsort(keys.T[::-1])
    relabel = {}
    for idx in order:
        relabel.setdefault(raw[idx], len(relabel))
    return np.array([relabel[r] for r in raw], dtype=int)


def _cluster_radius(points, tol):
    return tol.cluster_tol * (1.0 + float(np.max(np.abs(points), initial=0.0)))


def merge_duplicates(povm: DiscretePOVM, tol: ToleranceConfig = DEFAULT_TOL):
    """Merge atoms whose points coincide within ``cluster_tol``.

    Returns ``(merged_povm, merges)``. Merged atoms sit at the mean of
    their cluster and carry the summed weight.
    """
    labels = cluster_labels(povm.points, _cluster_radius(povm.points, tol))
    count = labels.max() + 1
    if count == len(povm):
        return povm, 0
    pts = np.zeros((count, povm.n), dtype=np.complex128)
    W = np.zeros((count, povm.d, povm.d), dtype=np.complex128)
    sizes = np.zeros(count)
    for j in range(len(povm)):
        c = labels[j]
        pts[c] += povm.points[j]
        W[c] += povm.weights[j]
        sizes[c] += 1
    return DiscretePOVM(pts / sizes[:, None], W), int(len(povm) - count)


def validate(povm: DiscretePOVM, tol: ToleranceConfig = DEFAULT_TOL) -> POVMReport:
    """Check Hermiticity, positivity and normalization of every weight.

    Raises
    ------
    NotPSD
        A weight is not Hermitian within ``unitary_tol`` or has an
        eigenvalue below ``-eig_floor``.
    NotNormalized
        ``||sum_j A_j - I|| > moment_tol``.
    """
    W = povm.weights
    herm = max(hermitian_residual(A) / (1.0 + operator_norm(A)) for A in W)
    if herm > tol.unitary_tol:
        raise NotPSD(f"weight not Hermitian (relative skew {herm:.3e})", hermitian_residual=herm)
    eigs = np.linalg.eigvalsh(0.5 * (W + dagger(W)))
    min_eig = float(eigs.min())
    if min_eig < -tol.eig_floor:
        j = int(np.argmin(eigs.min(axis=1)))
        raise NotPSD(f"weight {j} has eigenvalue {min_eig:.3e}", atom=j, min_eigenvalue=min_eig)
    resid = povm.normalization_residual
    if resid > tol.moment_tol:
        raise NotNormalized(f"weights sum to I only within {resid:.3e}", residual=resid)
    merged, count = merge_duplicates(povm, tol)
    return POVMReport(
        min_eigenvalue=min_eig,
        normalization_residual=resid,
        hermitian_residual=herm,
        merged=count,
        povm=merged,
    )


def moments(povm: DiscretePOVM, basis) -> np.ndarray:
    """``sum_j w_j^alpha A_j`` for every monomial of ``basis``.

    ``basis`` is a :class:`MomentBasis` or a list of multi-indices. Atoms
    are accumulated in ascending index order.
    """
    alphas = basis.complex_monomials if isinstance(basis, MomentBasis) else list(basis)
    vals = eval_monomials(povm.points, alphas)
    out = np.zeros((len(alphas), povm.d, povm.d), dtype=np.complex128)
    for j in range(len(povm)):
        out += vals[j][:, None, None] * povm.weights[j]
    return out


def compress_spectral(normal_tuple, embed, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> DiscretePOVM:
    """Compress the spectral measure of a commuting normal tuple by an isometry.

    The tuple is diagonalized simultaneously, equal joint eigenvalues are
    clustered into atoms ``w_j`` with spectral projections ``E_j``, and
    ``V^* E_j V`` becomes the weight at ``w_j``.

    Parameters
    ----------
    normal_tuple : MatrixTuple or sequence of matrices, each ``D x D``
    embed : array_like, shape (D, h)
        Isometry ``V`` from C^h into C^D.
    """
    tup = normal_tuple if isinstance(normal_tuple, MatrixTuple) else MatrixTuple(normal_tuple, tol)
    for i, N in enumerate(tup.matrices):
        r = normality_residual(N)
        if r > tol.unitary_tol * (1.0 + operator_norm(N) ** 2):
            raise NotNormal(f"operator {i} is not normal (residual {r:.3e})", index=i, residual=r)
    V = as_matrix(embed, square=False)
    if V.shape[0] != tup.d:
        raise DimensionError(f"embedding has {V.shape[0]} rows, tuple acts on C^{tup.d}")
    iso = isometry_residual(V)
    if iso > tol.unitary_tol:
        raise NotIsometry(f"embedding is not an isometry (residual {iso:.3e})", residual=iso)
    U, tri = simultaneous_triangularize(tup, tol, seed)
    diag = np.stack([np.diag(B) for B in tri.matrices], axis=1)
    labels = cluster_labels(diag, _cluster_radius(diag, tol))
    count = labels.max() + 1
    pts = np.zeros((count, tup.n), dtype=np.complex128)
    W = np.zeros((count, V.shape[1], V.shape[1]), dtype=np.complex128)
    for c in range(count):
        cols = np.flatnonzero(labels == c)
        pts[c] = diag[cols].mean(axis=0)
        B = dagger(V) @ U[:, cols]
        W[c] = B @ dagger(B)
    W = 0.5 * (W + dagger(W))
    return DiscretePOVM(pts, W)


def poisson_povm(T, resolution: int, tol: ToleranceConfig = DEFAULT_TOL) -> DiscretePOVM:
    """Discretized operator Poisson kernel of a strict contraction on the circle.

    Atoms sit at ``theta_r = 2 pi r / R`` with weights

        (1/R) (I - e^{i theta} T^*)^{-1} (I - T^* T) (I - e^{-i theta} T)^{-1},

    renormalized symmetrically so they sum to the identity.  The continuous
    kernel has ``z^k`` moment ``T^k``; the Riemann sum is exact up to
    aliasing terms of order ``||T^R||``, so ``R >= 8`` is advisable for
    anything but the trivial kernel.
    """
    T = as_matrix(T)
    R = int(resolution)
    if R < 1:
        raise ValidationError(f"resolution must be positive, got {R}", resolution=R)
    nrm = operator_norm(T)
    if nrm > 1.0 - STRICT_CONTRACTION_MARGIN:
        raise NotStrictContraction(f"||T|| = {nrm:.9f} is not below 1 - 1e-6", norm=nrm)
    d = T.shape[0]
    I = np.eye(d, dtype=np.complex128)
    points = np.exp(2j * np.pi * np.arange(R) / R)
    defect = I - dagger(T) @ T
    X = np.linalg.inv(I[None] - np.conj(points)[:, None, None] * T[None])
    W = dagger(X) @ defect @ X / R
    W = 0.5 * (W + dagger(W))
    W, _ = symmetric_renormalize(W, tol)
    return DiscretePOVM(points[:, None], W)
