"""Joint spectra of commuting matrix tuples.

The joint spectrum of commuting ``d x d`` matrices ``A_1, ..., A_n`` is read
off the diagonals of a simultaneous unitary triangularization: the k-th
diagonal entries of ``U^* A_j U`` form the k-th joint eigenvalue.  The
Koszul complex gives an independent singularity test (the Taylor spectrum),
which in finite dimensions selects the same points.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
import scipy.linalg

from .errors import DimensionError, NotCommuting, TriangularizationFailed
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    commutator_residual,
    complete_to_unitary,
    dagger,
    operator_norm,
)

TRIANGULAR_RTOL = 1e-8


class MatrixTuple:
    """An ordered tuple of commuting ``d x d`` complex matrices.

    Parameters
    ----------
    matrices : sequence of array_like
        The operators ``A_1, ..., A_n``.
    tol : ToleranceConfig, optional
        ``tol.commute_tol`` bounds the normalized commutator residual.
    check : bool
        Set to False to skip the commutation check (the residual is still
        recorded).
    """

    def __init__(self, matrices, tol: ToleranceConfig = DEFAULT_TOL, check: bool = True):
        if isinstance(matrices, np.ndarray) and matrices.ndim == 2:
            matrices = [matrices]
        mats = [as_matrix(A) for A in matrices]
        if not mats:
            raise DimensionError("a matrix tuple needs at least one matrix")
        d = mats[0].shape[0]
        for A in mats:
            if A.shape != (d, d):
                raise DimensionError(f"tuple mixes shapes {(d, d)} and {A.shape}")
        self.matrices = np.stack(mats)
        self.commutation_residual = commutator_residual(mats)
        if check and self.commutation_residual > tol.commute_tol:
            raise NotCommuting(
                f"commutator residual {self.commutation_residual:.3e} exceeds {tol.commute_tol:.1e}",
                residual=self.commutation_residual,
            )

    @property
    def n(self) -> int:
        return self.matrices.shape[0]

    @property
    def d(self) -> int:
        return self.matrices.shape[1]

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return self.matrices[i]

    def __iter__(self):
        return iter(self.matrices)

    def __repr__(self):
        return f"MatrixTuple(n={self.n}, d={self.d}, residual={self.commutation_residual:.1e})"

    def conjugate(self, U) -> "MatrixTuple":
        """The tuple ``U^* A_j U``."""
        U = np.asarray(U, dtype=np.complex128)
        return MatrixTuple(dagger(U) @ self.matrices @ U, check=False)


@dataclass
class JointSpectrum:
    """The ``d`` joint eigenvalues (rows of ``points``, shape ``(d, n)``)."""

    points: np.ndarray

    def __len__(self):
        return self.points.shape[0]

    def coordinate(self, i: int) -> np.ndarray:
        return self.points[:, i]

    def distance_to(self, z) -> float:
        z = np.asarray(z, dtype=np.complex128).reshape(1, -1)
        return float(np.min(np.linalg.norm(self.points - z, axis=1)))


@dataclass
class KoszulComplex:
    """Dense boundary maps ``D^k : Lambda^k(C^d) -> Lambda^{k+1}(C^d)``.

    ``stage_maps[k]`` has shape ``(stage_dims[k+1], stage_dims[k])`` with
    ``stage_dims[k] = d * C(n, k)``.
    """

    stage_maps: list
    stage_dims: list

    def composition_residual(self) -> float:
        worst = 0.0
        for D0, D1 in zip(self.stage_maps, self.stage_maps[1:]):
            worst = max(worst, operator_norm(D1 @ D0))
        return worst


def _as_tuple(tup, tol) -> MatrixTuple:
    if isinstance(tup, MatrixTuple):
        if tup.commutation_residual > tol.commute_tol:
            raise NotCommuting(
                f"commutator residual {tup.commutation_residual:.3e} exceeds {tol.commute_tol:.1e}",
                residual=tup.commutation_residual,
            )
        return tup
    return MatrixTuple(tup, tol)


def lower_mass(M) -> float:
    return float(np.linalg.norm(np.tril(M, -1)))


def _is_triangular(conj, originals) -> bool:
    for B, A in zip(conj, originals):
        if lower_mass(B) > TRIANGULAR_RTOL * (1.0 + operator_norm(A)):
            return False
    return True


def _common_eigenvector(mats, tol) -> np.ndarray:
    # Intersect eigenspaces one operator at a time; each intermediate
    # subspace is invariant under the remaining (commuting) operators.
    d = mats[0].shape[0]
    W = np.eye(d, dtype=np.complex128)
    for A in mats:
        B = dagger(W) @ A @ W
        k = B.shape[0]
        ev = np.linalg.eigvals(B)
        lam = ev[np.lexsort((ev.imag, ev.real))][0]
        _, s, Vh = np.linalg.svd(B - lam * np.eye(k))
        thr = tol.null_sigma * (1.0 + operator_norm(B))
        keep = max(1, int(np.sum(s <= thr)))
        Y = dagger(Vh[k - keep:])
        W = W @ Y
    return W[:, 0] / np.linalg.norm(W[:, 0])


def _deflation_triangularize(mats, tol) -> np.ndarray:
    d = mats[0].shape[0]
    U = np.eye(d, dtype=np.complex128)
    work = [np.array(A) for A in mats]
    for start in range(d - 1):
        sub = [A[start:, start:] for A in work]
        v = _common_eigenvector(sub, tol)
        Q = np.eye(d, dtype=np.complex128)
        Q[start:, start:] = complete_to_unitary(v)
        U = U @ Q
        work = [dagger(Q) @ A @ Q for A in work]
    return U


def simultaneous_triangularize(tup, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0):
    """Unitary ``U`` making every ``U^* A_j U`` upper triangular.

    The Schur form of a random combination ``sum c_j A_j`` is tried first;
    if some conjugate is not triangular within ``1e-8 (1 + ||A_j||)`` the
    routine falls back to deflating one common eigenvector at a time.

    Returns
    -------
    U : ndarray, shape (d, d)
    triangular : MatrixTuple
        The conjugated tuple, entries below the diagonal left as computed.
    """
    tup = _as_tuple(tup, tol)
    mats = tup.matrices
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(tup.n) + 1j * rng.standard_normal(tup.n)
    C = np.tensordot(c, mats, axes=1)
    _, U = scipy.linalg.schur(C, output="complex")
    conj = dagger(U) @ mats @ U
    if not _is_triangular(conj, mats):
        U = _deflation_triangularize(list(mats), tol)
        conj = dagger(U) @ mats @ U
        if not _is_triangular(conj, mats):
            worst = max(lower_mass(B) / (1.0 + operator_norm(A)) for B, A in zip(conj, mats))
            raise TriangularizationFailed(
                f"relative strict-lower mass {worst:.3e} after deflation", residual=worst
            )
    return U, MatrixTuple(conj, check=False)


def joint_spectrum(tup, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> JointSpectrum:
    """Joint eigenvalues with multiplicity, in triangularization order."""
    _, tri = simultaneous_triangularize(tup, tol, seed)
    points = np.stack([np.diag(B) for B in tri.matrices], axis=1)
    return JointSpectrum(points=points)


def koszul_complex(tup, lam=None) -> KoszulComplex:
    """Koszul complex of ``A - lam`` on the basis ``e_{i_1} ... e_{i_k}``.

    ``D(x (x) e_I) = sum_i (A_i - lam_i) x (x) e_i e_I`` with
    ``e_i e_I = (-1)^{#{t in I : t < i}} e_{I + i}``.
    """
    mats = tup.matrices if isinstance(tup, MatrixTuple) else np.stack([as_matrix(A) for A in tup])
    n, d = mats.shape[0], mats.shape[1]
    lam = np.zeros(n) if lam is None else np.asarray(lam, dtype=np.complex128).reshape(n)
    shifted = mats - lam[:, None, None] * np.eye(d)
    subsets = [list(combinations(range(n), k)) for k in range(n + 1)]
    index = [{s: j for j, s in enumerate(level)} for level in subsets]
    maps = []
    for k in range(n):
        D = np.zeros((d * comb(n, k + 1), d * comb(n, k)), dtype=np.complex128)
        for col, I in enumerate(subsets[k]):
            for i in range(n):
                if i in I:
                    continue
                sign = -1.0 if sum(t < i for t in I) % 2 else 1.0
                row = index[k + 1][tuple(sorted(I + (i,)))]
                D[row * d:(row + 1) * d, col * d:(col + 1) * d] += sign * shifted[i]
        maps.append(D)
    return KoszulComplex(stage_maps=maps, stage_dims=[d * comb(n, k) for k in range(n + 1)])


def koszul_exactness(tup, lam, tol: ToleranceConfig = DEFAULT_TOL) -> list[dict]:
    """Per-stage rank bookkeeping for the Koszul complex of ``A - lam``.

    Stage ``k`` is exact iff ``nullity(D^k) == rank(D^{k-1})``, with
    singular values below ``null_sigma * (1 + max ||A_i - lam_i||)`` taken
    as zero.
    """
    tup = _as_tuple(tup, tol)
    K = koszul_complex(tup, lam)
    lam = np.asarray(lam, dtype=np.complex128).reshape(tup.n)
    scale = 1.0 + max(
        operator_norm(A - l * np.eye(tup.d)) for A, l in zip(tup.matrices, lam)
    )
    thr = tol.null_sigma * scale
    ranks = []
    smallest = []
    for D in K.stage_maps:
        s = np.linalg.svd(D, compute_uv=False)
        r = int(np.sum(s > thr))
        ranks.append(r)
        smallest.append(float(s[r - 1]) if r else 0.0)
    stages = []
    for k in range(tup.n + 1):
        dim = K.stage_dims[k]
        nullity = dim - ranks[k] if k < tup.n else dim
        incoming = ranks[k - 1] if k > 0 else 0
        stages.append(
            {
                "stage": k,
                "dim": dim,
                "nullity": nullity,
                "incoming_rank": incoming,
                "exact": nullity == incoming,
                "smallest_kept_sigma": smallest[k] if k < tup.n else None,
            }
        )
    return stages


def koszul_is_singular(tup, lam, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff the Koszul complex of ``A - lam`` fails to be exact."""
    return not all(stage["exact"] for stage in koszul_exactness(tup, lam, tol))
