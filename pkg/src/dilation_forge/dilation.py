"""Normal X-m-dilations and related finite-dimensional checks.

The main entry point, :func:`normal_m_dilation`, turns a commuting tuple
``T`` and a POVM whose moments reproduce ``T`` into a commuting normal
tuple ``N`` on ``C^D`` and an isometry ``V`` such that
``T^alpha = V^* N^alpha V`` for every ``|alpha| <= m``:

1. reduce the POVM to finitely many atoms with :func:`cubature.reduce`,
2. dilate the atoms to orthogonal projections with :func:`naimark.naimark`,
3. set ``N_i = sum_j w_{i,j} E_j``.

The joint spectrum of ``N`` is the set of atoms, a subset of the POVM
support, so feeding POVMs supported in ``X`` keeps ``sigma(N)`` in ``X``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .cubature import reduce
from .errors import DegenerateCertificate, DimensionError, MomentMismatch, NotContraction, ValidationError
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    dagger,
    isometry_residual,
    normality_residual,
    operator_norm,
)
from .monomials import eval_monomials, graded_multi_indices, matrix_monomials
from .naimark import naimark
from .povm import DiscretePOVM, MomentBasis, moments
from .spectrum import MatrixTuple, joint_spectrum

VERIFY_TOL = 1e-6


def povm_fingerprint(povm: DiscretePOVM) -> str:
    """Stable content hash of a POVM, used to tie a dilation to its source."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(povm.points).tobytes())
    h.update(np.ascontiguousarray(povm.weights).tobytes())
    return h.hexdigest()[:16]


@dataclass
class MDilation:
    """A commuting normal tuple ``N`` on ``C^D`` with embedding ``V``.

    When built from a Naimark dilation, ``projection_indices[j]`` lists the
    coordinates of the block on which ``N`` acts as the scalar tuple
    ``support[j]``.
    """

    tuple_N: MatrixTuple
    V: np.ndarray
    m: int
    support: np.ndarray
    source_povm_id: str = ""
    projection_indices: list | None = None

    @property
    def dimension(self) -> int:
        return self.V.shape[0]

    @property
    def atoms(self) -> int:
        return self.support.shape[0]

    @classmethod
    def from_spectral(cls, support, projection_indices, V, m, source_povm_id=""):
        """Rebuild ``N_i = sum_j w_{i,j} E_j`` from coordinate projections."""
        support = np.asarray(support, dtype=np.complex128)
        V = np.asarray(V, dtype=np.complex128)
        D = V.shape[0]
        diag = np.zeros((support.shape[1], D), dtype=np.complex128)
        for w, idx in zip(support, projection_indices):
            diag[:, idx] = w[:, None]
        N = MatrixTuple([np.diag(row) for row in diag], check=False)
        return cls(N, V, int(m), support, source_povm_id, [list(map(int, i)) for i in projection_indices])


@dataclass
class VerificationReport:
    max_residual: float
    rows: list
    normality: list
    atoms: int
    dimension: int
    isometry: float = 0.0
    commutation: float = 0.0
    support_contained: bool = True
    support_distance: float = 0.0
    extra: dict = field(default_factory=dict)

    def passed(self, tol: float = VERIFY_TOL) -> bool:
        return self.max_residual <= tol and self.support_contained

    def to_dict(self):
        out = {
            "max_residual": self.max_residual,
            "rows": self.rows,
            "normality": self.normality,
            "atoms": self.atoms,
            "dimension": self.dimension,
            "isometry": self.isometry,
            "commutation": self.commutation,
            "support_contained": self.support_contained,
            "support_distance": self.support_distance,
        }
        out.update(self.extra)
        return out


def _tuple(T, tol):
    return T if isinstance(T, MatrixTuple) else MatrixTuple(T, tol)


def check_moment_compatibility(T: MatrixTuple, povm: DiscretePOVM, m: int, tol: ToleranceConfig = DEFAULT_TOL):
    """Worst relative gap between POVM moments and ``T^alpha``, ``|alpha| <= m``.

    Returns ``(worst_alpha, worst_relative_gap)``.
    """
    alphas = graded_multi_indices(T.n, m)
    mom = moments(povm, alphas)
    powers = matrix_monomials(T.matrices, alphas)
    worst, worst_alpha = 0.0, alphas[0]
    for alpha, A, B in zip(alphas, mom, powers):
        gap = operator_norm(A - B) / (1.0 + operator_norm(B))
        if gap > worst:
            worst, worst_alpha = gap, alpha
    return worst_alpha, worst


def normal_m_dilation(T, povm: DiscretePOVM, m: int, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> MDilation:
    """Build a normal X-m-dilation of ``T`` from a moment-matching POVM.

    Parameters
    ----------
    T : MatrixTuple or sequence of matrices
        Commuting ``d x d`` tuple, ``n`` operators.
    povm : DiscretePOVM
        ``n``-variate POVM with ``d x d`` weights whose ``z^alpha`` moments
        equal ``T^alpha`` for ``|alpha| <= m``.
    m : int
        Degree.

    Raises
    ------
    MomentMismatch
        The POVM does not reproduce ``T`` (reports the worst multi-index),
        or the finished dilation fails verification at ``1e-6``.
    """
    T = _tuple(T, tol)
    if povm.n != T.n or povm.d != T.d:
        raise DimensionError(f"POVM is (n={povm.n}, d={povm.d}) but T is (n={T.n}, d={T.d})")
    alpha, gap = check_moment_compatibility(T, povm, m, tol)
    if gap > tol.moment_tol:
        raise MomentMismatch(
            f"POVM moment for alpha={alpha} differs from T^alpha by {gap:.3e} (relative)",
            alpha=list(alpha),
            residual=gap,
        )
    reduced = reduce(povm, MomentBasis(T.n, m), tol)
    dil = naimark(reduced.weights, tol)
    result = MDilation.from_spectral(
        reduced.points,
        [dil.projection_indices(j) for j in range(dil.M)],
        dil.V,
        m,
        povm_fingerprint(povm),
    )
    rep = verify_m_dilation(T, result, m, tol, seed)
    if not rep.passed(VERIFY_TOL):
        raise MomentMismatch(
            f"dilation verification failed (max residual {rep.max_residual:.3e})",
            residual=rep.max_residual,
        )
    return result


def verify_m_dilation(T, dil: MDilation, m: int, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> VerificationReport:
    """Tabulate ``||T^alpha - V^* N^alpha V||`` for every ``|alpha| <= m``.

    Also reports normality residuals of each ``N_i`` and whether the joint
    spectrum of ``N`` lies in ``dil.support``.
    """
    T = T if isinstance(T, MatrixTuple) else MatrixTuple(T, check=False)
    N = dil.tuple_N
    V = np.asarray(dil.V, dtype=np.complex128)
    if N.n != T.n or V.shape != (N.d, T.d):
        raise DimensionError(
            f"inconsistent shapes: T is (n={T.n}, d={T.d}), N is (n={N.n}, D={N.d}), V is {V.shape}"
        )
    alphas = graded_multi_indices(T.n, m)
    lhs = matrix_monomials(T.matrices, alphas)
    rhs = dagger(V) @ matrix_monomials(N.matrices, alphas) @ V
    rows = []
    for alpha, A, B in zip(alphas, lhs, rhs):
        rows.append({"alpha": list(alpha), "residual": operator_norm(A - B)})
    normality = [normality_residual(Ni) for Ni in N.matrices]
    spec = joint_spectrum(N, tol.override(commute_tol=max(tol.commute_tol, N.commutation_residual)), seed)
    support = np.asarray(dil.support, dtype=np.complex128)
    dist = max(
        float(np.min(np.linalg.norm(support - p[None, :], axis=1))) for p in spec.points
    )
    radius = tol.cluster_tol * (1.0 + float(np.max(np.abs(support))))
    return VerificationReport(
        max_residual=max(r["residual"] for r in rows),
        rows=rows,
        normality=normality,
        atoms=dil.atoms,
        dimension=dil.dimension,
        isometry=isometry_residual(V),
        commutation=N.commutation_residual,
        support_contained=bool(dist <= radius),
        support_distance=dist,
    )


def unitary_1_dilation(T, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """The block unitary ``[[T, D_{T*}], [D_T, -T^*]]`` on ``C^d + C^d``.

    ``D_T = (I - T^*T)^{1/2}`` and ``D_{T*} = (I - TT^*)^{1/2}`` are formed
    from one singular value decomposition of ``T``, which keeps the
    intertwining ``T D_T = D_{T*} T`` exact to round-off even when ``T``
    has singular values equal to one.
    """
    T = as_matrix(T)
    W, s, Zh = np.linalg.svd(T)
    if s.size and s[0] > 1.0 + tol.eig_floor:
        raise NotContraction(f"||T|| = {s[0]:.12f} exceeds 1", norm=float(s[0]))
    s = np.minimum(s, 1.0)
    f = np.sqrt((1.0 - s) * (1.0 + s))
    Z = dagger(Zh)
    D_T = (Z * f) @ Zh
    D_Tstar = (W * f) @ dagger(W)
    D_T = 0.5 * (D_T + dagger(D_T))
    D_Tstar = 0.5 * (D_Tstar + dagger(D_Tstar))
    return np.block([[T, D_Tstar], [D_T, -dagger(T)]])


@dataclass
class FiniteXSet:
    """A finite set of pairwise distinct points in C^n (rows of ``points``)."""

    points: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.points, dtype=np.complex128)
        if P.ndim == 1:
            P = P[:, None]
        if P.ndim != 2 or P.shape[0] == 0:
            raise DimensionError(f"finite set needs shape (k, n) with k >= 1, got {P.shape}")
        if len({tuple(row) for row in P.tolist()}) != P.shape[0]:
            raise ValidationError("finite set has repeated points")
        self.points = P

    @property
    def n(self) -> int:
        return self.points.shape[1]


@dataclass
class ProductPolynomial:
    """``p(z) = prod_i (z_{coord_i} - root_i)``."""

    factors: list

    def __call__(self, points) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(points, dtype=np.complex128))
        out = np.ones(Z.shape[0], dtype=np.complex128)
        for coord, root in self.factors:
            out *= Z[:, coord] - root
        return out

    @property
    def degree(self) -> int:
        return len(self.factors)

    def to_dict(self):
        return {
            "factors": [
                {"coordinate": int(c), "root": [float(np.real(r)), float(np.imag(r))]}
                for c, r in self.factors
            ]
        }


def finite_hull_membership(X, z, tol: ToleranceConfig = DEFAULT_TOL):
    """Decide membership of ``z`` in the polynomial hull of a finite set.

    A finite set is its own hull, so ``z`` is inside iff it is (within
    ``cluster_tol``) one of the points.  Otherwise the certificate picks for
    every ``w_i`` the coordinate where ``z`` differs from it most and
    multiplies the factors ``z_j - w_i^{(j)}``; it vanishes on ``X`` and not
    at ``z``.

    Returns
    -------
    inside : bool
    certificate : ProductPolynomial or None
    """
    X = X if isinstance(X, FiniteXSet) else FiniteXSet(X)
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    if z.size != X.n:
        raise DimensionError(f"point has {z.size} coordinates, set lives in C^{X.n}")
    P = X.points
    radius = tol.cluster_tol * (1.0 + float(max(np.max(np.abs(P)), np.max(np.abs(z)))))
    if np.min(np.linalg.norm(P - z[None, :], axis=1)) <= radius:
        return True, None
    factors = []
    for w in P:
        gaps = np.abs(z - w)
        j = int(np.argmax(gaps))
        if gaps[j] <= radius:
            raise DegenerateCertificate(
                f"z agrees with {w.tolist()} in every coordinate within {radius:.1e}"
            )
        factors.append((j, complex(w[j])))
    return False, ProductPolynomial(factors)


@dataclass
class SpectralCheckReport:
    trials: int
    degree: int
    max_excess: float | None
    violations: int
    excesses: list = field(repr=False, default_factory=list)
    spectrum_outside: list = field(default_factory=list)
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0 and not self.spectrum_outside

    def to_dict(self):
        return {
            "trials": self.trials,
            "degree": self.degree,
            "seed": self.seed,
            "max_excess": self.max_excess,
            "violations": self.violations,
            "spectrum_outside": self.spectrum_outside,
            "ok": self.ok,
        }


def _sample_points(X_sampler, rng):
    if isinstance(X_sampler, FiniteXSet):
        return X_sampler.points
    if callable(X_sampler):
        return np.atleast_2d(np.asarray(X_sampler(rng), dtype=np.complex128))
    P = np.asarray(X_sampler, dtype=np.complex128)
    return P[:, None] if P.ndim == 1 else P


def sampled_spectral_check(
    T,
    X_sampler,
    degree: int,
    trials: int,
    seed: int,
    tol: ToleranceConfig = DEFAULT_TOL,
    slack: float = 1e-9,
    block_size: int = 1,
) -> SpectralCheckReport:
    """Compare ``||q(T)||`` with ``max_X |q|`` for random polynomials.

    Parameters
    ----------
    X_sampler : FiniteXSet, array of points, or callable ``rng -> points``
        A :class:`FiniteXSet` additionally triggers the hull test: every
        joint eigenvalue of ``T`` must be a point of the set.
    degree, trials, seed
        Random complex Gaussian coefficients for every monomial of total
        degree at most ``degree``.
    slack : float
        A trial counts as a violation when
        ``||q(T)|| > max_X |q| + slack * (1 + max_X |q|)``.
    block_size : int
        With ``l > 1`` the coefficients are ``l x l`` matrices and the
        matrix norms ``||sum C_alpha (x) T^alpha||`` are compared instead.
    """
    T = _tuple(T, tol)
    rng = np.random.default_rng(seed)
    pts = _sample_points(X_sampler, rng)
    if pts.shape[1] != T.n:
        raise DimensionError(f"sample points live in C^{pts.shape[1]}, T has n={T.n}")
    alphas = graded_multi_indices(T.n, degree)
    mons_T = matrix_monomials(T.matrices, alphas)
    mons_X = eval_monomials(pts, alphas)
    l = int(block_size)
    excesses = []
    for _ in range(trials):
        shape = (len(alphas),) if l == 1 else (len(alphas), l, l)
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        if l == 1:
            lhs = operator_norm(np.tensordot(c, mons_T, axes=1))
            sup = float(np.max(np.abs(mons_X @ c)))
        else:
            qT = sum(np.kron(C, A) for C, A in zip(c, mons_T))
            lhs = operator_norm(qT)
            qX = np.tensordot(mons_X, c, axes=1)
            sup = float(np.max(np.linalg.norm(qX, 2, axis=(1, 2))))
        excesses.append((lhs - sup) / (1.0 + sup))
    outside = []
    if isinstance(X_sampler, FiniteXSet):
        for p in joint_spectrum(T, tol).points:
            inside, cert = finite_hull_membership(X_sampler, p, tol)
            if not inside:
                outside.append({"point": [[float(v.real), float(v.imag)] for v in p]})
    return SpectralCheckReport(
        trials=trials,
        degree=degree,
        max_excess=float(max(excesses)) if excesses else None,
        violations=int(sum(e > slack for e in excesses)),
        excesses=excesses,
        spectrum_outside=outside,
        seed=seed,
    )
