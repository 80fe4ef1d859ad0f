"""Matrix-valued Tchakaloff cubature by Caratheodory recombination.

A discrete POVM ``{(w_j, A_j)}`` is split into rank-one pieces
``lambda_r u_r u_r^*`` attached to the points ``w_j``.  Each piece maps to a
real feature vector

    v(A, x) = (E(A), g_1(x) E(A), ..., g_k(x) E(A)),

where ``E`` interleaves real and imaginary parts of the entries and the
``g_i`` are the real and imaginary parts of the non-constant monomials.
The moments of the POVM are ``sum_r lambda_r v_r``, so any nullspace
direction of the feature matrix can be subtracted from the coefficients
without touching a single moment.  Walking along such directions until a
coefficient hits zero removes pieces until at most ``2 d^2 L + 1`` remain.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstantMissing, DimensionError, NullspaceNotFound
from .linalg import DEFAULT_TOL, ToleranceConfig, as_matrix, dagger, operator_norm, symmetric_renormalize
from .povm import DiscretePOVM, MomentBasis, moments, validate


def real_embed(M) -> np.ndarray:
    """``(Re m_11, Im m_11, Re m_12, ..., Re m_dd, Im m_dd)``."""
    A = np.asarray(M, dtype=np.complex128)
    return np.stack([A.real, A.imag], axis=-1).reshape(*A.shape[:-2], -1)


def feature_vector(weight, point, basis: MomentBasis) -> np.ndarray:
    """Feature vector of a single weighted point, length ``2 d^2 L``."""
    A = as_matrix(weight)
    emb = real_embed(A)
    g = basis.real_values(np.asarray(point, dtype=np.complex128).reshape(1, -1))[0]
    return np.concatenate([emb] + [gi * emb for gi in g])


def feature_dimension(d: int, basis: MomentBasis) -> int:
    return 2 * d * d * basis.L


def caratheodory_bound(d: int, basis: MomentBasis) -> int:
    """Maximum atom count after reduction, ``2 d^2 L + 1``."""
    return feature_dimension(d, basis) + 1


@dataclass
class RankOnePieces:
    """Rank-one expansion of a POVM.

    Piece ``r`` is ``coefficients[r] * u u^*`` with ``u = directions[r]``,
    sitting at ``povm.points[atom[r]]``.
    """

    atom: np.ndarray
    directions: np.ndarray
    coefficients: np.ndarray

    def __len__(self):
        return self.atom.size


def expand_rank_one(povm: DiscretePOVM, tol: ToleranceConfig = DEFAULT_TOL) -> RankOnePieces:
    """Split every weight by its Hermitian eigendecomposition.

    Eigenvalues below ``eig_floor`` are discarded.
    """
    W = 0.5 * (povm.weights + dagger(povm.weights))
    w, U = np.linalg.eigh(W)
    keep = w >= tol.eig_floor
    atom, col = np.nonzero(keep)
    return RankOnePieces(
        atom=atom,
        directions=U[atom, :, col],
        coefficients=w[atom, col],
    )


def piece_features(pieces: RankOnePieces, points, basis: MomentBasis) -> np.ndarray:
    """Feature matrix with one column per piece."""
    u = pieces.directions
    emb = real_embed(u[:, :, None] * np.conj(u[:, None, :]))
    G = np.concatenate(
        [np.ones((len(pieces), 1)), basis.real_values(points[pieces.atom])], axis=1
    )
    return (G[:, :, None] * emb[:, None, :]).reshape(len(pieces), -1).T


@dataclass
class ReductionReport:
    input_atoms: int
    input_pieces: int
    output_atoms: int = 0
    output_pieces: int = 0
    bound: int = 0
    iterations: int = 0
    history: list = field(default_factory=list, repr=False)
    max_moment_residual: float = 0.0
    moments_preserved: bool = True
    normalization_residual: float = 0.0
    min_eigenvalue: float = 0.0
    min_coefficient: float = 0.0
    rows: list = field(default_factory=list, repr=False)

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.history, self.history[1:]))

    def to_dict(self):
        return {
            "input_atoms": self.input_atoms,
            "input_pieces": self.input_pieces,
            "output_atoms": self.output_atoms,
            "output_pieces": self.output_pieces,
            "bound": self.bound,
            "iterations": self.iterations,
            "monotone": self.monotone,
            "max_moment_residual": self.max_moment_residual,
            "moments_preserved": self.moments_preserved,
            "normalization_residual": self.normalization_residual,
            "min_eigenvalue": self.min_eigenvalue,
            "rows": self.rows,
        }


def _assemble(povm, pieces, alive, lam, tol):
    atoms = np.unique(pieces.atom[alive])
    slot = {a: i for i, a in enumerate(atoms)}
    W = np.zeros((atoms.size, povm.d, povm.d), dtype=np.complex128)
    for r in alive:
        u = pieces.directions[r]
        W[slot[pieces.atom[r]]] += lam[r] * np.outer(u, np.conj(u))
    W = 0.5 * (W + dagger(W))
    W, resid = symmetric_renormalize(W, tol)
    return DiscretePOVM(povm.points[atoms], W), resid


def _moment_rows(before, after, basis, tol):
    rows = []
    worst = 0.0
    ok = True
    for alpha, B, A in zip(basis.complex_monomials, before, after):
        scale = 1.0 + operator_norm(B)
        err = operator_norm(A - B)
        worst = max(worst, err / scale)
        ok &= err <= tol.moment_tol * scale
        rows.append({"alpha": list(alpha), "residual": err})
    return rows, worst, bool(ok)


def reduce(povm: DiscretePOVM, basis: MomentBasis, tol: ToleranceConfig = DEFAULT_TOL, report: bool = False):
    """Reduce a POVM to at most ``2 d^2 L + 1`` atoms with the same moments.

    Parameters
    ----------
    povm : DiscretePOVM
        Input measure; validated first.
    basis : MomentBasis
        Monomials whose moments must be preserved. Must contain the constant.
    tol : ToleranceConfig
    report : bool
        Also return a :class:`ReductionReport`.

    Returns
    -------
    DiscretePOVM, or (DiscretePOVM, ReductionReport)
        Output points are a subset of the input points. An input already
        within the bound is returned unchanged.

    Raises
    ------
    ConstantMissing
        ``basis`` has no constant monomial.
    NullspaceNotFound
        No null direction of the active feature matrix was found; the POVM
        reached so far is attached as ``partial``.
    """
    if not basis.has_constant:
        raise ConstantMissing("moment basis must contain the constant monomial")
    if basis.n != povm.n:
        raise DimensionError(f"basis has n={basis.n}, POVM has n={povm.n}")
    validate(povm, tol)
    d = povm.d
    rows_dim = feature_dimension(d, basis)
    bound = caratheodory_bound(d, basis)
    before = moments(povm, basis)
    rep = ReductionReport(input_atoms=len(povm), input_pieces=0, bound=bound)

    if len(povm) <= bound:
        rep.output_atoms = len(povm)
        rep.rows, rep.max_moment_residual, rep.moments_preserved = _moment_rows(before, before, basis, tol)
        rep.normalization_residual = povm.normalization_residual
        rep.min_eigenvalue = float(np.linalg.eigvalsh(povm.weights).min())
        return (povm, rep) if report else povm

    pieces = expand_rank_one(povm, tol)
    rep.input_pieces = len(pieces)
    F = piece_features(pieces, povm.points, basis)
    lam = pieces.coefficients.copy()
    active = list(range(len(pieces)))
    rep.history.append(len(active))
    batch_size = 2 * rows_dim
    colscale = np.linalg.norm(F, axis=0)

    while len(active) > bound:
        batch = np.array(active[:batch_size])
        Fb = F[:, batch]
        thr = tol.null_sigma * max(1.0, float(colscale[batch].max()))
        _, s, Vh = np.linalg.svd(Fb, full_matrices=True)
        rank = int(np.sum(s > thr))
        basis_vecs = Vh[rank:].copy()
        if basis_vecs.shape[0] == 0:
            partial, _ = _assemble(povm, pieces, active, lam, tol)
            raise NullspaceNotFound(
                f"smallest singular value {s[-1]:.3e} exceeds {thr:.3e}",
                partial=partial,
                active=len(active),
            )
        cols = list(range(batch.size))
        lb = lam[batch].copy()
        removed_total = set()
        while basis_vecs.shape[0] and len(active) - len(removed_total) > bound:
            c = basis_vecs[0] / np.linalg.norm(basis_vecs[0])
            resid = float(np.linalg.norm(Fb[:, cols] @ c))
            if resid > thr:
                partial, _ = _assemble(
                    povm, pieces, [a for a in active if a not in removed_total], lam, tol
                )
                raise NullspaceNotFound(
                    f"direction residual {resid:.3e} exceeds {thr:.3e}",
                    partial=partial,
                    active=len(active) - len(removed_total),
                )
            if c[np.argmax(np.abs(c))] < 0:
                c = -c
            pos = c > 0
            ratios = np.full(c.size, np.inf)
            ratios[pos] = lb[pos] / c[pos]
            hit = int(np.argmin(ratios))
            lb = lb - ratios[hit] * c
            lb[hit] = 0.0
            dead = np.flatnonzero(lb <= tol.eig_floor)
            for s_idx in dead:
                column = basis_vecs[:, s_idx]
                p = int(np.argmax(np.abs(column)))
                if abs(column[p]) > 1e-14 * np.abs(basis_vecs[p]).max():
                    basis_vecs = basis_vecs - np.outer(column / column[p], basis_vecs[p])
                    basis_vecs = np.delete(basis_vecs, p, axis=0)
                else:
                    basis_vecs[:, s_idx] = 0.0
            keep = np.setdiff1d(np.arange(len(cols)), dead)
            for s_idx in dead:
                removed_total.add(int(batch[cols[s_idx]]))
            cols = [cols[i] for i in keep]
            lb = lb[keep]
            basis_vecs = basis_vecs[:, keep]
            rep.iterations += 1
            rep.history.append(len(active) - len(removed_total))
        lam[batch[cols]] = lb
        lam[list(removed_total)] = 0.0
        active = [a for a in active if a not in removed_total]

    rep.min_coefficient = float(lam[active].min())
    out, resid = _assemble(povm, pieces, active, lam, tol)
    after = moments(out, basis)
    rep.rows, rep.max_moment_residual, rep.moments_preserved = _moment_rows(before, after, basis, tol)
    rep.output_atoms = len(out)
    rep.output_pieces = len(active)
    rep.normalization_residual = resid
    rep.min_eigenvalue = float(np.linalg.eigvalsh(out.weights).min())
    return (out, rep) if report else out
