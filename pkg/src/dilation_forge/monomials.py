"""Multi-index bookkeeping shared by moments, verification and sampling.

Multi-indices are enumerated in graded lexicographic order: by total degree,
then lexicographically descending within a degree, so for two variables and
degree 2 the order is ``(0,0), (1,0), (0,1), (2,0), (1,1), (0,2)``.
"""
from __future__ import annotations

from math import comb

import numpy as np


def _compositions(total: int, n: int):
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, n - 1):
            yield (first,) + rest


def graded_multi_indices(n: int, m: int) -> list[tuple[int, ...]]:
    """All multi-indices of length ``n`` with total degree at most ``m``."""
    if n < 1 or m < 0:
        raise ValueError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    out = []
    for deg in range(m + 1):
        out.extend(_compositions(deg, n))
    assert len(out) == comb(n + m, n)
    return out


def eval_monomials(points, alphas) -> np.ndarray:
    """Values ``z^alpha`` for every point (rows) and multi-index (columns)."""
    Z = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    A = np.asarray(alphas, dtype=int).reshape(len(alphas), -1)
    out = np.ones((Z.shape[0], len(A)), dtype=np.complex128)
    for c, alpha in enumerate(A):
        for i, a in enumerate(alpha):
            if a:
                out[:, c] *= Z[:, i] ** a
    return out


def matrix_monomials(matrices, alphas) -> np.ndarray:
    """Stack of ``T_1^{a_1} ... T_n^{a_n}`` for each multi-index.

    Products are formed in coordinate order from cached powers.
    """
    mats = [np.asarray(T, dtype=np.complex128) for T in matrices]
    d = mats[0].shape[0]
    alphas = [tuple(int(a) for a in alpha) for alpha in alphas]
    powers = []
    for i, T in enumerate(mats):
        top = max((alpha[i] for alpha in alphas), default=0)
        pw = [np.eye(d, dtype=np.complex128)]
        for _ in range(top):
            pw.append(pw[-1] @ T)
        powers.append(pw)
    out = np.empty((len(alphas), d, d), dtype=np.complex128)
    for c, alpha in enumerate(alphas):
        P = None
        for i, a in enumerate(alpha):
            if a:
                P = powers[i][a] if P is None else P @ powers[i][a]
        out[c] = np.eye(d) if P is None else P
    return out


def eval_polynomial_at_matrices(coeffs, alphas, matrices) -> np.ndarray:
    """``q(T) = sum_alpha c_alpha T^alpha`` for scalar coefficients."""
    mons = matrix_monomials(matrices, alphas)
    return np.tensordot(np.asarray(coeffs, dtype=np.complex128), mons, axes=1)


def eval_polynomial_at_points(coeffs, alphas, points) -> np.ndarray:
    return eval_monomials(points, alphas) @ np.asarray(coeffs, dtype=np.complex128)
