import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _fixtures import cgauss, commuting_tuple, match_multisets, poly_of_matrix
from dilation_forge.errors import NotCommuting
from dilation_forge.linalg import DEFAULT_TOL, operator_norm, random_unitary
from dilation_forge.spectrum import (
    MatrixTuple,
    joint_spectrum,
    koszul_complex,
    koszul_is_singular,
    simultaneous_triangularize,
)


def _assert_triangular(U, tri, mats):
    assert operator_norm(U.conj().T @ U - np.eye(U.shape[0])) <= 1e-10
    for B, A in zip(tri.matrices, mats):
        assert np.linalg.norm(np.tril(B, -1)) <= 1e-8 * (1 + operator_norm(A))


def test_matrix_tuple_rejects_non_commuting():
    with pytest.raises(NotCommuting):
        MatrixTuple([[[0, 1], [0, 0]], [[0, 0], [1, 0]]])


def test_already_triangular_tuple():
    A = np.triu(np.arange(1, 10).reshape(3, 3)).astype(complex)
    B = poly_of_matrix([1, 2, 3], A)
    U, tri = simultaneous_triangularize([A, B])
    _assert_triangular(U, tri, [A, B])
    spec = joint_spectrum([A, B])
    expect = np.array([[1, 6], [5, 1 + 10 + 75], [9, 1 + 18 + 243]])
    assert match_multisets(spec.points, expect) < 1e-9


def test_planted_unitary_conjugation():
    rng = np.random.default_rng(0)
    Q = random_unitary(2, rng)
    A = Q @ np.diag([1, 2]) @ Q.conj().T
    B = Q @ np.diag([5, 6]) @ Q.conj().T
    U, tri = simultaneous_triangularize([A, B])
    _assert_triangular(U, tri, [A, B])
    pts = joint_spectrum([A, B]).points
    assert match_multisets(pts, np.array([[1, 5], [2, 6]])) < 1e-12


def test_single_jordan_block():
    J = np.array([[0, 1], [0, 0]], dtype=complex)
    U, tri = simultaneous_triangularize([J])
    _assert_triangular(U, tri, [J])
    assert np.allclose(np.diag(tri[0]), 0, atol=1e-12)


def test_scalar_tuple():
    pts = joint_spectrum([[[3]], [[7j]]]).points
    assert np.allclose(pts, [[3, 7j]])


def test_diagonal_pair():
    pts = joint_spectrum([np.diag([1, 2]), np.diag([5, 6])]).points
    assert match_multisets(pts, np.array([[1, 5], [2, 6]])) == 0.0


def test_polynomial_pair_spectral_mapping():
    rng = np.random.default_rng(1)
    mats, expect = commuting_tuple("diagonalizable", 4, 2, rng)
    pts = joint_spectrum(mats).points
    assert match_multisets(pts, expect) < 1e-9


def test_derogatory_tuple_needs_deflation():
    # common kernel is span(e1) but a random combination has a 2-dim kernel
    A = np.zeros((3, 3), dtype=complex)
    B = np.zeros((3, 3), dtype=complex)
    A[0, 1] = 1
    B[0, 2] = 1
    Q = random_unitary(3, np.random.default_rng(2))
    mats = [Q @ A @ Q.conj().T, Q @ B @ Q.conj().T + 2 * np.eye(3)]
    U, tri = simultaneous_triangularize(mats)
    _assert_triangular(U, tri, mats)
    pts = joint_spectrum(mats).points
    assert match_multisets(pts, np.array([[0, 2]] * 3)) < 1e-7


def test_koszul_single_operator_is_eigenvalue_test():
    A = [np.diag([1.0, 2.0])]
    assert koszul_is_singular(A, [1.0])
    assert not koszul_is_singular(A, [3.0])


def test_koszul_mixed_coordinates_are_regular():
    T = [np.diag([1, 2]), np.diag([5, 6])]
    assert not koszul_is_singular(T, [1, 6])
    assert koszul_is_singular(T, [1, 5])
    assert koszul_is_singular(T, [2, 6])


def test_koszul_singular_on_joint_spectrum_points():
    rng = np.random.default_rng(3)
    for kind in ("diagonalizable", "jordan", "normal"):
        mats, _ = commuting_tuple(kind, 3, 3, rng)
        for p in joint_spectrum(mats).points:
            assert koszul_is_singular(mats, p)


@pytest.mark.parametrize("seed", range(6))
def test_koszul_set_equals_joint_spectrum_on_candidate_grid(seed):
    rng = np.random.default_rng(100 + seed)
    d, n = int(rng.integers(1, 5)), int(rng.integers(1, 4))
    kind = ("diagonalizable", "jordan", "normal")[seed % 3]
    mats, _ = commuting_tuple(kind, d, n, rng)
    spec = joint_spectrum(mats)
    candidates = list(spec.points) + [cgauss(rng, n) * 2 for _ in range(20)]
    for lam in candidates:
        on_spec = spec.distance_to(lam) <= DEFAULT_TOL.cluster_tol * 10
        if not on_spec and spec.distance_to(lam) < 1e-3:
            continue
        assert koszul_is_singular(mats, lam) == on_spec


def test_joint_spectrum_invariant_under_unitary_conjugation():
    rng = np.random.default_rng(4)
    mats, _ = commuting_tuple("diagonalizable", 4, 2, rng)
    Q = random_unitary(4, rng)
    conj = [Q.conj().T @ A @ Q for A in mats]
    assert match_multisets(joint_spectrum(mats).points, joint_spectrum(conj).points) < 1e-8


def test_spectral_mapping_for_polynomials_of_the_tuple():
    rng = np.random.default_rng(5)
    mats, _ = commuting_tuple("diagonalizable", 4, 2, rng)
    pts = joint_spectrum(mats).points
    # q(z1, z2) = z1^2 - 3 z1 z2 + 2i
    Q = mats[0] @ mats[0] - 3 * mats[0] @ mats[1] + 2j * np.eye(4)
    qvals = pts[:, 0] ** 2 - 3 * pts[:, 0] * pts[:, 1] + 2j
    eig = np.linalg.eigvals(Q)
    assert match_multisets(qvals[:, None], eig[:, None]) < 1e-8


def test_koszul_boundary_squares_to_zero():
    rng = np.random.default_rng(6)
    mats, _ = commuting_tuple("diagonalizable", 3, 3, rng)
    K = koszul_complex(MatrixTuple(mats), cgauss(rng, 3))
    assert K.stage_dims == [3, 9, 9, 3]
    scale = max(operator_norm(D) for D in K.stage_maps) ** 2
    assert K.composition_residual() <= 1e-10 * scale


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 4), n=st.integers(1, 3))
def test_koszul_composition_property(seed, d, n):
    rng = np.random.default_rng(seed)
    mats, _ = commuting_tuple("diagonalizable", d, n, rng)
    K = koszul_complex(MatrixTuple(mats))
    scale = 1 + max((operator_norm(D) for D in K.stage_maps), default=0) ** 2
    assert K.composition_residual() <= 1e-10 * scale
