import numpy as np
import pytest

from _fixtures import cgauss, random_contraction
from dilation_forge.dilation import (
    FiniteXSet,
    MDilation,
    finite_hull_membership,
    normal_m_dilation,
    sampled_spectral_check,
    unitary_1_dilation,
    verify_m_dilation,
)
from dilation_forge.errors import DegenerateCertificate, MomentMismatch, NotContraction, ValidationError
from dilation_forge.linalg import DEFAULT_TOL, normality_residual, operator_norm, random_unitary
from dilation_forge.monomials import eval_monomials, graded_multi_indices, matrix_monomials
from dilation_forge.povm import DiscretePOVM, compress_spectral, poisson_povm
from dilation_forge.spectrum import MatrixTuple


@pytest.fixture(scope="module")
def poisson_dilation():
    T = random_contraction(2, np.random.default_rng(7), norm=0.85)
    dil = normal_m_dilation([T], poisson_povm(T, 2048), 3)
    return T, dil


def test_scalar_zero_two_point():
    p = DiscretePOVM([[1.0], [-1.0]], [[[0.5]], [[0.5]]])
    dil = normal_m_dilation([[[0.0]]], p, 1)
    N = dil.tuple_N[0]
    assert np.allclose(sorted(np.diag(N).real), [-1, 1])
    assert np.allclose(np.abs(dil.V[:, 0]), 1 / np.sqrt(2), atol=1e-15)
    assert abs((dil.V.conj().T @ N @ dil.V)[0, 0]) <= 1e-15


def test_poisson_pipeline(poisson_dilation):
    T, dil = poisson_dilation
    assert dil.atoms <= 57
    assert dil.dimension == 2 * dil.atoms
    for k in range(4):
        Nk = np.linalg.matrix_power(dil.tuple_N[0], k)
        assert operator_norm(np.linalg.matrix_power(T, k) - dil.V.conj().T @ Nk @ dil.V) <= 1e-6
    assert normality_residual(dil.tuple_N[0]) <= 1e-10
    assert np.allclose(np.abs(dil.support[:, 0]), 1.0, atol=1e-15)


def test_normal_input_reproduced_exactly():
    T = np.diag([1.0, 1j])
    povm = compress_spectral([T], np.eye(2))
    dil = normal_m_dilation([T], povm, 5)
    assert sorted(map(complex, dil.support[:, 0]), key=lambda z: z.imag) == [1, 1j]
    rep = verify_m_dilation([T], dil, 5)
    assert rep.max_residual <= 1e-14


def test_report_rows_and_isometry_row(poisson_dilation):
    T, dil = poisson_dilation
    rep = verify_m_dilation([T], dil, 3)
    assert [r["alpha"] for r in rep.rows] == [[0], [1], [2], [3]]
    assert rep.rows[0]["residual"] <= 1e-10
    assert rep.passed()
    assert rep.support_contained
    assert max(rep.normality) <= 1e-10
    d = rep.to_dict()
    assert set(d) >= {"max_residual", "rows", "normality", "atoms", "dimension"}


def test_corrupted_dilation_is_flagged(poisson_dilation):
    T, dil = poisson_dilation
    N = dil.tuple_N[0].copy()
    idx = dil.projection_indices[0]
    N[idx, idx] = 0
    bad = MDilation(MatrixTuple([N], check=False), dil.V, dil.m, dil.support)
    rep = verify_m_dilation([T], bad, 3)
    assert rep.max_residual > 1e-6
    assert not rep.passed()


def test_two_variable_dilation_from_finite_support():
    rng = np.random.default_rng(8)
    Q = random_unitary(3, rng)
    pts = np.array([[1, 0], [0, 1j], [-1, 1]], dtype=complex)
    mats = [Q @ np.diag(pts[:, i]) @ Q.conj().T for i in range(2)]
    # restriction to a joint invariant subspace, so compression is multiplicative
    V = Q[:, :2]
    T = [V.conj().T @ A @ V for A in mats]
    povm = compress_spectral(mats, V)
    dil = normal_m_dilation(T, povm, 2)
    rep = verify_m_dilation(T, dil, 2)
    assert rep.max_residual <= 1e-10
    pts_set = {tuple(np.round(p, 12)) for p in pts}
    assert all(tuple(np.round(w, 12)) in pts_set for w in dil.support)
    assert dil.atoms <= 3


def test_moment_mismatch_reports_alpha():
    p = DiscretePOVM([[1.0], [-1.0]], [[[0.5]], [[0.5]]])
    with pytest.raises(MomentMismatch) as info:
        normal_m_dilation([[[0.0]]], p, 2)
    assert info.value.details["alpha"] == [2]


def test_consequence_inequality(poisson_dilation):
    T, dil = poisson_dilation
    rng = np.random.default_rng(9)
    alphas = graded_multi_indices(1, 3)
    mT = matrix_monomials([T], alphas)
    mX = eval_monomials(dil.support, alphas)
    for _ in range(100):
        c = cgauss(rng, len(alphas))
        assert operator_norm(np.tensordot(c, mT, axes=1)) <= np.abs(mX @ c).max() + 1e-6


def test_unitary_dilation_scalars():
    assert np.array_equal(unitary_1_dilation([[0.0]]), [[0, 1], [1, 0]])
    U = unitary_1_dilation([[0.6]])
    assert np.allclose(U, [[0.6, 0.8], [0.8, -0.6]], atol=1e-15)


def test_unitary_dilation_seeded():
    T = random_contraction(2, np.random.default_rng(10), norm=0.7)
    U = unitary_1_dilation(T)
    assert operator_norm(U.conj().T @ U - np.eye(4)) <= 1e-12
    assert np.array_equal(U[:2, :2], T)
    assert operator_norm(U) == pytest.approx(1.0, abs=1e-10)


def test_unitary_dilation_with_unit_singular_value():
    T = random_unitary(3, np.random.default_rng(11)) @ np.diag([1.0, 0.5, 0.0])
    U = unitary_1_dilation(T)
    assert operator_norm(U.conj().T @ U - np.eye(6)) <= 1e-12
    with pytest.raises(NotContraction):
        unitary_1_dilation(1.01 * np.eye(2))


def test_hull_examples():
    assert finite_hull_membership([[0.0]], [0.0]) == (True, None)
    inside, p = finite_hull_membership([[0, 0], [1, 1]], [0, 1])
    assert not inside
    assert p.factors == [(1, 0j), (0, 1 + 0j)]
    Z = np.array([[0, 0], [1, 1], [0, 1]], dtype=complex)
    assert np.array_equal(p(Z), [0, 0, -1])
    X = np.exp(2j * np.pi * np.arange(6) / 6)
    inside, p = finite_hull_membership(X, [2.0])
    assert not inside
    assert abs(p([[2.0]])[0]) > np.abs(p(X[:, None])).max()


def test_hull_degenerate_and_duplicates():
    with pytest.raises(DegenerateCertificate):
        finite_hull_membership([[0.0, 0.0], [1.0, 1.0]], [1.5e-10, 1.5e-10], DEFAULT_TOL.override(cluster_tol=1e-10))
    with pytest.raises(ValidationError):
        FiniteXSet([[1.0], [1.0]])


def test_spectral_check_scalar_in_disc():
    circle = np.exp(2j * np.pi * np.arange(360) / 360)
    rep = sampled_spectral_check([[[0.5]]], circle, 4, 100, seed=0)
    assert rep.trials == 100
    assert rep.violations == 0
    assert rep.max_excess <= 1e-9


def test_spectral_check_flags_spectrum_outside_finite_set():
    rep = sampled_spectral_check([[[2.0]]], FiniteXSet([[0.0], [1.0]]), 2, 10, seed=1)
    assert rep.spectrum_outside
    assert not rep.ok


def test_spectral_check_normal_inside_finite_set():
    rng = np.random.default_rng(12)
    X = FiniteXSet(cgauss(rng, (5, 2)))
    Q = random_unitary(4, rng)
    chosen = X.points[[0, 2, 2, 4]]
    T = [Q @ np.diag(chosen[:, i]) @ Q.conj().T for i in range(2)]
    rep = sampled_spectral_check(T, X, 3, 50, seed=2)
    assert rep.ok
    rep = sampled_spectral_check(T, X, 2, 20, seed=3, block_size=2)
    assert rep.ok


def test_spectral_check_zero_trials_is_serializable():
    rep = sampled_spectral_check([[[0.5]]], [1.0], 1, 0, seed=0)
    assert rep.to_dict()["max_excess"] is None
