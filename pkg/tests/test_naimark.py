import numpy as np
import pytest

from _fixtures import random_povm_arrays
from dilation_forge.errors import NotNormalized, NotPSD
from dilation_forge.linalg import operator_norm
from dilation_forge.naimark import naimark


def test_single_identity_weight():
    nd = naimark([np.eye(3)])
    assert np.array_equal(nd.V, np.eye(3))
    assert np.array_equal(nd.projection(0), np.eye(3))


def test_two_halves():
    nd = naimark([[[0.5]], [[0.5]]])
    assert np.allclose(nd.V[:, 0], [1 / np.sqrt(2)] * 2, atol=1e-15)
    assert np.array_equal(nd.projections[0], np.diag([1, 0]))
    assert np.array_equal(nd.projections[1], np.diag([0, 1]))
    assert np.allclose([nd.compressed(0), nd.compressed(1)], 0.5, atol=1e-15)


def test_identities_on_seeded_povm():
    _, W = random_povm_arrays(3, 2, 1, np.random.default_rng(0))
    nd = naimark(W)
    assert nd.D == 6
    res = nd.residuals()
    assert max(res.values()) <= 1e-10
    for j in range(3):
        E = nd.projection(j)
        assert operator_norm(nd.V.conj().T @ E @ nd.V - W[j]) <= 1e-9 * 3


def test_reconstruction_telescopes():
    _, W = random_povm_arrays(7, 3, 1, np.random.default_rng(1))
    nd = naimark(W)
    total = sum(nd.compressed(j) for j in range(nd.M))
    assert operator_norm(total - np.eye(3)) <= 1e-12


def test_block_diagonal_norm():
    rng = np.random.default_rng(2)
    _, W = random_povm_arrays(6, 2, 1, rng)
    nd = naimark(W)
    h = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    H = sum(hj * E for hj, E in zip(h, nd.projections))
    assert np.allclose(H, nd.spectral_operator(h))
    assert operator_norm(H) == pytest.approx(np.abs(h).max(), rel=1e-14)


def test_rejects_bad_input():
    with pytest.raises(NotNormalized):
        naimark([0.5 * np.eye(2)])
    with pytest.raises(NotPSD):
        naimark([np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])])


def test_residuals_match_dense_oracle():
    _, W = random_povm_arrays(5, 2, 1, np.random.default_rng(3))
    nd = naimark(W)
    E = nd.projections
    dense = {
        "idempotent": max(operator_norm(P @ P - P) for P in E),
        "orthogonal": max(operator_norm(E[a] @ E[b]) for a in range(5) for b in range(5) if a != b),
        "resolution": operator_norm(sum(E) - np.eye(nd.D)),
    }
    res = nd.residuals()
    for key, val in dense.items():
        assert res[key] == pytest.approx(val, abs=1e-15)
    assert np.array_equal(np.diag(E[2]).real, nd.projection_diagonals()[2])
