"""
Naimark dilation
================

Stacking the square roots of POVM weights gives an isometry V, and the
coordinate blocks give orthogonal projections E_j with V* E_j V = A_j.
"""
import numpy as np

from dilation_forge import naimark, operator_norm

rng = np.random.default_rng(2)

# three random PSD weights, renormalized to sum to the identity
G = rng.standard_normal((3, 2, 2)) + 1j * rng.standard_normal((3, 2, 2))
W = G @ G.conj().transpose(0, 2, 1)
vals, vecs = np.linalg.eigh(W.sum(axis=0))
S = vecs @ np.diag(vals ** -0.5) @ vecs.conj().T
W = S @ W @ S

nd = naimark(W)
print("dilation dimension D =", nd.D)
print("residuals:", nd.residuals())
for j in range(nd.M):
    print(f"||V* E_{j} V - A_{j}|| =", operator_norm(nd.compressed(j) - W[j]))

# a function of the measurement outcome becomes a diagonal operator
h = np.array([1.0, 1j, -1.0])
print("||sum h_j E_j|| =", operator_norm(nd.spectral_operator(h)), "= max |h_j|")
