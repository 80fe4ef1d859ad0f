"""
Joint spectrum of a commuting tuple
===================================

A commuting tuple can be brought to upper triangular form by one unitary,
and the diagonals read off the joint eigenvalues.  The Koszul complex gives
an independent test: it fails to be exact exactly at those points.
"""
import numpy as np

from dilation_forge import MatrixTuple, joint_spectrum, koszul_is_singular, simultaneous_triangularize

rng = np.random.default_rng(0)

# two polynomials in one non-normal generator always commute
S = np.eye(3) + 0.3 * rng.standard_normal((3, 3))
A = S @ np.diag([1.0, 2.0, -1.0 + 1j]) @ np.linalg.inv(S)
B = A @ A - 2 * A
T = MatrixTuple([A, B])
print("commutation residual:", T.commutation_residual)

U, tri = simultaneous_triangularize(T)
print("strictly lower part after triangularizing:", max(np.abs(np.tril(M, -1)).max() for M in tri))

spec = joint_spectrum(T)
# expected: (a, a^2 - 2a) for a in {1, 2, -1+i}
print("joint spectrum:\n", np.round(spec.points, 10))

# Koszul cross-check at each spectrum point and at a point where only one
# coordinate is an eigenvalue
for p in spec.points:
    print(np.round(p, 6), "singular:", koszul_is_singular(T, p))
print("(1, 0) singular:", koszul_is_singular(T, [1.0, 0.0]))
