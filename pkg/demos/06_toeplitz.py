"""
Lower triangular Toeplitz matrices
==================================

A lower triangular Toeplitz matrix with first column a is p(S_d), where
p(z) = a_0 + a_1 z + ... and S_d is the nilpotent shift.  It is a
contraction exactly when a is the start of a Taylor series of a function
bounded by one on the disc.
"""
import numpy as np

from dilation_forge import LowerToeplitz, eval_symbol_at_shift, nilpotent_shift, toeplitz_contraction_test

S = nilpotent_shift(4)
print(S.real)
print("S^4 == 0:", not np.any(np.linalg.matrix_power(S, 4)))

a = np.array([1.0, -0.5, 0.25j, 2.0])
print("p(S) equals the Toeplitz matrix:", np.array_equal(eval_symbol_at_shift(a), LowerToeplitz(a).matrix()))

# (1 + z) / 2 is bounded by one on the disc, z^3 scaled by 2 is not
for coeffs in ([0.5, 0.5, 0, 0], [0, 0, 0, 2]):
    A = LowerToeplitz(coeffs)
    print(coeffs, "norm", round(np.linalg.norm(A.matrix(), 2), 6), "contraction:", toeplitz_contraction_test(A))
