"""
Operator Poisson kernel and Caratheodory reduction
==================================================

A strict contraction T has an operator valued Poisson measure on the unit
circle whose z^k moment is T^k.  Sampling it on R points gives a POVM with
R atoms; recombination then keeps only enough atoms to pin down the moments
of degree at most m.
"""
import numpy as np

from dilation_forge import MomentBasis, moments, poisson_povm, reduce

rng = np.random.default_rng(1)
T = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
T *= 0.8 / np.linalg.norm(T, 2)

povm = poisson_povm(T, 2048)
print("atoms on the circle:", len(povm))

m = 3
basis = MomentBasis(1, m)
for k, M in enumerate(moments(povm, basis)):
    print(f"||z^{k} moment - T^{k}|| =", np.linalg.norm(M - np.linalg.matrix_power(T, k), 2))

small, report = reduce(povm, basis, report=True)
print("after reduction:", len(small), "atoms; bound", report.bound)
print("largest moment change:", report.max_moment_residual)
print("piece count strictly decreasing:", report.monotone)

# every surviving atom is one of the original grid points
grid = set(povm.points[:, 0].tolist())
print("support inside the grid:", all(z in grid for z in small.points[:, 0].tolist()))
