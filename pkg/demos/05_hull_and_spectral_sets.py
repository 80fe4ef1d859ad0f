"""
Finite hulls and sampled spectral-set checks
============================================

A finite set is polynomially convex: a point outside it is separated by a
product of linear factors.  For operators we can only sample: random
polynomials q are compared through ||q(T)|| and max |q| over the set.
"""
import numpy as np

from dilation_forge import FiniteXSet, finite_hull_membership, sampled_spectral_check

X = [[0, 0], [1, 1]]
inside, p = finite_hull_membership(X, [0, 1])
print("(0, 1) inside:", inside)
print("certificate factors (coordinate, root):", p.factors)
print("|p| on X:", np.abs(p(X)), " |p(z)|:", abs(p([[0, 1]])[0]))

# the unit circle is a spectral set for any scalar in the disc
circle = np.exp(2j * np.pi * np.arange(360) / 360)
rep = sampled_spectral_check([[[0.5]]], circle, degree=4, trials=100, seed=0)
print("scalar 0.5 on the circle:", rep.to_dict())

# a scalar 2 has spectrum outside X = {0, 1}
rep = sampled_spectral_check([[[2.0]]], FiniteXSet([[0.0], [1.0]]), degree=2, trials=10, seed=0)
print("scalar 2 against {0, 1}: violations", rep.violations, "spectrum outside", rep.spectrum_outside)
