"""
Normal m-dilation of a contraction
==================================

Chain the previous steps: Poisson POVM, reduction to finitely many atoms,
Naimark dilation, and N = sum_j w_j E_j.  N is diagonal (hence normal),
its eigenvalues lie on the circle, and T^k = V* N^k V for k <= m.
"""
import numpy as np

from dilation_forge import normal_m_dilation, poisson_povm, verify_m_dilation

rng = np.random.default_rng(3)
T = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
T *= 0.9 / np.linalg.norm(T, 2)

m = 3
dil = normal_m_dilation([T], poisson_povm(T, 2048), m)
print("atoms:", dil.atoms, " dimension:", dil.dimension)
print("|eigenvalues of N| range:", np.abs(dil.support).min(), np.abs(dil.support).max())

report = verify_m_dilation([T], dil, m)
for row in report.rows:
    print("alpha", row["alpha"], "residual", f"{row['residual']:.2e}")
print("normality residual:", report.normality[0])

# von Neumann style consequence: ||q(T)|| <= max |q| on the support
q = rng.standard_normal(m + 1) + 1j * rng.standard_normal(m + 1)
qT = sum(c * np.linalg.matrix_power(T, k) for k, c in enumerate(q))
qw = np.polyval(q[::-1], dil.support[:, 0])
print("||q(T)|| =", np.linalg.norm(qT, 2), "<= max|q(w)| =", np.abs(qw).max())
