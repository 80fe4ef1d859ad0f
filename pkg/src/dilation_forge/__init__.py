"""Finite-dimensional normal dilations of commuting matrix tuples.

From a commuting tuple ``T`` on ``C^d`` and a POVM whose moments reproduce
``T`` up to degree ``m``, build commuting normal matrices ``N`` and an
isometry ``V`` with ``q(T) = V^* q(N) V`` for every polynomial of degree at
most ``m`` and with the joint spectrum of ``N`` inside the POVM support.
"""
from .cubature import feature_vector, real_embed, reduce
from .dilation import (
    FiniteXSet,
    MDilation,
    ProductPolynomial,
    finite_hull_membership,
    normal_m_dilation,
    sampled_spectral_check,
    unitary_1_dilation,
    verify_m_dilation,
)
from .errors import *  # noqa: F401,F403
from .interp import LowerToeplitz, eval_symbol_at_shift, nilpotent_shift, toeplitz_contraction_test
from .linalg import DEFAULT_TOL, ToleranceConfig, commutes, operator_norm, psd_sqrt
from .naimark import NaimarkDilation, naimark
from .povm import DiscretePOVM, MomentBasis, compress_spectral, moments, poisson_povm, validate
from .spectrum import (
    JointSpectrum,
    KoszulComplex,
    MatrixTuple,
    joint_spectrum,
    koszul_complex,
    koszul_is_singular,
    simultaneous_triangularize,
)

__version__ = "0.1.0"
