"""Spectral statistics of random Jacobi matrices in the fixed-N-beta regime
of Gaussian beta ensembles.

The package computes the even moments of the mean spectral measure exactly
(two independent recurrences, a weighted Dyck-path oracle, and finite-size
expectation polynomials with their duality identities), evaluates the
closed-form density through confluent hypergeometric functions, and
cross-validates everything by Monte Carlo sampling of random tridiagonal
matrices.
"""

from .ratpoly import BigRational, RationalPoly
from .moments import (
    GbeParams,
    MomentSequence,
    dyck_weight_sum,
    h_polynomial,
    lemma_two_step,
    m_polynomial,
    u_polynomials,
    u_sequence_numeric,
    verify_duality,
    verify_kappa_limit,
    verify_limit_to_u,
    verify_u_h_relation,
)
from .special import (
    DensityParams,
    SelfConvParams,
    V_I,
    V_R,
    density,
    density_moment_check,
    f_hat,
    hermite_He,
    kummer_1f1,
    ln_gamma,
    nu_general,
    semicircle_density,
)
from .linalg import (
    DiscreteSpectralMeasure,
    FiniteJacobi,
    matrix_power_entry,
    mean_measure_truncation,
    spectral_decomposition,
)
from .sampler import (
    McReport,
    RngStream,
    build_J_trunc,
    build_T,
    mc_histogram,
    mc_mean_moments,
    sample_chi_tilde,
)

__version__ = "0.1.0"
