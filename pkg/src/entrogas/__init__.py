"""Coulomb-gas thermodynamics of bipartite entanglement.

Analytic spectral branches and their free energies, the (m, delta)
free-energy landscape, finite-N constrained minimization, and Metropolis
sampling of the fixed-purity eigenvalue gas.
"""

from .core import (
    BranchDensity,
    BranchKind,
    CollidingEigenvalues,
    CriticalSet,
    DomainError,
    EmptyHistogram,
    EntrogasError,
    Histogram,
    Infeasible,
    InvalidParams,
    NoBirth,
    NoConvergence,
    NoCrossing,
    NoSignChange,
    OrderTooLarge,
    OutOfBranch,
    Spectrum,
    ThermoPoint,
    bracket_root,
    purity,
    quad_edge_singular,
)
from .analytic import (
    BETA_G,
    BETA_PLUS,
    BETA_TANGENT,
    BRANCH_TABLE,
    BranchWindow,
    CriticalSide,
    ExpansionReport,
    Regime,
    beta_of_delta,
    branch_window,
    critical_expansion_check,
    critical_points,
    delta_of_beta,
    density,
    entropy_of_energy,
    entropy_of_purity,
    lambda_extremes,
    metastable_branch,
    mu_of_beta,
    planar_map_series,
    stable_branch,
    thermo,
    volume_of_purity,
)
from .landscape import (
    DensityRoots,
    DomainSpec,
    SaddleLocation,
    SaddleSolution,
    density_nonnegative,
    density_roots,
    feasible,
    free_energy_surface,
    minimize_landscape,
    phi_general,
    sea_reduced_free_energy,
    surface_gradient,
)
from .finiten import (
    Basin,
    BasinMinimum,
    FiniteNConfig,
    FiniteNResult,
    ProfilePoint,
    find_birth,
    find_crossing,
    free_energy_n,
    gradient,
    minimize_basin,
    mu_theory_curve,
    profile_mu,
    solve_point,
)
from .sampler import (
    ChainState,
    SampleStats,
    ks_distance,
    ks_two_sample,
    log_weight,
    metropolis_run,
    mp_cdf,
    sample_induced,
    semicircle_cdf,
)

__version__ = "0.1.0"
