"""Numerical laboratory for particle structure in linear lattice field theory.

The package builds lattice discretizations of linear bosonic field theories,
diagonalizes the spatial operator R, and verifies that one-particle states
constructed over the R-eigenbasis behave like localized particles: field
observables decay at the Compton scale away from a state's support, random
superpositions of co-located states stay localized, and the Newton-Wigner
representation carries the expected geometry (including its small violations
of causality). A truncated Fock oracle arbitrates every analytic expectation
formula, and contour-integral asymptotics pin the decay rates that the
lattice kernels must reproduce.
"""

from .spectral import (
    AxiomError,
    DecayFit,
    KernelProfile,
    Lattice,
    LatticeMismatchError,
    ROperator,
    Spectrum,
    build_klein_gordon,
    build_variable_coefficient,
    diagonalize,
    fit_decay_length,
    fractional_power,
    kernel_profile,
)
from .modes import (
    CanonicalReport,
    ModeVector,
    PhaseVector,
    check_canonical,
    evolve_modes,
    evolve_state,
    field_hamiltonian,
    from_modes,
    gaussian_bump,
    hamiltonian_energy,
    to_modes,
)
from .geometry import (
    apply_J,
    inner_product,
    schrodinger_rhs,
    segal_inner_product,
    symplectic,
)
from .particle import (
    ELPReport,
    LocalizationReport,
    OneParticleState,
    calibrate_kappa,
    elp_check,
    energy_density_diff,
    localization_report,
    make_particle,
    particle_from_modes,
    phi2_diff,
    pi2_diff,
    region_ball,
    superpose,
    support_sites,
    vacuum_two_point,
)
from .newton_wigner import (
    NWWavefunction,
    evolve_nw,
    from_nw,
    gaussian_packet,
    nonrelativistic_compare,
    nw_delta_localization,
    nw_norm,
    position_expectation,
    superluminal_leakage,
    to_nw,
)
from .asymptotics import (
    AsymptoticsError,
    SymbolPolynomial,
    branch_cut_kernel,
    direct_radial_integral,
    find_branch_points,
    kernel_decay_rate,
    lattice_vs_continuum,
    predict_compton,
    rescale_symbol,
)
from .experiments import ExperimentConfig, RunReport, run_all, run_experiment

__version__ = "0.1.0"

__all__ = [
    "AsymptoticsError",
    "AxiomError",
    "CanonicalReport",
    "DecayFit",
    "ELPReport",
    "ExperimentConfig",
    "KernelProfile",
    "Lattice",
    "LatticeMismatchError",
    "LocalizationReport",
    "ModeVector",
    "NWWavefunction",
    "OneParticleState",
    "PhaseVector",
    "ROperator",
    "RunReport",
    "Spectrum",
    "SymbolPolynomial",
    "apply_J",
    "branch_cut_kernel",
    "build_klein_gordon",
    "build_variable_coefficient",
    "calibrate_kappa",
    "check_canonical",
    "diagonalize",
    "direct_radial_integral",
    "elp_check",
    "energy_density_diff",
    "evolve_modes",
    "evolve_nw",
    "evolve_state",
    "field_hamiltonian",
    "find_branch_points",
    "fit_decay_length",
    "fractional_power",
    "from_modes",
    "from_nw",
    "gaussian_bump",
    "gaussian_packet",
    "hamiltonian_energy",
    "inner_product",
    "kernel_decay_rate",
    "kernel_profile",
    "lattice_vs_continuum",
    "localization_report",
    "make_particle",
    "nonrelativistic_compare",
    "nw_delta_localization",
    "nw_norm",
    "particle_from_modes",
    "phi2_diff",
    "pi2_diff",
    "position_expectation",
    "predict_compton",
    "region_ball",
    "rescale_symbol",
    "run_all",
    "run_experiment",
    "schrodinger_rhs",
    "segal_inner_product",
    "superluminal_leakage",
    "superpose",
    "support_sites",
    "symplectic",
    "to_modes",
    "to_nw",
    "vacuum_two_point",
]
