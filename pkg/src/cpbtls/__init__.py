"""Transition spectra, fitting, and defect analysis for a Cooper-pair box
coupled to two-level tunneling defects.

The package models a charge qubit whose junction hosts zero, one, or two
atomic-scale defects coupled through both the island charge and the
junction critical current, diagonalizes the coupled Hamiltonians, renders
and serializes transition spectra, fits measured spectroscopy ridges, and
converts the fitted energies into material-level quantities.
"""

__version__ = "0.1.0"

from .analysis import (
    BOLTZMANN_GHZ_PER_MK,
    E_CHARGE,
    FLUX_QUANTUM,
    PLANCK,
    DerivedReport,
    JunctionGeometry,
    capacitance_from_charging_energy,
    critical_current,
    current_density,
    derived_report,
    fractional_and_area,
    hop_distance,
    island_potential_shift,
    josephson_energy,
    t1_bound,
    tls_frequency,
)
from .eigen import ConvergenceError, EigenSystem, eigendecompose, residual_norm
from .fitting import (
    PENALTY,
    VISIBILITY_FLOOR,
    FitProblem,
    FitResult,
    RidgePoint,
    fit,
    multistart,
    objective,
    synthetic_ridges,
)
from .hamiltonian import (
    CpbParams,
    ModelConfig,
    TlsParams,
    build_cpb_block,
    build_hamiltonian,
    build_single_tls,
    build_two_tls,
    charge_window,
    ej_from_flux,
)
from .io import (
    ConfigError,
    DataFormatError,
    RunConfig,
    SvgStyle,
    emit_spectrum_svg,
    format_fit_report,
    format_residuals_csv,
    parse_config,
    read_ridge_csv,
    read_spectrum_csv,
    write_spectrum_csv,
)
from .spectra import (
    ResonatorParams,
    SpectrumTable,
    TransitionLine,
    chi_eff_multilevel,
    dispersive_shift,
    resolve_max_states,
    spectrum,
    transitions_at,
    two_level_closed_form,
)

__all__ = [
    "__version__",
    # hamiltonian
    "CpbParams", "TlsParams", "ModelConfig", "charge_window", "ej_from_flux",
    "build_cpb_block", "build_single_tls", "build_two_tls",
    "build_hamiltonian",
    # eigen
    "EigenSystem", "ConvergenceError", "eigendecompose", "residual_norm",
    # spectra
    "TransitionLine", "SpectrumTable", "ResonatorParams",
    "two_level_closed_form", "resolve_max_states", "transitions_at",
    "spectrum", "dispersive_shift", "chi_eff_multilevel",
    # fitting
    "RidgePoint", "FitProblem", "FitResult", "objective", "fit",
    "multistart", "synthetic_ridges", "VISIBILITY_FLOOR", "PENALTY",
    # analysis
    "PLANCK", "E_CHARGE", "FLUX_QUANTUM", "BOLTZMANN_GHZ_PER_MK",
    "JunctionGeometry", "DerivedReport", "critical_current",
    "josephson_energy", "capacitance_from_charging_energy",
    "current_density", "fractional_and_area", "hop_distance",
    "island_potential_shift", "tls_frequency", "t1_bound", "derived_report",
    # io
    "ConfigError", "DataFormatError", "RunConfig", "parse_config",
    "read_ridge_csv", "write_spectrum_csv", "read_spectrum_csv", "SvgStyle",
    "emit_spectrum_svg", "format_fit_report", "format_residuals_csv",
]
