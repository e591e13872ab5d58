"""Adiabaticity diagnostics on evolution traces and eigenpaths."""

from .coupling import (AnmPath, a_nm_path, adiabatic_error, coupling_element, coupling_series,
                       derivative_elements, error_direct, finite_difference_coupling, level_errors,
                       traditional_metric)
from .report import ALL_DIAGNOSTICS, DiagnosticsReport, diagnose
from .spectral import (Cutoff, FourierSpectrum, ZeroCount, count_derivative_zeros, cutoff_frequency,
                       dominant_path_estimate, fourier_a, zero_count_bound)
from .spectrum import (GAP_TOL, AmplitudePath, SpectrumPath, amplitudes, eigenstate_drift,
                       level_probabilities, projections, rabi_ground_probability, spectrum_path)
from .theorem import CurvatureCheck, MinTime, curvature_check, gap_profile, grover_selection_rule, min_time

__all__ = [
    "ALL_DIAGNOSTICS", "AmplitudePath", "AnmPath", "CurvatureCheck", "Cutoff", "DiagnosticsReport",
    "FourierSpectrum", "GAP_TOL", "MinTime", "SpectrumPath", "ZeroCount", "a_nm_path",
    "adiabatic_error", "amplitudes", "count_derivative_zeros", "coupling_element", "coupling_series",
    "curvature_check", "cutoff_frequency", "derivative_elements", "diagnose", "dominant_path_estimate",
    "eigenstate_drift", "error_direct", "finite_difference_coupling", "fourier_a", "gap_profile",
    "grover_selection_rule", "level_errors", "level_probabilities", "min_time", "projections",
    "rabi_ground_probability", "spectrum_path", "traditional_metric", "zero_count_bound",
]
