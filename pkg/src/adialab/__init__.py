"""Numerical laboratory for adiabatic evolution and its failure modes."""

from ._backend import BACKEND
from .models import (DrivenTwoLevelParams, DualModel, HamiltonianModel, driven_two_level, dual_of,
                     grover_adiabatic, landau_zener, linear_interpolation, rotating_field)
from .numkernel import EigenSystem, align_phases, eigh, eigh_batch, expm_minus_iH
from .propagate import EvolutionTrace, accumulate_propagator, evolve

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DrivenTwoLevelParams", "DualModel", "EigenSystem", "EvolutionTrace",
    "HamiltonianModel", "accumulate_propagator", "align_phases", "driven_two_level", "dual_of",
    "eigh", "eigh_batch", "evolve", "expm_minus_iH", "grover_adiabatic", "landau_zener",
    "linear_interpolation", "rotating_field",
]
