"""Exact dynamics and two-site correlations for blockaded lattices with disordered drive."""

__version__ = "0.1.0"

from .lattice import (
    LatticeSpec,
    BlockadeGraph,
    PhysicalParams,
    build_blockade_graph,
    blockade_radius,
    mean_atoms_per_pseudoatom,
    max_blocked_neighbors,
)
from .basis import RestrictedBasis, enumerate_restricted, enumerate_full, max_excitations
from .disorder import DisorderConfiguration, sample_configuration, mean_square_coupling
from .hamiltonians import BlockadeHamiltonian, LongRangeHamiltonian, flip_transitions
from .dynamics import TimeGrid, StateVector, Trajectory, SpectralData, propagate, spectrum_overlap
from . import observables
from .ensemble import ExperimentSpec, EnsembleResult, run, preset, preset_names

__all__ = [
    "LatticeSpec",
    "BlockadeGraph",
    "PhysicalParams",
    "build_blockade_graph",
    "blockade_radius",
    "mean_atoms_per_pseudoatom",
    "max_blocked_neighbors",
    "RestrictedBasis",
    "enumerate_restricted",
    "enumerate_full",
    "max_excitations",
    "DisorderConfiguration",
    "sample_configuration",
    "mean_square_coupling",
    "BlockadeHamiltonian",
    "LongRangeHamiltonian",
    "flip_transitions",
    "TimeGrid",
    "StateVector",
    "Trajectory",
    "SpectralData",
    "propagate",
    "spectrum_overlap",
    "observables",
    "ExperimentSpec",
    "EnsembleResult",
    "run",
    "preset",
    "preset_names",
]
