"""High-probability state transfer and entanglement in dipolar spin-1/2 chains.

The chain is homogeneous (uniform spacing, all-to-all dipolar couplings
``1/n**3``); transfer between chosen nodes is steered by a static
inhomogeneous field, optionally synthesized from pairs of direct currents.
Dynamics are evaluated exactly in the single-excitation sector.
"""

from .errors import ConfigError, DomainError, NumericalError
from .model import ChainSpec, CouplingModel, FieldProfile, PhysicalUnits, coupling
from .hamiltonian import SectorMatrix, build_sector_matrix
from .spectral import SpectralDecomposition, decompose
from .dynamics import (
    Amplitude,
    HpstClass,
    HpstReport,
    Peak,
    PstConditionReport,
    TransferCurve,
    amplitude,
    check_pst_condition,
    concurrence,
    detect_peaks,
    fidelity,
    probability,
    scan_curve,
    scan_peaks,
)
from .currents import CurrentSystem, field_from_currents, solve_currents_for_field

__all__ = [
    "Amplitude",
    "ChainSpec",
    "ConfigError",
    "CouplingModel",
    "CurrentSystem",
    "DomainError",
    "FieldProfile",
    "HpstClass",
    "HpstReport",
    "NumericalError",
    "Peak",
    "PhysicalUnits",
    "PstConditionReport",
    "SectorMatrix",
    "SpectralDecomposition",
    "TransferCurve",
    "amplitude",
    "build_sector_matrix",
    "check_pst_condition",
    "concurrence",
    "coupling",
    "decompose",
    "detect_peaks",
    "fidelity",
    "field_from_currents",
    "probability",
    "scan_curve",
    "scan_peaks",
    "solve_currents_for_field",
]
