"""Design and simulation tools for integrated linear-optics circuits.

``lincircuit`` builds scattering-matrix netlists and ``components`` holds
the ring and coupler models. ``calib`` extracts device parameters by least
squares; ``quantum`` evaluates post-selected two-photon gates.
"""

from loqckit.errors import (
    DegenerateCircuitError,
    DomainError,
    FitError,
    IdentifiabilityError,
    LowContrastError,
    NoResonanceError,
    StructuralError,
)
from loqckit.lincircuit import (
    CouplerSpec,
    Netlist,
    PhaseShiftSpec,
    cnot_netlist,
    cnot_transmission,
    compile_netlist,
    coupler_matrix,
    reduce_ports,
)
from loqckit.quantum import FockState, amplitude, cnot_report, evolve_distribution, fidelity_map, permanent

__version__ = "0.1.0"

__all__ = [
    "CouplerSpec",
    "DegenerateCircuitError",
    "DomainError",
    "FitError",
    "FockState",
    "IdentifiabilityError",
    "LowContrastError",
    "Netlist",
    "NoResonanceError",
    "PhaseShiftSpec",
    "StructuralError",
    "amplitude",
    "cnot_netlist",
    "cnot_report",
    "cnot_transmission",
    "compile_netlist",
    "coupler_matrix",
    "evolve_distribution",
    "fidelity_map",
    "permanent",
    "reduce_ports",
]
