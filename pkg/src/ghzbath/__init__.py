"""GHZ-state generation in three pairwise-coupled Josephson qubits with independent ohmic baths."""

from .dynamics import EXPM, RK4, DensityMatrix, EvolutionMethod, InvariantViolation, Method, propagate
from .mebuilder import DissipationChannel, Liouvillian, SpectralDensity, assemble_liouvillian, jump_operators
from .model import CouplingMode, ProtocolParams, analytic_reference, ghz_condition_ratio, ghz_target
from .protocol import Metrics, ProtocolRun, SweepRecord, fidelity, fidelity_ghz, run_protocol, sweep

__version__ = "0.1.0"

__all__ = [
    "EXPM",
    "RK4",
    "CouplingMode",
    "DensityMatrix",
    "DissipationChannel",
    "EvolutionMethod",
    "InvariantViolation",
    "Liouvillian",
    "Method",
    "Metrics",
    "ProtocolParams",
    "ProtocolRun",
    "SpectralDensity",
    "SweepRecord",
    "analytic_reference",
    "assemble_liouvillian",
    "fidelity",
    "fidelity_ghz",
    "ghz_condition_ratio",
    "ghz_target",
    "jump_operators",
    "propagate",
    "run_protocol",
    "sweep",
]
