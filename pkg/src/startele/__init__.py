"""Quantum teleportation through three-qubit channels: states, protocols, measures."""

__version__ = "0.1.0"

from .channels import ChannelSpec, Family, build_channel, classify_star, spin_flip
from .measurement import build_outcome_set, complete_basis, gram_report, projective_measure
from .measures import concurrence, l1_coherence, negativity, p_max_optimize, p_max_oracle, tangle
from .teleport import InputQubit, derive_corrections, jung_audit, run_protocol
from .tensor import DensityMatrix, PureState, partial_trace, partial_transpose

__all__ = [
    "ChannelSpec", "DensityMatrix", "Family", "InputQubit", "PureState",
    "build_channel", "build_outcome_set", "classify_star", "complete_basis", "concurrence",
    "derive_corrections", "gram_report", "jung_audit", "l1_coherence", "negativity",
    "p_max_optimize", "p_max_oracle", "partial_trace", "partial_transpose",
    "projective_measure", "run_protocol", "spin_flip", "tangle",
]
