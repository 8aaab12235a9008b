"""Phase-space quantum ruler numerics.

Displacement-generated POVMs, outcome statistics, mutual coherence functions
and the coherence/resolution functionals derived from them.
"""
__version__ = "0.1.0"

from .errors import AliasingError, InputError, QRulerError, TruncationError
from .fock import FockOperator, FockVector, MixedState
from .phase_space import Grid2D, GridField

__all__ = [
    "AliasingError",
    "FockOperator",
    "FockVector",
    "Grid2D",
    "GridField",
    "InputError",
    "MixedState",
    "QRulerError",
    "TruncationError",
]
