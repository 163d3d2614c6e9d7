"""Gate-level block encodings of structured sparse matrices, QSP/QET and
quantum-walk circuits, all checked by dense simulation."""

from .errors import (
    BlockEncError,
    DimensionError,
    InfeasibleParametersError,
    InvalidGateError,
    InvalidTargetError,
    PhaseSolverError,
    WidthError,
)
from .qcore import (
    BlockEncoding,
    Circuit,
    Gate,
    adjoint,
    apply,
    block_extract,
    circuit_unitary,
    controlled,
    encoding_error,
    gate_unitary,
    tensor_pad,
)
from .drawing import draw_ascii

__version__ = "0.1.0"

__all__ = [
    "BlockEncError",
    "BlockEncoding",
    "Circuit",
    "DimensionError",
    "Gate",
    "InfeasibleParametersError",
    "InvalidGateError",
    "InvalidTargetError",
    "PhaseSolverError",
    "WidthError",
    "adjoint",
    "apply",
    "block_extract",
    "circuit_unitary",
    "controlled",
    "draw_ascii",
    "encoding_error",
    "gate_unitary",
    "tensor_pad",
]
