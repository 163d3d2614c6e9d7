"""Exception hierarchy shared by all blockenc modules."""


class BlockEncError(Exception):
    """Base class for every error raised by this package."""


class InvalidGateError(BlockEncError, ValueError):
    """A gate has overlapping targets/controls or malformed parameters."""


class WidthError(BlockEncError, ValueError):
    """A qubit index or a register size does not fit the circuit width."""


class DimensionError(BlockEncError, ValueError):
    """Matrix or vector dimensions are inconsistent."""


class InfeasibleParametersError(BlockEncError, ValueError):
    """Family parameters lead to rotation arguments outside [-1, 1]."""


class InvalidTargetError(BlockEncError, ValueError):
    """A polynomial target violates parity or the sup-norm bound."""


class PhaseSolverError(BlockEncError, RuntimeError):
    """The phase-factor optimization did not reach the requested residual."""

    def __init__(self, message, best_residual, phases=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.phases = phases
