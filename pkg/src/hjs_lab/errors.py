"""Exception types shared across the package."""


class HJSLabError(Exception):
    """Base class for all errors raised by hjs_lab."""


class ConfigurationError(HJSLabError):
    """Invalid construction parameters or scenario configuration."""


class ShapeError(HJSLabError):
    """Field length does not match the grid."""


class ParameterError(HJSLabError):
    """Invalid deformation parameter (e.g. |kappa| = 0 or Re kappa = 0)."""


class NodeError(HJSLabError):
    """Amplitude below the node floor where a phase is required."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DegenerateStateError(HJSLabError):
    """State is identically zero."""


class BlowUpError(HJSLabError):
    """Numerical blow-up detected during time stepping."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InputError(HJSLabError):
    """Malformed input to a diagnostic (too few samples, mismatched runs)."""


class ConsistencyError(HJSLabError):
    """An internal consistency check failed (e.g. spurious imaginary part)."""


class DomainError(HJSLabError):
    """Argument outside the mathematical domain of an operation."""


class PhaseUnwrapError(HJSLabError):
    """Per-cell phase increment too large for reliable unwrapping."""
