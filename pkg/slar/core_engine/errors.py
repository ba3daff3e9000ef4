"""Exception hierarchy shared by the core engine"""

from typing import Optional


class SlarError(Exception):
    """Base class for all errors raised by slar"""


class ConfigurationError(SlarError, ValueError):
    """Invalid settings, run configuration or unsupported tree/strategy combination"""


class ShapeMismatchError(SlarError, ValueError):
    """Trees, shapes or vector lengths do not agree"""


class IndexBoundsError(SlarError, IndexError):
    """Multi-index outside the declared tensor shape"""


class DenseSizeError(SlarError, MemoryError):
    """Dense reconstruction would exceed the configured entry cap"""


class NonFiniteValueError(SlarError, FloatingPointError):
    """NaN or Inf produced by an accessor, residual or field"""


class StepFailure(SlarError):
    """A time step could not be completed"""

    def __init__(self, step_index: int, message: str, cause: Optional[BaseException] = None):
        super().__init__(f"Step {step_index} failed: {message}")
        self.step_index = step_index
        self.cause = cause
