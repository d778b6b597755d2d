"""Exception hierarchy shared by the numerical modules and the harness.

Library code raises these and never exits the process; ``main.py`` maps them
to exit codes (2 for configuration/model problems, 3 for numeric failures).
"""

from typing import Optional


class ResponseError(Exception):
    """Root of every error raised by boxresponse."""


class InvalidModelError(ResponseError):
    """A model description cannot be turned into a Hamiltonian."""


class DimensionError(ResponseError):
    """A vector does not match the dimension of the operator it meets."""


class ConfigError(ResponseError):
    """The experiment configuration or CLI overrides are inconsistent."""


class NumericError(ResponseError):
    """A numerical routine failed or produced an untrustworthy result."""

    def __init__(self, message: str, index: Optional[int] = None) -> None:
        super().__init__(message)
        self.index = index


class SingularShiftError(NumericError):
    """A real resolvent shift coincides with a computed eigenvalue."""


class ThresholdError(NumericError):
    """A boundary value was requested too close to a spectral threshold."""


class StepSizeError(NumericError):
    """The time stepper lost unitarity beyond the allowed drift."""


class FitError(NumericError):
    """Too few usable points remain for a convergence-law fit."""


class DegeneracyWarning(UserWarning):
    """The lowest eigenvalue is degenerate within the residual tolerance."""
