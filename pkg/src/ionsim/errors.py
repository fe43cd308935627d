"""Exception hierarchy shared by all ionsim modules.

The CLI maps these onto its exit-code contract: configuration/schema
problems exit 2, numerical failures exit 3, capacity overruns exit 4.
"""


class IonsimError(Exception):
    """Base class for all ionsim errors."""


class ConfigError(IonsimError):
    """Invalid user input, schema violation, or unknown registry key."""


class UnknownSpeciesError(ConfigError):
    """Requested ion species is not in the registry."""


class DomainError(ConfigError):
    """Argument outside the physical domain of a formula (e.g. nu <= 0)."""


class ConvergenceError(IonsimError):
    """Iterative solver failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InstabilityError(IonsimError):
    """Hessian not positive definite (e.g. zigzag onset of a radial mode)."""


class CapacityError(IonsimError):
    """Problem size exceeds a hard cap (Hilbert-space or basis dimension)."""


class TruncationError(IonsimError):
    """Fock-space cutoff too small for the requested operation or state."""


class ProtocolError(IonsimError):
    """Measurement protocol preconditions violated (e.g. wrong preparation)."""


class AccuracyError(IonsimError):
    """Integrator accuracy guard tripped; refinement suggested."""


class ValidityWarning(UserWarning):
    """Result computed outside a stated validity regime; interpret with care."""
