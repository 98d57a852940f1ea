"""Exception hierarchy shared across fdilab modules."""


class FdiLabError(Exception):
    """Base class for all fdilab errors."""


class PositivityViolation(FdiLabError):
    """Bath couplings break the positive-definiteness bound."""


class NumericalFailure(FdiLabError):
    """A numerical kernel (eigensolver, integrator) failed."""


class NonPositiveMode(NumericalFailure):
    """A normal-mode eigenvalue is not strictly positive."""


class StepFailure(NumericalFailure):
    """An adaptive integrator could not meet its tolerance."""


class NegativeEnergy(FdiLabError):
    """An energy function returned a negative value."""


class UnphysicalInitialState(FdiLabError):
    """Initial moments violate the Robertson-Schroedinger bound."""


class NonPositiveR2(FdiLabError):
    """The dissipation factor R^2(t) is not strictly positive."""


class PreconditionFailure(FdiLabError):
    """A documented precondition of an operation does not hold."""


class ConfigError(FdiLabError):
    """A scenario configuration is malformed."""
