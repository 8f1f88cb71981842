"""Exception hierarchy shared by all bosonlab modules."""


class BosonLabError(Exception):
    """Base class for every error raised by bosonlab."""


class DomainError(BosonLabError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class CutoffError(DomainError):
    """A Fock index does not fit below the requested cutoff."""


class TruncationError(BosonLabError, ValueError):
    """The requested state carries too much probability above the cutoff."""

    def __init__(self, message, required_cutoff=None):
        super().__init__(message)
        self.required_cutoff = required_cutoff


class NotAStateError(BosonLabError, ValueError):
    """A matrix violates the density-operator (or covariance) constraints."""


class DimensionMismatchError(BosonLabError, ValueError):
    pass


class PremiseError(BosonLabError, ValueError):
    """Input violates the premise an operation relies on."""


class InvalidTrialError(BosonLabError, ValueError):
    pass


class DivergenceError(BosonLabError, ArithmeticError):
    """A closed-form quantity is infinite for the given parameters."""


class ConfigError(BosonLabError, ValueError):
    pass
