"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Malformed matrix or parameter (wrong shape, not antisymmetric, ...)."""


class DomainError(ValueError):
    """A scalar function is undefined at one of the Williamson values."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class SingularityError(ArithmeticError):
    """A singular quantity has no finite limit, or a regularized limit is unstable."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class InvalidStateError(ValueError):
    """Covariance matrix violates the bound G^T G <= I."""

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = tuple(offending)


class FaithfulnessError(ValueError):
    """The output state N(sigma) has pure modes and support mode was not requested."""

    def __init__(self, message, pure_modes=()):
        super().__init__(message)
        self.pure_modes = tuple(pure_modes)


class StrictPositivityError(ValueError):
    """A complex power sigma^{it} was requested for a state with pure modes."""


class NumericalConsistencyError(ArithmeticError):
    """A quantity that must be nonnegative came out clearly negative."""


class SizeLimitError(ValueError):
    """Dense-oracle request exceeds the hard mode-count cap."""
