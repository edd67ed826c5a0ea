"""Exception types shared across the package."""


class CapabilityError(ValueError):
    """The request is valid but exceeds what this implementation supports."""


class NumericError(ArithmeticError):
    """A numeric invariant was violated (NaN loss, large imaginary residue, ...)."""


class EmptyBatchError(ValueError):
    """No valid preference pairs could be formed from the sample batch."""
