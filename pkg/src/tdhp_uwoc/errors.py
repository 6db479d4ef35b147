"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the physical or mathematical domain of an operation."""


class NoSolution(ArithmeticError):
    """A target BER cannot be reached at any SNR.

    ``floor`` is the asymptotic BER as SNR grows without bound.
    """

    def __init__(self, message: str, floor: float = float("nan")):
        super().__init__(message)
        self.floor = floor


class ConfigError(ValueError):
    """Invalid or incomplete run configuration (unknown key, bad value, missing field)."""
