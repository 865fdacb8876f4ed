"""Exception hierarchy shared by all modules."""


class EllipticBetheError(Exception):
    """Base class for package errors."""


class ThetaDomainError(EllipticBetheError, ValueError):
    """Non-finite argument or modular parameter outside the upper half-plane."""


class ThetaRangeError(EllipticBetheError, OverflowError):
    """Quasi-periodicity prefactor exceeds the double-precision range."""

    def __init__(self, exponent: float):
        super().__init__(f"theta prefactor exponent {exponent:.1f} out of range")
        self.exponent = exponent


class PoleError(EllipticBetheError, ZeroDivisionError):
    """Evaluation too close to a zero of a denominator."""

    def __init__(self, message: str, argument=None):
        super().__init__(message)
        self.argument = argument


class SingularGaugeError(EllipticBetheError):
    """Gauge matrix or gamma factor degenerate at the requested point."""


class DegenerateConfigurationError(EllipticBetheError):
    """Colliding Bethe roots or roots on an inhomogeneity."""


class SingularConfigurationError(EllipticBetheError):
    """Overlap-matrix entry too close to a pole; carries the (row, column) pair."""

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


class NotOnShellError(EllipticBetheError):
    """The left state does not solve the Bethe equations."""


class IllConditionedStateError(EllipticBetheError):
    """Gaudin determinant (or a comparable normaliser) numerically vanishes."""
