"""Exception types shared across the package."""


class MoebLabError(Exception):
    """Base class for all package-specific errors."""


class SizingError(MoebLabError):
    """An input exceeds a configured size/memory cap or addressable range."""


class DomainError(MoebLabError):
    """An argument lies outside the mathematical domain of the operation."""


class ParameterError(MoebLabError):
    """A parameter combination violates a required inequality.

    The message names the failed inequality.
    """


class PrecisionError(MoebLabError):
    """Working precision was insufficient to certify a strict inequality."""


class ResonanceError(MoebLabError):
    """A denominator e(m*alpha) - 1 vanishes exactly (rational alpha)."""


class ConjugacyError(MoebLabError):
    """Supplied maps fail to be mutually inverse within tolerance."""
