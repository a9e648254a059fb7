"""Exception types raised across the package."""


class DiscordDynError(Exception):
    """Base class for all package errors."""


class NonPhysicalState(DiscordDynError, ValueError):
    """Correlation triple lies outside the Bell-diagonal tetrahedron."""


class NotBellDiagonal(DiscordDynError, ValueError):
    """Density matrix has entries outside the Bell-diagonal pattern."""


class DomainError(DiscordDynError, ValueError):
    """A probability or count parameter is out of its allowed range."""


class UnsupportedPair(DiscordDynError, ValueError):
    """Two-sided channel combination without a Bell-diagonal closed form."""


class UnsupportedChannel(DiscordDynError, ValueError):
    """Channel kind not handled by the requested operation."""


class OrderingViolation(DiscordDynError, ValueError):
    """Initial state does not satisfy |d1| < |d2| < |d3|."""


class NumericalError(DiscordDynError, ArithmeticError):
    """A square root argument or spectrum failed its PSD tolerance."""
