"""Exception types raised by slope_lab."""


class SlopeLabError(Exception):
    """Base class for all library errors."""


class InputError(SlopeLabError, ValueError):
    """Malformed or inconsistent input (dimension mismatch, dependent generators, bad config)."""


class DomainError(SlopeLabError, ValueError):
    """A point lies outside the domain of a function or body."""


class ContractError(SlopeLabError):
    """A caller-asserted precondition was found to be false."""
