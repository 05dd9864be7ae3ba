"""Exception taxonomy. The CLI maps these onto exit codes (2/3/4)."""

from __future__ import annotations


class NetmirrorError(Exception):
    """Base class for package errors."""


class ConfigError(NetmirrorError):
    """Invalid or inconsistent configuration (CLI exit code 2)."""


class DataError(NetmirrorError):
    """Malformed, out-of-contract, or unreadable data (CLI exit code 3)."""


class NumericalError(NetmirrorError):
    """A numerical precondition failed (CLI exit code 4)."""


class RankDeficiencyError(NumericalError):
    """Requested spectral dimension hits a non-positive eigenvalue.

    Carries the offending eigenvalue list so callers can retry with a
    smaller dimension or zero-pad.
    """

    def __init__(self, message: str, eigenvalues):
        super().__init__(message)
        self.eigenvalues = list(eigenvalues)


class NotPositiveSemidefiniteError(NumericalError):
    """A matrix required to be PSD has a clearly negative eigenvalue."""
