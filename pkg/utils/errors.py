"""
Exception hierarchy shared by the library and the command line.

Each error carries the exit code the CLI reports for it.
"""


class PackingError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 1

    @property
    def kind(self) -> str:
        return type(self).__name__


class UsageError(PackingError):
    """Unknown flags or malformed command line."""

    exit_code = 2


class InvalidArgumentError(PackingError, ValueError):
    """A domain precondition was violated."""

    exit_code = 3


class DegenerateLatticeError(PackingError, ValueError):
    """Linearly dependent or rank-deficient basis."""

    exit_code = 4


class ArithmeticOverflowError(PackingError, OverflowError):
    """Checked 64-bit arithmetic left its range."""

    exit_code = 5


class CapExceededError(PackingError):
    """An enumeration or coset count exceeded its configured cap."""

    exit_code = 6


class SpecFileError(PackingError):
    """Malformed spec, code or search-config file."""

    exit_code = 7


class EmptyGridError(PackingError):
    """A search grid contained no evaluable point."""

    exit_code = 8


class VerificationError(PackingError):
    """Brute-force verification of a construction failed."""

    exit_code = 9


class BoundDomainError(PackingError):
    """An entropy argument left the interval (0, (Q-1)/Q]."""

    exit_code = 10
