"""Exception types shared across the package."""

from __future__ import annotations


class TmdynError(Exception):
    """Base class for all package errors."""


class MachineFormatError(TmdynError, ValueError):
    """Raised for malformed machine descriptions (syntax or validation).

    ``line`` carries the 1-based source line when the error comes from a file.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlphabetMismatchError(TmdynError, ValueError):
    """Raised when combining machines over different alphabets."""


class GuardError(TmdynError, ValueError):
    """Raised when a brute-force oracle is asked for more than its guard allows."""


class BudgetExceededError(TmdynError, RuntimeError):
    """A computation ran out of its resource budget.

    ``resource`` names the limit that was hit ("nodes", "seconds",
    "graph-vertices", "sft-words").  Upper-bound computations treat this as a
    hard failure because partial enumeration is unsound in that direction.
    """

    def __init__(self, resource: str, message: str = ""):
        self.resource = resource
        super().__init__(message or f"budget exceeded: {resource}")


class UnreachableCycleError(TmdynError, ValueError):
    """Raised when a certificate is requested for a cycle not reachable from an initial vertex."""


class CertificateError(TmdynError, RuntimeError):
    """A periodic certificate failed its own consistency check (internal bug indicator)."""
