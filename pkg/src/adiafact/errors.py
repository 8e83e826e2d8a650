"""Exception taxonomy shared across the package.

The CLI maps these onto distinct process exit codes; library users can
catch the common base class ``AdiafactError``.
"""

from __future__ import annotations


class AdiafactError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(AdiafactError):
    """Invalid configuration or operation parameters (CLI exit code 2)."""


class UnsatisfiableInstanceError(AdiafactError):
    """A clause system admits no satisfying assignment (CLI exit code 3)."""


class DecodeVerificationError(AdiafactError):
    """A decoded assignment fails the product check p*q == N (CLI exit code 4)."""


class ResourceLimitError(AdiafactError):
    """A size cap (qubit count, variable count) was exceeded."""


class ContractViolationError(AdiafactError):
    """An input violates a documented operation precondition (e.g. non-Hermitian matrix)."""
