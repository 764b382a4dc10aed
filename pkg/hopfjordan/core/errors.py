"""Exception hierarchy shared by the algebra layers and the CLI.

Every error carries an ``exit_code``: 1 for domain failures (a certificate or
a mathematical precondition failed), 2 for input failures (unreadable or
malformed files).
"""

from __future__ import annotations

from typing import Any, Optional, Sequence


class HopfJordanError(Exception):
    """Base class for all package errors.

    ``stage`` is filled in by the pipeline with the stage that raised.
    """
    exit_code = 1
    stage: Optional[str] = None


# spectra

class UnsupportedSizeError(HopfJordanError):
    """Input exceeds a desk-scale cap."""


class ShapeError(HopfJordanError):
    """Matrix shapes do not fit the operation."""


class SingularInputError(HopfJordanError):
    """A matrix or eigenvalue that must be invertible is (numerically) zero."""


class IllConditionedSpectrumError(HopfJordanError):
    """Eigenvalue clusters cannot be separated at the requested tolerance."""


class ContractViolationError(HopfJordanError):
    """An operation precondition on its numeric input does not hold."""


# groupcore

class NotFiniteError(HopfJordanError):
    """A closure grew past its cap."""


class NotNormalError(HopfJordanError):
    """A quotient was requested by a subgroup that is not normal."""


class NonCentralError(HopfJordanError):
    """The ℤ-fibre of an extension is not central (nontrivial action sign)."""


class HypothesisViolationError(HopfJordanError):
    """Inputs violate the hypotheses of an index-preservation certificate."""


class ModelInconsistencyError(HopfJordanError):
    """A matrix model disagrees with its extension model."""


class CertificationError(HopfJordanError):
    """Two computations that must agree did not. Always a bug."""


# hopfpipe

class InvalidModelError(HopfJordanError):
    """A validation certificate failed."""

    def __init__(self, certificate: str, detail: str = "", certificates: Sequence[Any] = ()) -> None:
        self.certificate = certificate
        self.certificates = list(certificates)
        message = f"certificate '{certificate}' failed"
        super().__init__(f"{message}: {detail}" if detail else message)


class InfiniteQuotientError(HopfJordanError):
    """Coset enumeration exceeded the quotient cap."""


class IllConditionedModelError(HopfJordanError):
    """The contraction's determinant is too close to modulus one."""


# cli

class SpecParseError(HopfJordanError):
    """Input file could not be parsed; ``path`` locates the first problem."""
    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
