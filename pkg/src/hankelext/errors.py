"""Exception hierarchy.

Three families map onto the CLI exit codes: input errors (1), algorithmic
failures (2) and structural infeasibility (3).
"""

from __future__ import annotations


class ArtifactError(Exception):
    """Base class. `stage` names the pipeline step that raised, if known."""

    def __init__(self, message: str = "", stage: str | None = None):
        super().__init__(message)
        self.stage = stage

    def __str__(self) -> str:
        msg = super().__str__()
        return f"[{self.stage}] {msg}" if self.stage else msg


class InputError(ArtifactError):
    pass


class AlgorithmicFailure(ArtifactError):
    pass


class StructuralInfeasibility(ArtifactError):
    pass


# input errors
class ParseError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class OutOfRange(InputError):
    pass


class OrderTooSmall(InputError):
    pass


class OrderUnsupported(InputError):
    pass


class NotPrime(InputError):
    pass


class Singular(InputError):
    pass


# algorithmic failures
class Unreachable(AlgorithmicFailure):
    pass


class DefectiveSpectrum(AlgorithmicFailure):
    pass


class Defective(DefectiveSpectrum):
    pass


class NormalizationFailure(AlgorithmicFailure):
    pass


class EigenvalueMismatch(AlgorithmicFailure):
    pass


class ResidualTooLarge(AlgorithmicFailure):
    pass


class SingularPrincipalBlock(AlgorithmicFailure):
    pass


class ExtensionFailed(AlgorithmicFailure):
    pass


class Unverifiable(AlgorithmicFailure):
    pass


class InternalMismatch(AlgorithmicFailure):
    pass


class ZeroParameter(InputError):
    pass


# structural
class NotEnoughEquations(StructuralInfeasibility):
    pass
