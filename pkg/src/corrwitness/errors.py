"""
corrwitness - Exception hierarchy

Domain errors subclass ValueError so existing `except ValueError` call sites keep
working; internal cross-check failures subclass AssertionError.
"""
from typing import Optional


class CorrWitnessError(Exception):
    """Base class for all corrwitness errors."""


class DimensionMismatchError(CorrWitnessError, ValueError):
    """Operator shapes disagree with each other or with the declared dims."""


class InvalidOperatorError(CorrWitnessError, ValueError):
    """A construction-time invariant (Hermiticity, trace, PSD, unitarity) failed."""

    def __init__(self, invariant: str, value: float, threshold: float,
                 message: Optional[str] = None):
        self.invariant = invariant
        self.value = value
        self.threshold = threshold
        super().__init__(
            message or f"{invariant} violated: measured {value:.3e}, threshold {threshold:.3e}"
        )


class EigenDecompositionError(CorrWitnessError, ArithmeticError):
    """The Hermitian eigensolver did not converge."""


class UncorrelatedStateError(CorrWitnessError, ValueError):
    """A witness was requested for R = 0."""


class NotSaturableError(CorrWitnessError, ValueError):
    """Optimal unitary requested although n is not a multiple of d_E."""


class IdenticalStatesError(CorrWitnessError, ValueError):
    """Two-state saturation requested for sigma_SE = rho_SE."""


class ScenarioError(CorrWitnessError, ValueError):
    """A protocol precondition does not hold for the supplied states."""


class OperatorFileError(CorrWitnessError, ValueError):
    """Malformed JSON operator or configuration file."""


class ConsistencyError(CorrWitnessError, AssertionError):
    """An internal numerical cross-check failed."""


class ConfigurationError(CorrWitnessError, ValueError):
    """Invalid run parameters (grid, chain size, config keys)."""
