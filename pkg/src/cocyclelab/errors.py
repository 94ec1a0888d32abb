"""Exception types raised across the package."""


class CocycleLabError(Exception):
    """Base class for all package errors."""


class SingularMatrix(CocycleLabError):
    """A matrix required to be invertible is (numerically) singular."""


class AlphabetMismatch(CocycleLabError):
    """Two cocycles or weight vectors have different alphabet sizes."""


class InvalidCocycle(CocycleLabError):
    """Cocycle data violates its invariants (weights, invertibility)."""


class NotDiagonal(CocycleLabError):
    """A cocycle assumed simultaneously diagonal is not."""


class BudgetExceeded(CocycleLabError):
    """An exact enumeration would exceed the configured work budget."""


class UnnormalizedMeasure(CocycleLabError):
    """A particle measure does not have total mass 1."""


class OutOfRange(CocycleLabError):
    """A path position (plus window margin) falls outside the sampled range."""


class NotConverged(CocycleLabError):
    """Fixed-point iteration stopped above tolerance.

    Carries the best iterate so the caller can still use it.
    """

    def __init__(self, message, measure=None, residual=None):
        super().__init__(message)
        self.measure = measure
        self.residual = residual


class DegenerateGap(CocycleLabError):
    """Singular values of a product are too close to resolve a direction."""


class WordNotInCylinder(CocycleLabError):
    """A word required to lie in the defining cylinder does not."""


class InvalidParams(CocycleLabError):
    """Construction parameters out of range."""


class InsufficientReturns(CocycleLabError):
    """Too few returns to the cylinder were observed along the sampled path."""


class PerturbationLeavesGL(CocycleLabError):
    """A perturbed matrix became singular."""


class ConfigError(CocycleLabError):
    """Malformed or incomplete experiment configuration."""
