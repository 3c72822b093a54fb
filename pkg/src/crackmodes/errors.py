"""Exception types raised by the solvers."""


class CrackModesError(Exception):
    """Base class for all numerical failures in this package."""


class BracketFailure(CrackModesError):
    pass


class ConvergenceFailure(CrackModesError):
    pass


class RootCountMismatch(CrackModesError):
    pass


class NotAnEigenpair(CrackModesError):
    pass


class GammaZero(CrackModesError):
    pass


class SingularSystem(CrackModesError):
    pass


class OnEssentialSpectrum(CrackModesError):
    pass


class QuadratureFailure(CrackModesError):
    pass


class NoSignChange(CrackModesError):
    pass


class FixedPointDivergence(CrackModesError):
    pass


class DegenerateFit(CrackModesError):
    pass


class IngredientMismatch(CrackModesError):
    pass


class ConfigError(ValueError):
    """Invalid run configuration (not a numerical failure)."""
