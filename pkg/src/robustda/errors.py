"""Exception hierarchy shared across the package."""


class RobustDAError(Exception):
    """Base class for all errors raised by robustda."""


class ConfigurationError(RobustDAError):
    """Invalid user-supplied configuration (bad alpha, unknown column, ...)."""


class IngestionError(RobustDAError):
    """A data file could not be parsed into a valid dataset."""


class ShapeError(RobustDAError):
    """Dimension mismatch between inputs."""


class DegenerateClassError(RobustDAError):
    """A class is too small or its covariance is (numerically) singular."""


class ExactFitError(RobustDAError):
    """More than h cases lie on an affine hyperplane, so the optimal
    covariance determinant is zero and no positive-definite scatter exists.

    Attributes
    ----------
    center : point on the hyperplane
    normal : unit normal of the hyperplane
    """

    def __init__(self, message, center=None, normal=None):
        super().__init__(message)
        self.center = center
        self.normal = normal


class PlotError(RobustDAError):
    """A plot cannot be built from the given inputs."""
