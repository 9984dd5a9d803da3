"""Exception types shared across the package."""


class HyperflowError(Exception):
    """Base class for all package errors."""


class DomainError(HyperflowError, ValueError):
    """An input lies outside the domain of a geometric formula."""


class DimensionError(HyperflowError, ValueError):
    """A metric vector does not match the number of edge classes."""


class NotRealizableError(HyperflowError, ValueError):
    """Some tetrahedron is not a genuine hyper-ideal tetrahedron."""


class ManifestError(HyperflowError, ValueError):
    """A triangulation manifest failed to parse or validate.

    ``line`` holds the 1-based line number when the problem is local to a line.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalFailure(HyperflowError, RuntimeError):
    """A numerical procedure (integration, Newton) could not complete."""


class SingularJacobianError(NumericalFailure):
    """The curvature Jacobian is singular at the current metric."""


class InsufficientSamplesError(HyperflowError, ValueError):
    """A trajectory has too few usable samples for the requested analysis."""
