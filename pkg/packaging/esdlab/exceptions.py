# -*- coding: utf-8 -*-

"""Exception hierarchy shared by every esdlab module."""

__all__ = [
    "EsdlabError",
    "ValidationError",
    "DimensionError",
    "HermiticityError",
    "PositivityError",
    "NormalizationError",
    "ChannelError",
    "PostSelectionError",
    "DegeneracyError",
    "IncompletenessError",
    "TrainError",
    "ManifestError",
    "ToleranceError",
]


class EsdlabError(Exception):
    """Base class for all errors raised by esdlab."""


class ValidationError(EsdlabError, ValueError):
    """A parameter, matrix or document failed validation."""


class DimensionError(ValidationError):
    pass


class HermiticityError(ValidationError):

    def __init__(self, norm):
        self.norm = norm
        super().__init__("matrix is not Hermitian: ||M - M^dagger||_inf = %.3e" % norm)


class PositivityError(ValidationError):

    def __init__(self, eigenvalue):
        self.eigenvalue = eigenvalue
        super().__init__("matrix is not positive semidefinite: smallest eigenvalue %.3e" % eigenvalue)


class NormalizationError(ValidationError):
    pass


class ChannelError(ValidationError):
    pass


class PostSelectionError(EsdlabError, ArithmeticError):

    def __init__(self, trace):
        self.trace = trace
        super().__init__("state fully post-selected away (trace %.3e)" % trace)


class DegeneracyError(EsdlabError, ArithmeticError):

    def __init__(self, eigenvalues):
        self.eigenvalues = tuple(eigenvalues)
        super().__init__(
            "largest eigenvalue of the spin-flipped product is degenerate (%s); "
            "first-order perturbation is undefined, use the Monte Carlo estimate instead"
            % ", ".join("%.3e" % v for v in self.eigenvalues))


class IncompletenessError(ValidationError):

    def __init__(self, null_space_dimension):
        self.null_space_dimension = null_space_dimension
        super().__init__("measurement settings are not informationally complete: "
                         "null space dimension %d" % null_space_dimension)


class TrainError(ValidationError):

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(message)


class ManifestError(ValidationError):

    def __init__(self, pointer, message):
        self.pointer = pointer or "/"
        super().__init__("%s: %s" % (self.pointer, message))


class ToleranceError(EsdlabError):
    """A verification result exceeded its tolerance."""
