"""Exception hierarchy shared by all modules."""


class PropinquityError(Exception):
    """Base class."""


class ValidationError(PropinquityError, ValueError):
    """Malformed input: wrong shapes, non-Hermitian densities, bad metrics."""


class InvalidMorphismError(ValidationError):
    """A linear map that fails the *-homomorphism checks."""


class CertificateError(PropinquityError):
    """A structural certificate (kernel, Leibniz, tunnel admissibility) failed."""


class InconsistentSeminormError(CertificateError):
    """An LP or ascent detected an unbounded problem, i.e. a kernel defect."""


class NonConvergenceError(PropinquityError):
    """An iterative solver hit its iteration cap."""


class ResourceError(PropinquityError):
    """A requested resolution exceeds the memory or enumeration budget."""

    def __init__(self, message, minimal=None):
        super().__init__(message)
        self.minimal = minimal
