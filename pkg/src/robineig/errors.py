"""Exception types raised by the library.

Every failure mode a caller is expected to handle gets its own class, so the
command-line driver can map each one to a distinct exit status.
"""


class RobinEigError(Exception):
    """Base class for all library errors."""


# -- geometry ---------------------------------------------------------------

class GeometryError(RobinEigError):
    pass


class SelfIntersection(GeometryError):
    """Polygon boundary crosses itself."""


class DegenerateEdge(GeometryError):
    """Polygon has a zero-length segment."""


class LabelCountMismatch(GeometryError):
    """Number of arc labels does not match the number of polygon segments."""


class MeshFailure(GeometryError):
    """Triangulation or refinement could not produce a valid mesh."""


class EmptyRegion(GeometryError):
    """Requested boundary region matches no boundary edge."""


# -- coefficients -----------------------------------------------------------

class CoefficientError(RobinEigError):
    pass


class NotElliptic(CoefficientError):
    """Second-order coefficient fails uniform ellipticity."""


class LabelMissing(CoefficientError):
    """Boundary coefficient has no value for a mesh arc label."""


# -- assembly ---------------------------------------------------------------

class AssemblyError(RobinEigError):
    pass


class QuadratureFailure(AssemblyError):
    """Coefficient evaluation produced non-finite values at quadrature points."""


class SingularBoundaryMass(AssemblyError):
    """Boundary mass system is numerically singular."""


# -- spectra ----------------------------------------------------------------

class SpectrumError(RobinEigError):
    pass


class NotPositiveDefinite(SpectrumError):
    """Mass matrix (or other required SPD matrix) is not positive definite."""


class ConvergenceFailure(SpectrumError):
    """Eigenvalue solver failed to converge to the requested accuracy."""


class InsufficientSpectrum(SpectrumError):
    """Too few eigenvalues computed to answer a counting query."""


class ZeroVector(SpectrumError):
    """Rayleigh quotient of the zero vector requested."""


class DependentVectors(SpectrumError):
    """Subspace certificate given numerically dependent spanning vectors."""


# -- comparisons ------------------------------------------------------------

class TheoremError(RobinEigError):
    pass


class ComparisonFailed(TheoremError):
    """Boundary coefficients are not ordered as required (theta1 <= theta2)."""


class MismatchedMeshes(TheoremError):
    """Operation requires both operands on the same mesh / matrix sizes."""


class NonConvergent(TheoremError):
    """Extrapolation input does not behave like an order-p convergent sequence."""


# -- configuration ----------------------------------------------------------

class ConfigError(RobinEigError):
    pass


class ParseError(ConfigError):
    """Config text is not valid JSON; carries line/column context."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(ConfigError):
    """Config is valid JSON but violates the schema; names the bad field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
