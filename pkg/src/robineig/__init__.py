"""Robin eigenvalue problems on polygons with P1 finite elements.

Second-order elliptic operators with Robin boundary conditions
d u / d nu + theta u = 0 on polygonal domains: assembly of the sesquilinear
form, generalized Hermitian eigensolves, and numerical verification that
eigenvalues increase strictly when the boundary coefficient does.
"""

from .errors import (
    ComparisonFailed,
    ConvergenceFailure,
    DegenerateEdge,
    DependentVectors,
    EmptyRegion,
    InsufficientSpectrum,
    LabelCountMismatch,
    LabelMissing,
    MeshFailure,
    MismatchedMeshes,
    NonConvergent,
    NotElliptic,
    NotPositiveDefinite,
    ParseError,
    QuadratureFailure,
    RobinEigError,
    SelfIntersection,
    SingularBoundaryMass,
    ValidationError,
    ZeroVector,
)
from .geometry import (
    BoundaryEdge,
    BoundaryRegion,
    PolygonalDomain,
    TriangleMesh,
    boundary_region,
    build_polygon,
    mesh_uniform,
    read_mesh,
    refine,
    write_mesh,
)
from .coeffs import (
    ComparisonReport,
    EllipticCoefficients,
    RobinCoefficient,
    anisotropic_trig,
    check_ellipticity,
    check_hermitian,
    coefficients_from_config,
    constant_coefficients,
    edge_gauss_params,
    isotropic_poly,
    laplacian,
    robin_compare,
    robin_constant,
    robin_from_callables,
    robin_from_config,
    robin_indicator,
)
from .assembly import (
    BoundaryFunction,
    FormMatrices,
    assemble_a0,
    assemble_boundary_mass,
    assemble_form,
    assemble_mass,
    boundary_l2_norm,
    conormal_recover,
    direct_form_value,
    load_matrix,
    robin_residual,
    save_matrix,
)
from .spectra import (
    Spectrum,
    counting,
    eigenspace,
    form_lower_bound,
    rayleigh,
    reference_eigenvalues,
    solve_pencil,
    subspace_certificate,
)
from .theorems import (
    EigencurveTable,
    MonotonicityReport,
    NidResult,
    RichardsonResult,
    TraceCertificate,
    eigencurve_sweep,
    monotonicity_report,
    nid_check,
    richardson_extrapolate,
    trace_certificate,
    weak_monotonicity_exact,
)
from .config import ExperimentConfig, parse_config
from .checks import CheckResult, run_all_checks

__version__ = "0.1.0"
