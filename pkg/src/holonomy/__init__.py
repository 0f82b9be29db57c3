"""Numerical parallel transport for matrix Lie groups.

Local connection 1-forms over an open cover, transition functions obeying the
Cech cocycle law, path-ordered exponentials as the local transport, and their
gluing into global transport, holonomy, Wilson lines and Chern numbers.  The
structural laws (cocycle conditions, functoriality, gauge covariance,
curvature relations) ship as executable checks.
"""

__version__ = "0.1.0"

from .connection import (
    AlgebraCurve,
    GaugeFunction,
    LocalConnectionForm,
    constant_form,
    curvature,
    gauge_transform,
    monopole_form,
    polynomial_form,
    pullback_1form,
    pure_gauge_form,
    zero_form,
)
from .descent import (
    AnchorChoice,
    CocycleMorphism,
    DifferentialCocycle,
    FactoredPath,
    extract_descent,
    extraction_morphism,
    factor_path,
    reconstruct_transport,
    reconstruction_oracle,
    transform_cocycle,
    verify_cocycle,
    verify_morphism,
)
from .errors import (
    BasepointMismatch,
    CoverMismatch,
    DimensionMismatch,
    EmptyOverlap,
    EndpointMismatch,
    HolonomyError,
    InvalidReparam,
    JumpOutsideOverlap,
    MissingSample,
    NoCoveringSet,
    OutOfDomain,
    OutOfRadius,
    SceneError,
    ToleranceNotReached,
    TooFarFromGroup,
    UnsupportedGroup,
)
from .geometry import (
    Cover,
    CoverSet,
    Manifold,
    Path,
    PathPartition,
    compose_paths,
    decompose_path,
    invert_path,
    plane_grid_cover,
    reparameterize,
    tangent,
    two_caps_cover,
)
from .groups import (
    AlgebraElement,
    GroupElement,
    GroupSpec,
    adjoint,
    commutator,
    exp_map,
    log_map,
    project_to_algebra,
    repair_to_group,
    right_maurer_cartan,
)
from .scenes import Scene, load_scene
from .solver import (
    SolverConfig,
    TransportResult,
    check_cocycle_identity,
    check_gauge_covariance,
    path_ordered_exp,
    recover_form,
    transport_local,
)
from .wilson import (
    Representation,
    SectionSample,
    check_flat_section,
    chern_number,
    holonomy_map,
    small_loop_curvature,
    transport_vector,
    wilson_line,
)

__all__ = [
    "AlgebraCurve",
    "AlgebraElement",
    "AnchorChoice",
    "BasepointMismatch",
    "CocycleMorphism",
    "Cover",
    "CoverMismatch",
    "CoverSet",
    "DifferentialCocycle",
    "DimensionMismatch",
    "EmptyOverlap",
    "EndpointMismatch",
    "FactoredPath",
    "GaugeFunction",
    "GroupElement",
    "GroupSpec",
    "HolonomyError",
    "InvalidReparam",
    "JumpOutsideOverlap",
    "LocalConnectionForm",
    "Manifold",
    "MissingSample",
    "NoCoveringSet",
    "OutOfDomain",
    "OutOfRadius",
    "Path",
    "PathPartition",
    "Representation",
    "Scene",
    "SceneError",
    "SectionSample",
    "SolverConfig",
    "ToleranceNotReached",
    "TooFarFromGroup",
    "TransportResult",
    "UnsupportedGroup",
    "adjoint",
    "check_cocycle_identity",
    "check_flat_section",
    "check_gauge_covariance",
    "chern_number",
    "commutator",
    "compose_paths",
    "constant_form",
    "curvature",
    "decompose_path",
    "exp_map",
    "extract_descent",
    "extraction_morphism",
    "factor_path",
    "gauge_transform",
    "holonomy_map",
    "invert_path",
    "load_scene",
    "log_map",
    "monopole_form",
    "path_ordered_exp",
    "plane_grid_cover",
    "polynomial_form",
    "project_to_algebra",
    "pullback_1form",
    "pure_gauge_form",
    "reconstruct_transport",
    "reconstruction_oracle",
    "recover_form",
    "repair_to_group",
    "reparameterize",
    "right_maurer_cartan",
    "small_loop_curvature",
    "tangent",
    "transform_cocycle",
    "transport_local",
    "transport_vector",
    "two_caps_cover",
    "verify_cocycle",
    "verify_morphism",
    "wilson_line",
    "zero_form",
]
