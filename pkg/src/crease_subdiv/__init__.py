"""Triangle-mesh subdivision with sharp-feature preservation.

Three refinement operators over one mesh core: a centroid-split scheme
(sqrt3), a 1-to-4 scheme with crease rules (loop), and a hybrid that keeps
tagged edges and faces sharp while smoothing everything else. A spectral
analysis module verifies the schemes' contraction behavior numerically.
"""

from .analysis import (
    AnalysisReport,
    CharacteristicMapSample,
    ConditionCheck,
    LocalConfiguration,
    SpectrumReport,
    ValenceTrace,
    analyze_scheme,
    characteristic_map,
    check_sqrt3_conditions,
    check_tangent_plane_condition,
    convergence_ratio,
    expected_sqrt3_spectrum,
    local_matrix,
    loop_subdominant,
    loop_third_eigenvalue,
    n_regular_patch,
    spectrum,
    two_step_map,
    valence_trace,
)
from .errors import (
    ComplexSubdominantPair,
    ConfigurationTooSmall,
    CreaseSubdivError,
    DegenerateEigenvector,
    DegenerateFace,
    DuplicateTag,
    EmptyNeighborhood,
    FaceIndexOutOfRange,
    InconsistentOrientation,
    IndexOutOfRange,
    InvalidValence,
    MeshError,
    NonManifold,
    NonSquare,
    NonTriangleFace,
    ParseError,
    TagMeshMismatch,
    TagUnknownEdge,
    TooFewLevels,
    UnknownEdge,
)
from .io import read_obj, read_tags, write_obj, write_tags
from .kernels import active_backend, set_backend
from .mesh import (
    TriMesh,
    ValidationReport,
    build_mesh,
    edge_key,
    euler_characteristic,
    one_ring,
    validate_manifold,
)
from .schemes import (
    Provenance,
    SchemeKind,
    StencilWeights,
    SubdivisionRecord,
    alpha,
    crease_even_update,
    crease_odd_point,
    face_centroid,
    hybrid_step,
    loop_interior_edge_point,
    loop_step,
    modified_odd_weights,
    sqrt3_alpha,
    sqrt3_step,
    subdivide,
    update_vertex,
)
from .tagging import (
    EdgeClass,
    FaceClass,
    SharpnessTags,
    VertexClass,
    VertexKind,
    classify_edge,
    classify_face,
    classify_vertex,
    sharp_edge_count,
)

__version__ = "0.1.0"
