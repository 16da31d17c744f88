"""Exception types shared across the package."""


class CreaseSubdivError(Exception):
    """Base class for all errors raised by crease_subdiv."""


class MeshError(CreaseSubdivError):
    """Topological or combinatorial defect in a mesh."""


class NonManifold(MeshError):
    """An edge is shared by more than two faces."""


class DegenerateFace(MeshError):
    """A face references the same vertex more than once."""


class InconsistentOrientation(MeshError):
    """Two faces traverse a shared edge in the same direction."""


class UnknownEdge(MeshError):
    """An edge reference does not exist in the mesh."""


class TagMeshMismatch(CreaseSubdivError):
    """Sharpness tags reference elements missing from the mesh."""


class InvalidValence(CreaseSubdivError):
    """Valence outside the supported range (n >= 3)."""


class EmptyNeighborhood(CreaseSubdivError):
    """A vertex update was requested with no neighbors."""


class ParseError(CreaseSubdivError):
    """Malformed input file; carries path and line number."""

    def __init__(self, path, line_no, reason):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason


class NonTriangleFace(ParseError):
    """A face record with a vertex count other than three."""


class IndexOutOfRange(ParseError):
    """A 1-based index outside the valid range."""


class FaceIndexOutOfRange(ParseError):
    """A face tag outside the valid range."""


class DuplicateTag(ParseError):
    """The same edge or face tagged twice in one file."""


class TagUnknownEdge(ParseError, UnknownEdge):
    """A tagged edge that is not an edge of the companion mesh."""


class AnalysisError(CreaseSubdivError):
    """Errors raised by the spectral-analysis machinery."""


class NonSquare(AnalysisError):
    """Eigenanalysis requested for a non-square matrix."""


class ConfigurationTooSmall(AnalysisError):
    """Local configuration or resolution insufficient for the requested analysis."""


class ComplexSubdominantPair(AnalysisError):
    """Subdominant eigenvalues form a genuinely complex pair."""


class DegenerateEigenvector(AnalysisError):
    """Subdominant eigenvectors do not span a 2D plane."""


class TooFewLevels(AnalysisError):
    """Not enough subdivision levels for the requested estimate."""
