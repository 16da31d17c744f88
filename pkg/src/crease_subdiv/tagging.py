"""Sharpness tags and the element classification that drives rule dispatch.

A tagged edge is a crease; a tagged face is refined by 1-to-4 splitting so
its interior keeps feature character. The two tag sets are independent: a
face whose three edges are all tagged is still a smooth face unless the face
itself is tagged.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import TagMeshMismatch
from .mesh import TriMesh, edge_key


@dataclass(frozen=True)
class SharpnessTags:
    """Sets of sharp edges (canonical vertex pairs) and sharp face indices."""

    sharp_edges: frozenset = frozenset()
    sharp_faces: frozenset = frozenset()

    @staticmethod
    def from_iterables(edges=(), faces=()) -> "SharpnessTags":
        return SharpnessTags(
            frozenset(edge_key(int(a), int(b)) for a, b in edges),
            frozenset(int(f) for f in faces),
        )

    @property
    def empty(self) -> bool:
        return not self.sharp_edges and not self.sharp_faces

    def validate_against(self, mesh: TriMesh) -> None:
        """Raise TagMeshMismatch if any tag references a missing element."""
        for a, b in self.sharp_edges:
            if not (0 <= a < mesh.n_vertices and 0 <= b < mesh.n_vertices):
                raise TagMeshMismatch(f"tagged edge ({a}, {b}) vertex out of range")
            if not mesh.has_edge(a, b):
                raise TagMeshMismatch(f"tagged edge ({a}, {b}) not in mesh")
        for f in self.sharp_faces:
            if not 0 <= f < mesh.n_faces:
                raise TagMeshMismatch(f"tagged face {f} out of range")

    def edge_mask(self, mesh: TriMesh):
        """Boolean mask over the mesh's canonical edge list."""
        mask = np.zeros(mesh.n_edges, dtype=bool)
        for a, b in self.sharp_edges:
            mask[mesh.edge_id(a, b)] = True
        return mask

    def face_mask(self, mesh: TriMesh):
        mask = np.zeros(mesh.n_faces, dtype=bool)
        if self.sharp_faces:
            mask[np.fromiter(self.sharp_faces, dtype=np.int64)] = True
        return mask


class VertexKind(Enum):
    SMOOTH_INTERIOR = "smooth-interior"
    CREASE = "crease"
    CORNER = "corner"
    BOUNDARY = "boundary"


class EdgeClass(Enum):
    SMOOTH_SMOOTH = "smooth-smooth"
    SHARP_BETWEEN_SMOOTH = "sharp-between-smooth"
    MIXED_SMOOTH_SHARP = "mixed-smooth-sharp"
    SHARP_SHARP = "sharp-sharp"
    BOUNDARY_EDGE = "boundary"


class FaceClass(Enum):
    SMOOTH_FACE = "smooth"
    SHARP_FACE = "sharp"


@dataclass(frozen=True)
class VertexClass:
    """Classification of one vertex: kind, valence n, incident sharp count."""

    kind: VertexKind
    n: int
    e_sh: int


def classify_face(mesh: TriMesh, tags: SharpnessTags, f: int) -> FaceClass:
    """Sharp iff the face index is tagged; edge tags play no role."""
    if not 0 <= f < mesh.n_faces:
        raise IndexError(f"face {f} out of range")
    return FaceClass.SHARP_FACE if f in tags.sharp_faces else FaceClass.SMOOTH_FACE


def classify_edge(mesh: TriMesh, tags: SharpnessTags, e) -> EdgeClass:
    """Classify edge e = (a, b) by its adjacent faces and its own tag.

    Face sharpness takes precedence over the edge tag in the naming; the
    result is symmetric in the two adjacent faces.
    """
    a, b = edge_key(*e)
    eid = mesh.edge_id(a, b)  # raises UnknownEdge
    f0, f1 = mesh.edge_table.edge_faces[eid]
    if f0 < 0 or f1 < 0:
        return EdgeClass.BOUNDARY_EDGE
    sharp0 = int(f0) in tags.sharp_faces
    sharp1 = int(f1) in tags.sharp_faces
    if sharp0 and sharp1:
        return EdgeClass.SHARP_SHARP
    if sharp0 or sharp1:
        return EdgeClass.MIXED_SMOOTH_SHARP
    if (a, b) in tags.sharp_edges:
        return EdgeClass.SHARP_BETWEEN_SMOOTH
    return EdgeClass.SMOOTH_SMOOTH


def sharp_edge_count(mesh: TriMesh, tags: SharpnessTags, v: int) -> int:
    """Number of tagged edges incident to v (boundary edges not counted)."""
    if not 0 <= v < mesh.n_vertices:
        raise IndexError(f"vertex {v} out of range")
    return sum(1 for a, b in tags.sharp_edges if a == v or b == v)


def classify_vertex(
    mesh: TriMesh, tags: SharpnessTags, v: int, boundary_as_crease: bool = True
) -> VertexClass:
    """Classify v with precedence corner > crease > boundary > smooth interior.

    With boundary_as_crease (the default) boundary edges count like sharp
    edges, so a plain boundary vertex is a crease vertex and a boundary
    vertex where a tagged polyline ends is a corner.
    """
    kinds = classify_vertices_arrays(mesh, tags, boundary_as_crease)
    deg = mesh.vertex_degrees()
    e_sh = sharp_edge_count(mesh, tags, v)
    return VertexClass(kinds[v], int(deg[v]), e_sh)


_KIND_CODES = (
    VertexKind.SMOOTH_INTERIOR,
    VertexKind.CREASE,
    VertexKind.CORNER,
    VertexKind.BOUNDARY,
)


def classify_vertices_arrays(mesh, tags, boundary_as_crease=True):
    """Vertex kinds for the whole mesh at once (list of VertexKind)."""
    codes = vertex_kind_codes(
        mesh.edges,
        tags.edge_mask(mesh),
        mesh.edge_table.boundary_mask,
        mesh.n_vertices,
        boundary_as_crease,
    )
    return [_KIND_CODES[c] for c in codes]


def vertex_kind_codes(edges, sharp_edge_mask, boundary_edge_mask, nv, boundary_as_crease):
    """Integer vertex kinds: 0 smooth, 1 crease, 2 corner, 3 boundary.

    Array-level core shared with the subdivision engine. An edge that is both
    tagged and on the boundary counts once (the crease-driving edges are the
    set union).
    """
    crease_mask = (
        sharp_edge_mask | boundary_edge_mask if boundary_as_crease else sharp_edge_mask
    )
    crease_deg = np.zeros(nv, dtype=np.int64)
    ce = edges[crease_mask]
    np.add.at(crease_deg, ce[:, 0], 1)
    np.add.at(crease_deg, ce[:, 1], 1)
    bnd_deg = np.zeros(nv, dtype=np.int64)
    be = edges[boundary_edge_mask]
    np.add.at(bnd_deg, be[:, 0], 1)
    np.add.at(bnd_deg, be[:, 1], 1)
    on_boundary = bnd_deg > 0
    codes = np.zeros(nv, dtype=np.int64)
    codes[on_boundary] = 3
    codes[crease_deg == 2] = 1
    codes[crease_deg >= 3] = 2
    return codes
