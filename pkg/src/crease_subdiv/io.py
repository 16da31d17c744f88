"""Mesh and tag file IO: Wavefront OBJ plus a line-oriented tags sidecar.

Indices are 1-based in files and 0-based in memory. Coordinates are written
with 17 significant digits so write-then-read reproduces doubles exactly.
Malformed input is rejected, never repaired.

Tags sidecar grammar (UTF-8):
    line 1:   # crease-subdiv tags v1
    e <i> <j>   sharp edge between 1-based vertex indices i and j
    f <k>       sharp face, 1-based face index
    blank lines and further #-comments are ignored; anything else is an error.
"""

import numpy as np

from .errors import (
    DuplicateTag,
    FaceIndexOutOfRange,
    IndexOutOfRange,
    NonTriangleFace,
    ParseError,
    TagUnknownEdge,
)
from .mesh import TriMesh, build_mesh, edge_key
from .tagging import SharpnessTags

TAGS_HEADER = "# crease-subdiv tags v1"

# non-geometry OBJ keywords accepted and skipped
_OBJ_IGNORED = {"vn", "vt", "vp", "o", "g", "s", "usemtl", "mtllib", "l"}


def read_obj_arrays(path):
    """Parse `v x y z` and triangular `f` records into raw arrays without
    building adjacency, so defective meshes can still be diagnosed.
    Everything the mesh does not need (normals, texture coordinates, object
    names) is skipped."""
    positions = []
    faces = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            keyword = parts[0]
            if keyword == "v":
                if len(parts) != 4:
                    raise ParseError(path, line_no, "vertex record needs 3 coordinates")
                try:
                    positions.append([float(x) for x in parts[1:]])
                except ValueError:
                    raise ParseError(path, line_no, "bad coordinate") from None
            elif keyword == "f":
                refs = parts[1:]
                if len(refs) > 3:
                    raise NonTriangleFace(path, line_no, f"face with {len(refs)} vertices")
                if len(refs) < 3:
                    raise ParseError(path, line_no, "face record needs 3 vertices")
                idx = []
                for ref in refs:
                    field = ref.split("/")[0]
                    try:
                        i = int(field)
                    except ValueError:
                        raise ParseError(path, line_no, f"bad face index {ref!r}") from None
                    if i < 0:
                        raise ParseError(
                            path, line_no, "relative (negative) indices are not supported"
                        )
                    if not 1 <= i <= len(positions):
                        raise IndexOutOfRange(path, line_no, f"vertex index {i} out of range")
                    idx.append(i - 1)
                faces.append(idx)
            elif keyword in _OBJ_IGNORED:
                continue
            else:
                raise ParseError(path, line_no, f"unrecognized record {keyword!r}")
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    return positions, faces


def read_obj(path) -> TriMesh:
    """Parse an OBJ file and build a validated mesh."""
    return build_mesh(*read_obj_arrays(path))


def write_obj(mesh: TriMesh, path) -> None:
    """Write vertices then faces in index order, coordinates at 17
    significant digits (bit-exact round trip for float64)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# crease-subdiv mesh\n")
        for x, y, z in mesh.vertices:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for a, b, c in mesh.faces:
            fh.write(f"f {a + 1} {b + 1} {c + 1}\n")


def read_tags(path, mesh: TriMesh) -> SharpnessTags:
    """Parse a tags sidecar and validate every reference against the mesh."""
    edges = set()
    faces = set()
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if first.rstrip("\n") != TAGS_HEADER:
            raise ParseError(path, 1, f"expected header {TAGS_HEADER!r}")
        for line_no, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "e" and len(parts) == 3:
                try:
                    i, j = int(parts[1]), int(parts[2])
                except ValueError:
                    raise ParseError(path, line_no, "bad edge indices") from None
                if i == j:
                    raise ParseError(path, line_no, "edge endpoints must differ")
                if not (1 <= i <= mesh.n_vertices and 1 <= j <= mesh.n_vertices):
                    raise TagUnknownEdge(path, line_no, f"edge ({i}, {j}) vertex out of range")
                key = edge_key(i - 1, j - 1)
                if not mesh.has_edge(*key):
                    raise TagUnknownEdge(path, line_no, f"({i}, {j}) is not an edge of the mesh")
                if key in edges:
                    raise DuplicateTag(path, line_no, f"edge ({i}, {j}) tagged twice")
                edges.add(key)
            elif parts[0] == "f" and len(parts) == 2:
                try:
                    k = int(parts[1])
                except ValueError:
                    raise ParseError(path, line_no, "bad face index") from None
                if not 1 <= k <= mesh.n_faces:
                    raise FaceIndexOutOfRange(path, line_no, f"face index {k} out of range")
                if k - 1 in faces:
                    raise DuplicateTag(path, line_no, f"face {k} tagged twice")
                faces.add(k - 1)
            else:
                raise ParseError(path, line_no, f"unrecognized tag record {line!r}")
    return SharpnessTags(frozenset(edges), frozenset(faces))


def write_tags(tags: SharpnessTags, path) -> None:
    """Emit tags in canonical order: edges sorted by key, then faces ascending."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TAGS_HEADER + "\n")
        for a, b in sorted(tags.sharp_edges):
            fh.write(f"e {a + 1} {b + 1}\n")
        for f in sorted(tags.sharp_faces):
            fh.write(f"f {f + 1}\n")
