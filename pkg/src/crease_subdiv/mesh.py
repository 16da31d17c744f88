"""Indexed triangle mesh with derived adjacency and topological validation.

Vertex indices are zero-based and stable; faces are index triples with
consistent counter-clockwise winding. Geometric degeneracy (coincident
positions) is allowed everywhere; only combinatorial defects are errors.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateFace,
    InconsistentOrientation,
    NonManifold,
    UnknownEdge,
)


def edge_key(a: int, b: int) -> tuple:
    """Canonical unordered edge key (min, max). Endpoints must differ."""
    if a == b:
        raise ValueError(f"degenerate edge ({a}, {b})")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class EdgeTable:
    """Canonical edge list plus edge<->face incidence.

    edges       (ne, 2) int64, rows sorted lexicographically, a < b per row
    face_edges  (nf, 3) int64, edge id of (F[i], F[i+1]) per corner slot
    edge_faces  (ne, 2) int64, slot 0 holds the face traversing a->b,
                slot 1 the face traversing b->a, -1 when absent
    """

    edges: np.ndarray
    face_edges: np.ndarray
    edge_faces: np.ndarray

    @property
    def boundary_mask(self):
        return (self.edge_faces < 0).any(axis=1)

    def lookup(self) -> dict:
        """Map canonical (a, b) tuple to edge id."""
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.edges)}


def _check_faces(n_vertices, faces):
    if faces.size:
        if faces.min() < 0 or faces.max() >= n_vertices:
            bad = int(np.flatnonzero((faces < 0).any(1) | (faces >= n_vertices).any(1))[0])
            raise IndexError(f"face {bad} references a vertex out of range")
        dup = (
            (faces[:, 0] == faces[:, 1])
            | (faces[:, 1] == faces[:, 2])
            | (faces[:, 2] == faces[:, 0])
        )
        if dup.any():
            raise DegenerateFace(f"face {int(np.flatnonzero(dup)[0])} repeats a vertex index")


def build_edge_table(faces, n_vertices) -> EdgeTable:
    """Construct the canonical edge table; raises on non-manifold or
    inconsistently wound input."""
    faces = np.ascontiguousarray(faces, dtype=np.int64)
    nf = len(faces)
    if nf == 0:
        return EdgeTable(
            np.zeros((0, 2), np.int64), np.zeros((0, 3), np.int64), np.zeros((0, 2), np.int64)
        )
    u = faces[:, [0, 1, 2]].ravel()
    v = faces[:, [1, 2, 0]].ravel()
    a = np.minimum(u, v)
    b = np.maximum(u, v)
    keys = a * np.int64(n_vertices) + b
    edges_keys, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    if (counts > 2).any():
        eid = int(np.flatnonzero(counts > 2)[0])
        ea, eb = divmod(int(edges_keys[eid]), n_vertices)
        raise NonManifold(f"edge ({ea}, {eb}) is shared by {int(counts[eid])} faces")
    directed = u * np.int64(n_vertices) + v
    _, dir_counts = np.unique(directed, return_counts=True)
    if (dir_counts > 1).any():
        # find one offending undirected edge for the message
        order = np.argsort(directed, kind="stable")
        srt = directed[order]
        pos = int(np.flatnonzero(srt[1:] == srt[:-1])[0])
        du, dv = divmod(int(srt[pos]), n_vertices)
        raise InconsistentOrientation(
            f"edge ({du}, {dv}) is traversed twice in the same direction"
        )
    edges = np.stack(divmod(edges_keys, np.int64(n_vertices)), axis=1)
    face_edges = inverse.reshape(nf, 3)
    edge_faces = np.full((len(edges), 2), -1, dtype=np.int64)
    slot = (u > v).astype(np.int64)
    face_ids = np.repeat(np.arange(nf, dtype=np.int64), 3)
    edge_faces[inverse, slot] = face_ids
    return EdgeTable(edges, face_edges, edge_faces)


class TriMesh:
    """Immutable triangle mesh: positions, faces, and adjacency.

    Construct through build_mesh; direct construction skips validation.
    """

    def __init__(self, vertices, faces, edge_table=None):
        self.vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64).reshape(-1, 3)
        if self.vertices.ndim != 2:
            raise ValueError("vertices must be an (n, d) array")
        self.edge_table = edge_table or build_edge_table(self.faces, len(self.vertices))
        self.vertices.setflags(write=False)
        self.faces.setflags(write=False)
        self._around = None
        self._edge_lookup = None

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def edges(self):
        return self.edge_table.edges

    @property
    def n_edges(self):
        return len(self.edge_table.edges)

    def edge_id(self, a: int, b: int) -> int:
        if self._edge_lookup is None:
            self._edge_lookup = self.edge_table.lookup()
        try:
            return self._edge_lookup[edge_key(int(a), int(b))]
        except KeyError:
            raise UnknownEdge(f"edge ({a}, {b}) not in mesh") from None

    def has_edge(self, a: int, b: int) -> bool:
        if self._edge_lookup is None:
            self._edge_lookup = self.edge_table.lookup()
        return edge_key(int(a), int(b)) in self._edge_lookup

    def vertex_degrees(self):
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def boundary_edge_mask(self):
        return self.edge_table.boundary_mask

    def boundary_vertex_mask(self):
        mask = np.zeros(self.n_vertices, dtype=bool)
        bnd = self.edges[self.edge_table.boundary_mask]
        mask[bnd.ravel()] = True
        return mask

    def _around_map(self):
        # (v, a) -> b for every face (v, a, b) rotation; b is the CCW-next
        # neighbor of a around v.
        if self._around is None:
            around = {}
            for x, y, z in self.faces:
                around[(int(x), int(y))] = int(z)
                around[(int(y), int(z))] = int(x)
                around[(int(z), int(x))] = int(y)
            self._around = around
        return self._around


def build_mesh(positions, faces) -> TriMesh:
    """Validate and build a TriMesh.

    Raises DegenerateFace, NonManifold, InconsistentOrientation or IndexError
    on combinatorial defects; coincident positions are permitted.
    """
    positions = np.ascontiguousarray(positions, dtype=np.float64)
    faces = np.ascontiguousarray(faces, dtype=np.int64).reshape(-1, 3)
    _check_faces(len(positions), faces)
    table = build_edge_table(faces, len(positions))
    return TriMesh(positions, faces, table)


def euler_characteristic(mesh: TriMesh) -> int:
    """V - E + F."""
    return mesh.n_vertices - mesh.n_edges + mesh.n_faces


def one_ring(mesh: TriMesh, v: int) -> list:
    """Neighbor indices around v: cyclic order for interior vertices,
    open path order (boundary to boundary) for boundary vertices.

    Assumes a disk-like neighborhood; for a bowtie vertex (two fans glued at
    one vertex) only the fan containing the deterministic start is walked.
    """
    if not 0 <= v < mesh.n_vertices:
        raise IndexError(f"vertex {v} out of range")
    around = mesh._around_map()
    neighbors = set()
    e = mesh.edges
    for a, b in e[(e[:, 0] == v) | (e[:, 1] == v)]:
        neighbors.add(int(b) if a == v else int(a))
    if not neighbors:
        return []
    successors = {a: around[(v, a)] for a in neighbors if (v, a) in around}
    has_pred = set(successors.values())
    starts = sorted(n for n in neighbors if n not in has_pred)
    if starts:
        start = starts[0]  # boundary fan: unique start for a manifold vertex
    else:
        start = min(neighbors)  # interior: any start, smallest for determinism
    ring = [start]
    cur = start
    while cur in successors:
        cur = successors[cur]
        if cur == start:
            return ring
        ring.append(cur)
    return ring


@dataclass
class ValidationReport:
    """Lists of combinatorial violations; empty lists mean the mesh is valid."""

    out_of_range_faces: list = field(default_factory=list)
    degenerate_faces: list = field(default_factory=list)
    non_manifold_edges: list = field(default_factory=list)
    misoriented_edges: list = field(default_factory=list)
    isolated_vertices: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.out_of_range_faces
            or self.degenerate_faces
            or self.non_manifold_edges
            or self.misoriented_edges
            or self.isolated_vertices
        )

    def lines(self) -> list:
        out = []
        for f in self.out_of_range_faces:
            out.append(f"face {f}: vertex index out of range")
        for f in self.degenerate_faces:
            out.append(f"face {f}: repeated vertex index")
        for a, b, c in self.non_manifold_edges:
            out.append(f"edge ({a}, {b}): shared by {c} faces (non-manifold)")
        for a, b in self.misoriented_edges:
            out.append(f"edge ({a}, {b}): traversed twice in the same direction")
        for v in self.isolated_vertices:
            out.append(f"vertex {v}: isolated (no incident face)")
        return out

    def __str__(self):
        return "\n".join(self.lines()) if self.lines() else "ok"


def validate_manifold(positions, faces=None) -> ValidationReport:
    """Collect all combinatorial violations without raising.

    Accepts either a TriMesh or raw (positions, faces) arrays, so meshes that
    build_mesh would reject can still be diagnosed.
    """
    if isinstance(positions, TriMesh):
        mesh = positions
        positions, faces = mesh.vertices, mesh.faces
    positions = np.asarray(positions, dtype=np.float64)
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    nv = len(positions)
    report = ValidationReport()

    in_range = np.ones(len(faces), dtype=bool)
    if faces.size:
        in_range = ~((faces < 0).any(1) | (faces >= nv).any(1))
        report.out_of_range_faces = np.flatnonzero(~in_range).tolist()
        dup = (
            (faces[:, 0] == faces[:, 1])
            | (faces[:, 1] == faces[:, 2])
            | (faces[:, 2] == faces[:, 0])
        )
        report.degenerate_faces = np.flatnonzero(in_range & dup).tolist()
        good = faces[in_range & ~dup]
    else:
        good = faces

    used = np.zeros(nv, dtype=bool)
    if good.size:
        used[good.ravel()] = True
        u = good[:, [0, 1, 2]].ravel()
        v = good[:, [1, 2, 0]].ravel()
        a = np.minimum(u, v)
        b = np.maximum(u, v)
        keys, counts = np.unique(a * np.int64(nv) + b, return_counts=True)
        for k, c in zip(keys[counts > 2], counts[counts > 2]):
            ea, eb = divmod(int(k), nv)
            report.non_manifold_edges.append((ea, eb, int(c)))
        dkeys, dcounts = np.unique(u * np.int64(nv) + v, return_counts=True)
        seen = set()
        for k in dkeys[dcounts > 1]:
            du, dv = divmod(int(k), nv)
            kk = edge_key(du, dv)
            if kk not in seen and (kk[0], kk[1], None) not in report.non_manifold_edges:
                seen.add(kk)
        # report orientation problems only for manifold edges
        nm = {(ea, eb) for ea, eb, _ in report.non_manifold_edges}
        report.misoriented_edges = sorted(k for k in seen if k not in nm)
    report.isolated_vertices = np.flatnonzero(~used).tolist()
    return report
