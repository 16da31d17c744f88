"""The three subdivision operators and their shared stencil kernels.

All schemes compute every new position from level-k positions only, so each
step is one linear map. New vertices are ordered canonically: images of old
vertices first (same index as their parent), then face points by face index,
then edge points by canonical edge order. This makes outputs deterministic
and diff-stable.

Rule dispatch per old vertex follows the classification precedence
corner > crease/boundary > smooth interior. Smooth interior vertices of the
centroid-split schemes relax with the valence-dependent weight
(4 - 2 cos(2 pi / n)) / 9 at every valence; the 1-to-4 scheme uses the
bucketed weights of ``alpha``.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import EmptyNeighborhood, InvalidValence
from .mesh import TriMesh
from .tagging import SharpnessTags, vertex_kind_codes


class SchemeKind(Enum):
    SQRT3 = "sqrt3"
    LOOP = "loop"
    HYBRID = "hybrid"


# ---------------------------------------------------------------------------
# stencil weights


def sqrt3_alpha(n: int) -> float:
    """Relaxation weight (4 - 2 cos(2 pi / n)) / 9 of the centroid-split
    scheme, defined for every valence n >= 3."""
    if n < 3:
        raise InvalidValence(f"valence must be >= 3, got {n}")
    return (4.0 - 2.0 * math.cos(2.0 * math.pi / n)) / 9.0


def alpha(n: int, kind: str = "interior") -> float:
    """Bucketed relaxation weight for the ring-average vertex rule.

    kind "boundary": 3/16. kind "interior": 3/8 for 3 < n < 6, the
    valence-dependent sqrt3 weight for n >= 6, and its n=3 value 5/9 for
    interior valence-3 vertices (the buckets leave that case open).
    """
    if n < 3:
        raise InvalidValence(f"valence must be >= 3, got {n}")
    if kind == "boundary":
        return 3.0 / 16.0
    if kind != "interior":
        raise ValueError(f"kind must be 'interior' or 'boundary', got {kind!r}")
    if 3 < n < 6:
        return 3.0 / 8.0
    return sqrt3_alpha(n)


def bucket_alpha_array(deg):
    """Vectorized ``alpha(n, "interior")`` over a valence array."""
    deg = np.asarray(deg)
    out = (4.0 - 2.0 * np.cos(2.0 * np.pi / np.maximum(deg, 3))) / 9.0
    out = np.where((deg > 3) & (deg < 6), 3.0 / 8.0, out)
    return out


def sqrt3_alpha_array(deg):
    deg = np.asarray(deg)
    return (4.0 - 2.0 * np.cos(2.0 * np.pi / np.maximum(deg, 3))) / 9.0


def update_vertex(p, neighbors, a: float):
    """Ring-average relaxation (1 - a) p + a * mean(neighbors)."""
    neighbors = np.asarray(neighbors, dtype=np.float64)
    if neighbors.size == 0:
        raise EmptyNeighborhood("vertex update requires at least one neighbor")
    p = np.asarray(p, dtype=np.float64)
    return (1.0 - a) * p + a * neighbors.mean(axis=0)


def crease_even_update(prev, v, nxt):
    """Cubic-spline even mask 1/8, 3/4, 1/8 along a crease or boundary."""
    prev = np.asarray(prev, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nxt = np.asarray(nxt, dtype=np.float64)
    return 0.125 * prev + 0.75 * v + 0.125 * nxt


def crease_odd_point(a, b):
    """Midpoint mask for crease and boundary edges."""
    return (np.asarray(a, dtype=np.float64) + np.asarray(b, dtype=np.float64)) * 0.5


def loop_interior_edge_point(a, b, c, d):
    """Interior edge mask 3/8 (a + b) + 1/8 (c + d); c, d are the vertices
    opposite the edge in its two incident triangles."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    return 0.375 * (a + b) + 0.125 * (c + d)


def face_centroid(corners):
    """Arithmetic mean of a triangle's three corners."""
    corners = np.asarray(corners, dtype=np.float64)
    return (corners[0] + corners[1] + corners[2]) / 3.0


def modified_odd_weights(n: int):
    """Endpoint weights for interior edge points next to a high-valence vertex.

    Returns (w_major, w_minor); unmodified (1/2, 1/4) for n <= 6, the
    valence-adapted pair for n > 6. When applied, the major weight goes to
    the high-valence endpoint, the minor to the other, and the remaining
    mass (always 1/4) splits equally over the two opposite vertices.
    """
    if n < 3:
        raise InvalidValence(f"valence must be >= 3, got {n}")
    if n <= 6:
        return (0.5, 0.25)
    c = math.cos(2.0 * math.pi / (n - 1))
    return (0.25 + 0.25 * c, 0.5 - 0.25 * c)


@dataclass(frozen=True)
class StencilWeights:
    """The fixed masks used by the schemes; every mask sums to 1."""

    crease_even: tuple = (0.125, 0.75, 0.125)
    crease_odd: tuple = (0.5, 0.5)
    loop_odd: tuple = (0.375, 0.375, 0.125, 0.125)

    @staticmethod
    def alpha(n, kind="interior"):
        return alpha(n, kind)

    @staticmethod
    def modified_odd(n):
        return modified_odd_weights(n)


# ---------------------------------------------------------------------------
# provenance

KIND_SOURCE = 0
KIND_VERTEX_IMAGE = 1
KIND_FACE_POINT = 2
KIND_EDGE_POINT = 3

RULE_SOURCE = 0
RULE_SMOOTH = 1
RULE_CREASE = 2
RULE_CORNER = 3
RULE_BOUNDARY = 4
RULE_CENTROID = 5
RULE_EDGE_MIDPOINT = 6
RULE_EDGE_LOOP = 7
RULE_EDGE_LOOP_MODIFIED = 8

RULE_NAMES = {
    RULE_SOURCE: "source",
    RULE_SMOOTH: "smooth-vertex",
    RULE_CREASE: "crease-vertex",
    RULE_CORNER: "corner-pin",
    RULE_BOUNDARY: "boundary-vertex",
    RULE_CENTROID: "face-centroid",
    RULE_EDGE_MIDPOINT: "crease-midpoint",
    RULE_EDGE_LOOP: "interior-edge",
    RULE_EDGE_LOOP_MODIFIED: "interior-edge-adapted",
}


@dataclass(frozen=True)
class VertexOrigin:
    kind: str  # "source" | "vertex-image" | "face-point" | "edge-point"
    rule: str
    source: tuple  # (old vertex,), (face,), or (edge a, edge b)


@dataclass(frozen=True)
class Provenance:
    """Per-vertex origin arrays for one subdivision level."""

    kind: np.ndarray
    rule: np.ndarray
    src_a: np.ndarray
    src_b: np.ndarray

    _KIND_NAMES = {
        KIND_SOURCE: "source",
        KIND_VERTEX_IMAGE: "vertex-image",
        KIND_FACE_POINT: "face-point",
        KIND_EDGE_POINT: "edge-point",
    }

    def __len__(self):
        return len(self.kind)

    def origin(self, i: int) -> VertexOrigin:
        k = int(self.kind[i])
        if k == KIND_EDGE_POINT:
            src = (int(self.src_a[i]), int(self.src_b[i]))
        else:
            src = (int(self.src_a[i]),)
        return VertexOrigin(self._KIND_NAMES[k], RULE_NAMES[int(self.rule[i])], src)

    @staticmethod
    def source_level(nv: int) -> "Provenance":
        idx = np.arange(nv, dtype=np.int64)
        return Provenance(
            np.zeros(nv, dtype=np.int64),
            np.zeros(nv, dtype=np.int64),
            idx,
            np.full(nv, -1, dtype=np.int64),
        )


@dataclass(frozen=True)
class SubdivisionRecord:
    """One refinement level: mesh, its tags, and where each vertex came from."""

    level: int
    mesh: TriMesh
    tags: SharpnessTags
    provenance: Provenance


# ---------------------------------------------------------------------------
# the refinement engine (array level, dimension-agnostic)


@dataclass
class RefineResult:
    vertices: np.ndarray
    faces: np.ndarray
    sharp_edge_pairs: np.ndarray  # (m, 2) new-index pairs
    sharp_face_ids: np.ndarray  # (k,) new face indices
    provenance: Provenance


def _opposite_corners(F, FE, EF, ne):
    """Third corner of each face adjacent to each edge, per edge-face slot."""
    opp = np.full((ne, 2), -1, dtype=np.int64)
    nf = len(F)
    face_ids = np.arange(nf, dtype=np.int64)
    for i in range(3):
        eids = FE[:, i]
        corner = F[:, (i + 2) % 3]
        in_slot0 = EF[eids, 0] == face_ids
        opp[eids[in_slot0], 0] = corner[in_slot0]
        opp[eids[~in_slot0], 1] = corner[~in_slot0]
    return opp


def _vertex_images(V, E, sharp_edge, boundary, bac, interior_alpha):
    nv = len(V)
    kinds = vertex_kind_codes(E, sharp_edge, boundary, nv, bac)
    sums, deg = kernels.ring_sums(E, V, nv)
    out = np.empty_like(V)
    rule = np.empty(nv, dtype=np.int64)

    smooth = kinds == 0
    if smooth.any():
        d = deg[smooth]
        safe = np.maximum(d, 3)
        a = np.where(d > 0, interior_alpha(safe), 0.0)
        out[smooth] = kernels.smooth_evens(V[smooth], sums[smooth], np.maximum(d, 1), a)
        rule[smooth] = RULE_SMOOTH

    bnd = kinds == 3
    if bnd.any():
        d = deg[bnd]
        a = np.where(d > 0, 3.0 / 16.0, 0.0)
        out[bnd] = kernels.smooth_evens(V[bnd], sums[bnd], np.maximum(d, 1), a)
        rule[bnd] = RULE_BOUNDARY

    corner = kinds == 2
    if corner.any():
        out[corner] = V[corner]
        rule[corner] = RULE_CORNER

    crease = kinds == 1
    if crease.any():
        crease_edges = E[sharp_edge | boundary] if bac else E[sharp_edge]
        ends = np.concatenate([crease_edges[:, 0], crease_edges[:, 1]])
        other = np.concatenate([crease_edges[:, 1], crease_edges[:, 0]])
        sel = crease[ends]
        ends, other = ends[sel], other[sel]
        order = np.argsort(ends, kind="stable")
        ends, other = ends[order], other[order]
        vs = ends[0::2]  # crease vertices have exactly two crease edges
        out[vs] = kernels.crease_evens(other[0::2], vs, other[1::2], V)
        rule[crease] = RULE_CREASE
    return out, rule, deg


def _edge_point_positions(V, E, split, crease_mid, opp, deg, modified_odd):
    """Positions and rule codes for split edges, in canonical edge order."""
    split_ids = np.flatnonzero(split)
    n_split = len(split_ids)
    d = V.shape[1]
    pts = np.empty((n_split, d), dtype=np.float64)
    rules = np.empty(n_split, dtype=np.int64)
    rank = np.cumsum(split) - 1  # rank of each split edge among split edges

    mid_sel = split & crease_mid
    if mid_sel.any():
        ids = np.flatnonzero(mid_sel)
        pts[rank[ids]] = kernels.midpoints(E[ids], V)
        rules[rank[ids]] = RULE_EDGE_MIDPOINT

    loop_sel = split & ~crease_mid
    if loop_sel.any():
        ids = np.flatnonzero(loop_sel)
        a = E[ids, 0]
        b = E[ids, 1]
        quads = np.stack([a, b, opp[ids, 0], opp[ids, 1]], axis=1)
        w = np.empty((len(ids), 4), dtype=np.float64)
        w[:] = (0.375, 0.375, 0.125, 0.125)
        rl = np.full(len(ids), RULE_EDGE_LOOP, dtype=np.int64)
        if modified_odd:
            ext_a = (deg[a] > 6) & (deg[b] <= 6)
            ext_b = (deg[b] > 6) & (deg[a] <= 6)
            for mask, hi in ((ext_a, a), (ext_b, b)):
                if mask.any():
                    n_hi = deg[hi[mask]]
                    c = np.cos(2.0 * np.pi / (n_hi - 1))
                    w_major = 0.25 + 0.25 * c
                    w_minor = 0.5 - 0.25 * c
                    rl[mask] = RULE_EDGE_LOOP_MODIFIED
                    if hi is a:
                        w[mask, 0] = w_major
                        w[mask, 1] = w_minor
                    else:
                        w[mask, 0] = w_minor
                        w[mask, 1] = w_major
        pts[rank[ids]] = kernels.weighted4(quads, w, V)
        rules[rank[ids]] = rl
    return split_ids, pts, rules


def refine_arrays(
    V,
    F,
    table,
    sharp_edge,
    sharp_face,
    topology: str,
    interior_alpha,
    boundary_as_crease: bool = True,
    modified_odd: bool = False,
) -> RefineResult:
    """One refinement step on raw arrays.

    topology "hybrid": smooth faces get a centroid and their untagged
    interior edges between two smooth faces are replaced by the diagonal
    connecting the adjacent centroids; tagged faces are 1-to-4 split and
    re-tagged. topology "loop": every face is 1-to-4 split.
    """
    nv, dim = V.shape
    nf = len(F)
    E = table.edges
    EF = table.edge_faces
    FE = table.face_edges
    ne = len(E)
    boundary = table.boundary_mask

    if topology == "loop":
        split = np.ones(ne, dtype=bool)
        touches_sharp = np.zeros(ne, dtype=bool)
    elif topology == "hybrid":
        touches_sharp = np.zeros(ne, dtype=bool)
        for slot in range(2):
            f = EF[:, slot]
            valid = f >= 0
            touches_sharp[valid] |= sharp_face[f[valid]]
        split = sharp_edge | touches_sharp | (boundary & boundary_as_crease)
    else:
        raise ValueError(f"unknown topology {topology!r}")
    crease_mid = sharp_edge | boundary

    new_old, old_rules, deg = _vertex_images(
        V, E, sharp_edge, boundary, boundary_as_crease, interior_alpha
    )

    # face points: centroids of smooth faces (hybrid only)
    if topology == "hybrid":
        smooth_faces = np.flatnonzero(~sharp_face)
        face_pts = kernels.face_centroids(F[smooth_faces], V)
        face_pt_idx = np.full(nf, -1, dtype=np.int64)
        face_pt_idx[smooth_faces] = nv + np.arange(len(smooth_faces), dtype=np.int64)
        n_face_pts = len(smooth_faces)
    else:
        smooth_faces = np.zeros(0, dtype=np.int64)
        face_pts = np.zeros((0, dim), dtype=np.float64)
        face_pt_idx = np.full(nf, -1, dtype=np.int64)
        n_face_pts = 0

    opp = _opposite_corners(F, FE, EF, ne) if nf else np.full((ne, 2), -1, np.int64)
    split_ids, edge_pts, edge_rules = _edge_point_positions(
        V, E, split, crease_mid, opp, deg, modified_odd
    )
    edge_pt_idx = np.full(ne, -1, dtype=np.int64)
    edge_pt_idx[split_ids] = nv + n_face_pts + np.arange(len(split_ids), dtype=np.int64)

    V2 = np.concatenate([new_old, face_pts, edge_pts], axis=0)

    # ---- faces
    if topology == "loop":
        m = edge_pt_idx[FE]  # (nf, 3): midpoints of (v0,v1), (v1,v2), (v2,v0)
        F2 = np.empty((4 * nf, 3), dtype=np.int64)
        F2[0::4] = np.stack([F[:, 0], m[:, 0], m[:, 2]], axis=1)
        F2[1::4] = np.stack([F[:, 1], m[:, 1], m[:, 0]], axis=1)
        F2[2::4] = np.stack([F[:, 2], m[:, 2], m[:, 1]], axis=1)
        F2[3::4] = m
        sharp_face_rows = 4 * np.flatnonzero(sharp_face)[:, None] + np.arange(4)
    else:
        flip = ~split & ~boundary
        keep = ~split & boundary
        split_f = split[FE]  # (nf, 3)
        keep_f = keep[FE]
        slot_parts = np.where(split_f, 2, np.where(keep_f, 1, 0))
        slot_parts[sharp_face] = 0
        face_rows = np.where(sharp_face, 4, slot_parts.sum(axis=1))
        face_offsets = np.zeros(nf, dtype=np.int64)
        if nf:
            face_offsets[1:] = np.cumsum(face_rows)[:-1]
        total_face_rows = int(face_rows.sum())
        flip_ids = np.flatnonzero(flip)
        F2 = np.empty((total_face_rows + 2 * len(flip_ids), 3), dtype=np.int64)

        sf = np.flatnonzero(sharp_face)
        sharp_face_rows = face_offsets[sf][:, None] + np.arange(4)
        if len(sf):
            m = edge_pt_idx[FE[sf]]
            rows = face_offsets[sf]
            F2[rows + 0] = np.stack([F[sf, 0], m[:, 0], m[:, 2]], axis=1)
            F2[rows + 1] = np.stack([F[sf, 1], m[:, 1], m[:, 0]], axis=1)
            F2[rows + 2] = np.stack([F[sf, 2], m[:, 2], m[:, 1]], axis=1)
            F2[rows + 3] = m

        slot_off = np.concatenate(
            [np.zeros((nf, 1), np.int64), np.cumsum(slot_parts, axis=1)[:, :2]], axis=1
        )
        smooth_mask = ~sharp_face
        for i in range(3):
            e = FE[:, i]
            vi = F[:, i]
            vj = F[:, (i + 1) % 3]
            ctr = face_pt_idx
            base = face_offsets + slot_off[:, i]
            s_rows = smooth_mask & split_f[:, i]
            if s_rows.any():
                r = base[s_rows]
                mid = edge_pt_idx[e[s_rows]]
                F2[r] = np.stack([vi[s_rows], mid, ctr[s_rows]], axis=1)
                F2[r + 1] = np.stack([mid, vj[s_rows], ctr[s_rows]], axis=1)
            k_rows = smooth_mask & keep_f[:, i]
            if k_rows.any():
                r = base[k_rows]
                F2[r] = np.stack([vi[k_rows], vj[k_rows], ctr[k_rows]], axis=1)

        if len(flip_ids):
            a = E[flip_ids, 0]
            b = E[flip_ids, 1]
            c1 = face_pt_idx[EF[flip_ids, 0]]  # centroid left of a->b
            c2 = face_pt_idx[EF[flip_ids, 1]]
            base = total_face_rows + 2 * np.arange(len(flip_ids), dtype=np.int64)
            F2[base] = np.stack([a, c2, c1], axis=1)
            F2[base + 1] = np.stack([c2, b, c1], axis=1)

    # ---- tags of the refined mesh
    tagged_ids = np.flatnonzero(sharp_edge)
    if len(tagged_ids):
        a = E[tagged_ids, 0]
        b = E[tagged_ids, 1]
        m = edge_pt_idx[tagged_ids]
        sharp_pairs = np.concatenate(
            [np.stack([a, m], axis=1), np.stack([m, b], axis=1)], axis=0
        )
    else:
        sharp_pairs = np.zeros((0, 2), dtype=np.int64)
    sharp_face_ids = np.sort(sharp_face_rows.ravel()) if sharp_face.any() else np.zeros(
        0, dtype=np.int64
    )

    # ---- provenance
    n2 = len(V2)
    kind = np.empty(n2, dtype=np.int64)
    rule = np.empty(n2, dtype=np.int64)
    src_a = np.full(n2, -1, dtype=np.int64)
    src_b = np.full(n2, -1, dtype=np.int64)
    kind[:nv] = KIND_VERTEX_IMAGE
    rule[:nv] = old_rules
    src_a[:nv] = np.arange(nv)
    kind[nv : nv + n_face_pts] = KIND_FACE_POINT
    rule[nv : nv + n_face_pts] = RULE_CENTROID
    src_a[nv : nv + n_face_pts] = smooth_faces
    kind[nv + n_face_pts :] = KIND_EDGE_POINT
    rule[nv + n_face_pts :] = edge_rules
    src_a[nv + n_face_pts :] = E[split_ids, 0]
    src_b[nv + n_face_pts :] = E[split_ids, 1]

    return RefineResult(
        V2, F2, sharp_pairs, sharp_face_ids, Provenance(kind, rule, src_a, src_b)
    )


# ---------------------------------------------------------------------------
# public steps


def _result_to_mesh(res: RefineResult) -> TriMesh:
    return TriMesh(res.vertices, res.faces)


def _result_tags(res: RefineResult) -> SharpnessTags:
    return SharpnessTags.from_iterables(res.sharp_edge_pairs, res.sharp_face_ids)


def sqrt3_step(mesh: TriMesh, boundary_as_crease: bool = True) -> TriMesh:
    """One centroid-insertion step: a centroid per face, ring-average
    relaxation of old vertices, and every interior old edge replaced by the
    diagonal between the adjacent centroids. Boundary edges are treated as
    creases unless disabled."""
    res = refine_arrays(
        mesh.vertices,
        mesh.faces,
        mesh.edge_table,
        np.zeros(mesh.n_edges, dtype=bool),
        np.zeros(mesh.n_faces, dtype=bool),
        topology="hybrid",
        interior_alpha=sqrt3_alpha_array,
        boundary_as_crease=boundary_as_crease,
    )
    return _result_to_mesh(res)


def loop_step(
    mesh: TriMesh,
    tags: SharpnessTags = SharpnessTags(),
    boundary_as_crease: bool = True,
    modified_odd: bool = False,
) -> TriMesh:
    """One 1-to-4 step: a point on every edge (interior 4-point mask, crease
    and boundary edges by midpoint), old vertices relaxed per their class."""
    tags.validate_against(mesh)
    res = refine_arrays(
        mesh.vertices,
        mesh.faces,
        mesh.edge_table,
        tags.edge_mask(mesh),
        tags.face_mask(mesh),
        topology="loop",
        interior_alpha=bucket_alpha_array,
        boundary_as_crease=boundary_as_crease,
        modified_odd=modified_odd,
    )
    return _result_to_mesh(res)


def hybrid_step(
    record: SubdivisionRecord,
    boundary_as_crease: bool = True,
    modified_odd: bool = False,
) -> SubdivisionRecord:
    """One feature-preserving step.

    Smooth faces follow the centroid scheme; tagged faces are 1-to-4 split
    with the four children re-tagged; tagged edges get a midpoint, are never
    flipped, and pass their tag to both children.
    """
    mesh, tags = record.mesh, record.tags
    tags.validate_against(mesh)
    res = refine_arrays(
        mesh.vertices,
        mesh.faces,
        mesh.edge_table,
        tags.edge_mask(mesh),
        tags.face_mask(mesh),
        topology="hybrid",
        interior_alpha=sqrt3_alpha_array,
        boundary_as_crease=boundary_as_crease,
        modified_odd=modified_odd,
    )
    return SubdivisionRecord(
        record.level + 1, _result_to_mesh(res), _result_tags(res), res.provenance
    )


def subdivide(
    mesh: TriMesh,
    tags: SharpnessTags,
    scheme: SchemeKind,
    levels: int,
    boundary_as_crease: bool = True,
    modified_odd: bool = False,
) -> list:
    """Run `levels` steps of the chosen scheme; returns records 0..levels
    with record 0 echoing the input."""
    if levels < 0:
        raise ValueError("levels must be >= 0")
    if scheme is SchemeKind.SQRT3 and not tags.empty:
        raise ValueError("the sqrt3 baseline takes no sharpness tags; use hybrid")
    tags.validate_against(mesh)
    records = [
        SubdivisionRecord(0, mesh, tags, Provenance.source_level(mesh.n_vertices))
    ]
    for _ in range(levels):
        cur = records[-1]
        if scheme is SchemeKind.LOOP:
            res = refine_arrays(
                cur.mesh.vertices,
                cur.mesh.faces,
                cur.mesh.edge_table,
                cur.tags.edge_mask(cur.mesh),
                cur.tags.face_mask(cur.mesh),
                topology="loop",
                interior_alpha=bucket_alpha_array,
                boundary_as_crease=boundary_as_crease,
                modified_odd=modified_odd,
            )
            records.append(
                SubdivisionRecord(
                    cur.level + 1, _result_to_mesh(res), _result_tags(res), res.provenance
                )
            )
        else:
            records.append(
                hybrid_step(
                    cur, boundary_as_crease=boundary_as_crease, modified_odd=modified_odd
                )
            )
    return records
