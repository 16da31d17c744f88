"""Numerical smoothness analysis: local subdivision matrices, their spectra,
and a sampled characteristic map.

Local matrices are never transcribed from coefficient tables. They are read
off the actual scheme code by the indicator method: the local configuration
is embedded in a padded n-regular patch, each configuration point carries a
unit indicator coordinate, and the refined configuration's coordinates are
the matrix entries. Rows summing to 1 doubles as a closure check: weight
escaping the configuration would show up as a deficit.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    ComplexSubdominantPair,
    ConfigurationTooSmall,
    DegenerateEigenvector,
    InvalidValence,
    NonSquare,
    TooFewLevels,
)
from .mesh import TriMesh, build_mesh
from .schemes import (
    KIND_EDGE_POINT,
    KIND_FACE_POINT,
    KIND_VERTEX_IMAGE,
    RULE_EDGE_MIDPOINT,
    SchemeKind,
    SharpnessTags,
    SubdivisionRecord,
    bucket_alpha_array,
    refine_arrays,
    sqrt3_alpha,
    sqrt3_alpha_array,
    subdivide,
)

_ROW_SUM_TOL = 1e-9


# ---------------------------------------------------------------------------
# n-regular patch construction


def n_regular_patch(n: int, rings: int):
    """Planar triangulated disk: a valence-n center, every other interior
    vertex valence 6. Returns (positions (N, 2), faces (M, 3))."""
    if n < 3:
        raise InvalidValence(f"valence must be >= 3, got {n}")
    if rings < 1:
        raise ConfigurationTooSmall("patch needs at least one ring")

    def ring_start(m):
        return 1 + n * m * (m - 1) // 2

    pos = [(0.0, 0.0)]
    for m in range(1, rings + 1):
        count = n * m
        for s in range(count):
            ang = 2.0 * math.pi * s / count
            pos.append((m * math.cos(ang), m * math.sin(ang)))
    faces = []
    for j in range(n):
        faces.append((0, 1 + j, 1 + (j + 1) % n))
    for m in range(1, rings):
        rs_in = ring_start(m)
        rs_out = ring_start(m + 1)
        for j in range(n):
            inner = [rs_in + (j * m + t) % (n * m) for t in range(m + 1)]
            outer = [rs_out + (j * (m + 1) + t) % (n * (m + 1)) for t in range(m + 2)]
            for t in range(m + 1):
                faces.append((inner[t], outer[t], outer[t + 1]))
            for t in range(m):
                faces.append((inner[t], outer[t + 1], inner[t + 1]))
    return np.asarray(pos, dtype=np.float64), np.asarray(faces, dtype=np.int64)


def patch_ring_ids(n: int, rings: int):
    """Vertex ids of each ring of an n_regular_patch, center first."""
    out = [np.array([0], dtype=np.int64)]
    start = 1
    for m in range(1, rings + 1):
        out.append(np.arange(start, start + n * m, dtype=np.int64))
        start += n * m
    return out


@dataclass(frozen=True)
class LocalConfiguration:
    """A valence-n vertex with its cyclic ring; crease_spokes lists ring
    slots whose spoke edges are tagged sharp (supported for the 1-to-4
    scheme, whose crease neighborhoods stay stationary)."""

    valence: int
    scheme: SchemeKind
    crease_spokes: tuple = ()

    def __post_init__(self):
        if self.valence < 3:
            raise InvalidValence(f"valence must be >= 3, got {self.valence}")
        for s in self.crease_spokes:
            if not 0 <= s < self.valence:
                raise ConfigurationTooSmall(f"crease spoke {s} outside 0..{self.valence - 1}")


# ---------------------------------------------------------------------------
# running a scheme on a patch (any coordinate dimension)


def _patch_tags(config: LocalConfiguration, mesh: TriMesh) -> SharpnessTags:
    if not config.crease_spokes:
        return SharpnessTags()
    ring1 = patch_ring_ids(config.valence, 1)[1]
    return SharpnessTags.from_iterables(
        ((0, int(ring1[s])) for s in config.crease_spokes), ()
    )


def _run_steps(scheme: SchemeKind, mesh: TriMesh, tags: SharpnessTags, steps: int):
    """Run the scheme, returning per-level meshes, tags and provenance."""
    meshes = [mesh]
    tag_seq = [tags]
    provs = []
    for _ in range(steps):
        cur = meshes[-1]
        cur_tags = tag_seq[-1]
        if scheme is SchemeKind.LOOP:
            topology, alpha_fn = "loop", bucket_alpha_array
        else:
            topology, alpha_fn = "hybrid", sqrt3_alpha_array
        res = refine_arrays(
            cur.vertices,
            cur.faces,
            cur.edge_table,
            cur_tags.edge_mask(cur),
            cur_tags.face_mask(cur),
            topology=topology,
            interior_alpha=alpha_fn,
        )
        meshes.append(TriMesh(res.vertices, res.faces))
        tag_seq.append(
            SharpnessTags.from_iterables(res.sharp_edge_pairs, res.sharp_face_ids)
        )
        provs.append(res.provenance)
    return meshes, tag_seq, provs


def _bfs_rings(mesh: TriMesh, center: int, max_dist: int):
    """Graph distance from center, -1 beyond max_dist."""
    nv = mesh.n_vertices
    e = mesh.edges
    deg = np.zeros(nv, dtype=np.int64)
    np.add.at(deg, e[:, 0], 1)
    np.add.at(deg, e[:, 1], 1)
    offsets = np.zeros(nv + 1, dtype=np.int64)
    np.cumsum(deg, out=offsets[1:])
    adj = np.empty(2 * len(e), dtype=np.int64)
    ends = np.concatenate([e[:, 0], e[:, 1]])
    other = np.concatenate([e[:, 1], e[:, 0]])
    order = np.argsort(ends, kind="stable")
    adj[:] = other[order]
    dist = np.full(nv, -1, dtype=np.int64)
    dist[center] = 0
    frontier = np.array([center], dtype=np.int64)
    for d in range(1, max_dist + 1):
        if not len(frontier):
            break
        chunks = [adj[offsets[v] : offsets[v + 1]] for v in frontier]
        cand = np.unique(np.concatenate(chunks))
        new = cand[dist[cand] < 0]
        dist[new] = d
        frontier = new
    return dist


def _anchored_rings(mesh: TriMesh, real_pos, max_ring: int, expected_per_ring):
    """Ring ids around vertex 0, each ring CCW by angle, rotated so the
    first entry sits nearest angle zero (the input slot-0 direction)."""
    dist = _bfs_rings(mesh, 0, max_ring)
    center = real_pos[0]
    rings = [np.array([0], dtype=np.int64)]
    for r in range(1, max_ring + 1):
        ids = np.flatnonzero(dist == r)
        if expected_per_ring is not None and len(ids) != expected_per_ring * r:
            raise ConfigurationTooSmall(
                f"refined ring {r} has {len(ids)} vertices, expected {expected_per_ring * r}"
            )
        rel = real_pos[ids] - center
        ang = np.arctan2(rel[:, 1], rel[:, 0])
        order = np.argsort(ang, kind="stable")
        ids = ids[order]
        ang = ang[order]
        wrapped = np.abs(np.mod(ang + math.pi, 2.0 * math.pi) - math.pi)
        start = int(np.argmin(wrapped))
        rings.append(np.roll(ids, -start))
    return rings


def _indicator_matrix(scheme, config, steps, net_rings, patch_rings):
    """Subdivision matrix of the net (center + net_rings rings) read off the
    scheme code."""
    n = config.valence
    pos2d, faces = n_regular_patch(n, patch_rings)
    mesh = build_mesh(pos2d, faces)
    tags = _patch_tags(config, mesh)
    net_ids = np.concatenate(patch_ring_ids(n, net_rings))

    # real-coordinate run fixes the output ring correspondence
    meshes, _, _ = _run_steps(scheme, mesh, tags, steps)
    final = meshes[-1]
    # positions of the final level in the plane
    real_final = final.vertices
    out_rings = _anchored_rings(final, real_final, net_rings, expected_per_ring=n)
    out_ids = np.concatenate(out_rings)

    # indicator run: one unit column per net vertex
    cols = len(net_ids)
    indicator = np.zeros((mesh.n_vertices, cols), dtype=np.float64)
    indicator[net_ids, np.arange(cols)] = 1.0
    ind_mesh = TriMesh(indicator, faces)
    ind_meshes, _, _ = _run_steps(scheme, ind_mesh, tags, steps)
    matrix = ind_meshes[-1].vertices[out_ids]

    row_sums = matrix.sum(axis=1)
    if not np.allclose(row_sums, 1.0, atol=_ROW_SUM_TOL):
        raise ConfigurationTooSmall(
            "stencil support escapes the configuration "
            f"(worst row sum {row_sums.min():.6f}); enlarge the net"
        )
    return matrix


def local_matrix(config: LocalConfiguration, steps: int = None):
    """(n+1) x (n+1) map of [center; ring] to the refined [center; ring].

    The centroid-split scheme needs steps=2: only after two steps is the
    neighborhood aligned with the input configuration again.
    """
    scheme = config.scheme
    if steps is None:
        steps = 2 if scheme in (SchemeKind.SQRT3, SchemeKind.HYBRID) else 1
    if scheme in (SchemeKind.SQRT3, SchemeKind.HYBRID):
        if steps != 2:
            raise ConfigurationTooSmall(
                "the centroid-split neighborhood realigns only after two steps; use steps=2"
            )
        if config.crease_spokes:
            raise ConfigurationTooSmall(
                "crease neighborhoods of the centroid-split schemes grow in valence "
                "and have no stationary local matrix; use the 1-to-4 scheme"
            )
        patch_rings = 5
    else:
        if steps not in (1, 2):
            raise ConfigurationTooSmall("steps must be 1 or 2")
        patch_rings = 3 + steps
    return _indicator_matrix(scheme, config, steps, net_rings=1, patch_rings=patch_rings)


def two_step_map(n: int, alpha: float, points):
    """Explicit two-step composition on [center; ring] (n+1 points).

    First step: center relaxes toward its ring mean with weight alpha and
    each fan face contributes its centroid; second step repeats the pair on
    the centroid ring. Output ring slot r lies along input ring direction r.
    """
    if n < 3:
        raise InvalidValence(f"valence must be >= 3, got {n}")
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) != n + 1:
        raise ValueError(f"expected {n + 1} points (center + ring), got {len(pts)}")
    center = pts[0]
    ring = pts[1:]
    u = (1.0 - alpha) * center + (alpha / n) * ring.sum(axis=0)
    c = (center + ring + np.roll(ring, -1, axis=0)) / 3.0
    w_center = (1.0 - alpha) * u + (alpha / n) * c.sum(axis=0)
    w_ring = (u + np.roll(c, 1, axis=0) + c) / 3.0
    return np.concatenate([w_center[None, :], w_ring], axis=0)


# ---------------------------------------------------------------------------
# spectra and conditions


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues sorted by magnitude, with complex-pair flags."""

    eigenvalues: np.ndarray  # complex, sorted by |.| descending
    complex_flags: np.ndarray

    @property
    def magnitudes(self):
        return np.abs(self.eigenvalues)

    @property
    def real_parts(self):
        return self.eigenvalues.real

    @property
    def subdominant(self) -> float:
        """Magnitude of the largest eigenvalue below the leading one."""
        return float(np.abs(self.eigenvalues[1])) if len(self.eigenvalues) > 1 else 0.0

    def __len__(self):
        return len(self.eigenvalues)


def spectrum(matrix, imag_tol: float = 1e-8) -> SpectrumReport:
    """All eigenvalues of a small dense matrix, sorted by magnitude."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonSquare(f"matrix has shape {matrix.shape}")
    vals = np.linalg.eigvals(matrix)
    order = np.lexsort((-vals.imag, -vals.real, -np.abs(vals)))
    vals = vals[order]
    flags = np.abs(vals.imag) > imag_tol * np.maximum(np.abs(vals), 1.0)
    return SpectrumReport(vals, flags)


def expected_sqrt3_spectrum(n: int, alpha: float = None):
    """Closed-form eigenvalues of the two-step centroid-split matrix:
    1, (2 - 3 alpha)^2 / 9, and (2 + 2 cos(2 pi k / n)) / 9 for k = 1..n-1.
    Returned sorted descending."""
    if n < 3:
        raise InvalidValence(f"valence must be >= 3, got {n}")
    if alpha is None:
        alpha = sqrt3_alpha(n)
    vals = [1.0, (2.0 - 3.0 * alpha) ** 2 / 9.0]
    vals += [(2.0 + 2.0 * math.cos(2.0 * math.pi * k / n)) / 9.0 for k in range(1, n)]
    return np.sort(np.asarray(vals))[::-1]


def loop_subdominant(n: int) -> float:
    """Closed-form subdominant pair (3 + 2 cos(2 pi / n)) / 8 of the 1-to-4
    scheme's local matrix."""
    if n < 3:
        raise InvalidValence(f"valence must be >= 3, got {n}")
    return (3.0 + 2.0 * math.cos(2.0 * math.pi / n)) / 8.0


def loop_third_eigenvalue(n: int) -> float:
    """Companion value (3 + 2 cos(4 pi / n)) / 8 below the subdominant pair."""
    if n < 3:
        raise InvalidValence(f"valence must be >= 3, got {n}")
    return (3.0 + 2.0 * math.cos(4.0 * math.pi / n)) / 8.0


@dataclass(frozen=True)
class ConditionCheck:
    passed: bool
    detail: str

    def __bool__(self):
        return self.passed


def _magnitudes(spec) -> np.ndarray:
    if isinstance(spec, SpectrumReport):
        return spec.magnitudes
    return np.sort(np.abs(np.asarray(spec, dtype=np.complex128)))[::-1].real


def check_sqrt3_conditions(spec, tol: float = 1e-6) -> ConditionCheck:
    """Leading eigenvalue 1, a strictly subdominant equal pair, and all
    remaining eigenvalues strictly below the pair."""
    lam = _magnitudes(spec)
    if len(lam) < 3:
        return ConditionCheck(False, "needs at least 3 eigenvalues")
    msgs = []
    if abs(lam[0] - 1.0) > tol:
        msgs.append(f"leading eigenvalue {lam[0]:.8f} != 1")
    if 1.0 - lam[1] <= tol:
        msgs.append(f"subdominant {lam[1]:.8f} not strictly below 1")
    if abs(lam[1] - lam[2]) > tol:
        msgs.append(f"subdominant pair unequal: {lam[1]:.8f} vs {lam[2]:.8f}")
    if len(lam) > 3 and lam[1] - lam[3:].max() <= tol:
        msgs.append(f"pair {lam[1]:.8f} not strictly above the remainder {lam[3:].max():.8f}")
    if msgs:
        return ConditionCheck(False, "; ".join(msgs))
    return ConditionCheck(
        True, f"1 > {lam[1]:.8f} = {lam[2]:.8f} > rest (pair isolated)"
    )


def check_tangent_plane_condition(spec, tol: float = 1e-6) -> ConditionCheck:
    """Leading eigenvalue 1 and lambda_1 >= lambda_2 strictly above lambda_3."""
    lam = _magnitudes(spec)
    if len(lam) < 4:
        return ConditionCheck(False, "needs at least 4 eigenvalues")
    msgs = []
    if abs(lam[0] - 1.0) > tol:
        msgs.append(f"leading eigenvalue {lam[0]:.8f} != 1")
    if 1.0 - lam[1] <= tol:
        msgs.append(f"lambda_1 {lam[1]:.8f} not strictly below 1")
    if lam[1] < lam[2] - tol:
        msgs.append(f"lambda_1 {lam[1]:.8f} below lambda_2 {lam[2]:.8f}")
    if lam[2] - lam[3] <= tol:
        msgs.append(f"lambda_2 {lam[2]:.8f} not strictly above lambda_3 {lam[3]:.8f}")
    if msgs:
        return ConditionCheck(False, "; ".join(msgs))
    return ConditionCheck(True, f"1 > {lam[1]:.8f} >= {lam[2]:.8f} > {lam[3]:.8f}")


# ---------------------------------------------------------------------------
# valence growth along creases


@dataclass(frozen=True)
class TrackedVertex:
    kind: str  # "endpoint" or "midpoint"
    vertex: int  # index (stable across levels for surviving vertices)
    first_level: int
    valences: tuple
    sharp_counts: tuple
    residuals: tuple  # valence[l] - valence[l-1] - sharp_counts[l-1]


@dataclass(frozen=True)
class ValenceTrace:
    levels: int
    rows: tuple

    def max_abs_residual(self) -> int:
        worst = 0
        for row in self.rows:
            for r in row.residuals:
                worst = max(worst, abs(r))
        return worst


def _sharp_degree(record: SubdivisionRecord):
    deg = np.zeros(record.mesh.n_vertices, dtype=np.int64)
    for a, b in record.tags.sharp_edges:
        deg[a] += 1
        deg[b] += 1
    return deg


def valence_trace(mesh: TriMesh, tags: SharpnessTags, levels: int) -> ValenceTrace:
    """Track crease endpoints and first-generation crease midpoints through
    `levels` feature-preserving steps, reporting per-level valence, incident
    sharp-edge count, and the growth-law residual."""
    if levels < 1:
        raise TooFewLevels("valence trace needs at least one level")
    records = subdivide(mesh, tags, SchemeKind.HYBRID, levels)
    degrees = [r.mesh.vertex_degrees() for r in records]
    sharp_deg = [_sharp_degree(r) for r in records]

    rows = []
    endpoints = sorted({v for e in tags.sharp_edges for v in e})
    for v in endpoints:
        vals = tuple(int(degrees[l][v]) for l in range(levels + 1))
        esh = tuple(int(sharp_deg[l][v]) for l in range(levels + 1))
        res = tuple(vals[l] - vals[l - 1] - esh[l - 1] for l in range(1, levels + 1))
        rows.append(TrackedVertex("endpoint", v, 0, vals, esh, res))

    if levels >= 1 and tags.sharp_edges:
        prov = records[1].provenance
        mids = np.flatnonzero(
            (prov.kind == KIND_EDGE_POINT) & (prov.rule == RULE_EDGE_MIDPOINT)
        )
        for m in mids:
            parent = (int(prov.src_a[m]), int(prov.src_b[m]))
            if parent not in tags.sharp_edges:
                continue
            vals = tuple(int(degrees[l][m]) for l in range(1, levels + 1))
            esh = tuple(int(sharp_deg[l][m]) for l in range(1, levels + 1))
            res = tuple(
                vals[i] - vals[i - 1] - esh[i - 1] for i in range(1, len(vals))
            )
            rows.append(TrackedVertex("midpoint", int(m), 1, vals, esh, res))
    return ValenceTrace(levels, tuple(rows))


def _max_incident_edge_length(mesh: TriMesh, vertex_count: int) -> float:
    e = mesh.edges
    incident = (e[:, 0] < vertex_count) | (e[:, 1] < vertex_count)
    if not incident.any():
        return 0.0
    d = mesh.vertices[e[incident, 0]] - mesh.vertices[e[incident, 1]]
    return float(np.sqrt((d**2).sum(axis=1)).max())


def convergence_ratio(records) -> float:
    """Geometric-mean per-level contraction of triangle size around the
    original vertices.

    Size is the longest edge incident to a level-0 vertex (those vertices
    keep their indices at every level). The ratio tracks the magnitude of
    the subdominant eigenvalue; a degenerate mesh whose elements have zero
    size gives ratio 0.
    """
    if len(records) < 3:
        raise TooFewLevels("convergence ratio needs at least 3 levels")
    nv0 = records[0].mesh.n_vertices
    sizes = [_max_incident_edge_length(rec.mesh, nv0) for rec in records]
    ratios = []
    for s0, s1 in zip(sizes[:-1], sizes[1:]):
        if s0 == 0.0:
            return 0.0
        ratios.append(s1 / s0)
    return float(np.exp(np.mean(np.log(ratios)))) if ratios else 0.0


# ---------------------------------------------------------------------------
# characteristic map


@dataclass
class CharacteristicMapSample:
    """Sampled characteristic map around a valence-n vertex.

    grid[j][a] holds the (a+1, 2) map coordinates of row a of sector j;
    triangles/signs cover the whole sampled fan. Verdicts are numerical,
    valid at the sampled resolution only.
    """

    scheme: SchemeKind
    valence: int
    requested_resolution: int
    rows: int
    grid: list
    triangles: np.ndarray
    signs: np.ndarray
    regular: bool
    injective: bool
    overlap_count: int
    note: str = ""
    subdominant: float = 0.0


def _subdominant_plane(matrix, equal_tol=1e-6, imag_tol=1e-8):
    """Basis (x, y) of the subdominant eigen-plane of a local matrix."""
    vals, vecs = np.linalg.eig(np.asarray(matrix, dtype=np.float64))
    order = np.lexsort((-vals.imag, -vals.real, -np.abs(vals)))
    vals = vals[order]
    vecs = vecs[:, order]
    l1, l2 = vals[1], vals[2]
    scale = max(abs(l1), 1e-300)
    if abs(l1.imag) > imag_tol * scale or abs(l2.imag) > imag_tol * scale:
        if abs(l1 - np.conj(l2)) < equal_tol * scale:
            raise ComplexSubdominantPair(
                f"subdominant pair is complex: {l1:.8f}, {l2:.8f}"
            )
        raise ComplexSubdominantPair(f"complex subdominant eigenvalue {l1:.8f}")
    if abs(abs(l1) - abs(l2)) > equal_tol:
        raise ComplexSubdominantPair(
            f"subdominant eigenvalues not an equal pair: {abs(l1):.8f} vs {abs(l2):.8f}"
        )
    x = vecs[:, 1].real
    y = vecs[:, 2].real

    def plane_ok(u, v):
        gram = np.array([[u @ u, u @ v], [u @ v, v @ v]])
        return np.linalg.det(gram) > 1e-12 * max(u @ u, v @ v, 1e-300) ** 2

    if not plane_ok(x, y):
        # a numerically conjugate pair: real/imag parts of one vector span
        # the invariant plane
        y = vecs[:, 1].imag
        if not plane_ok(x, y):
            raise DegenerateEigenvector("subdominant eigenvectors do not span a plane")
    return float(abs(l1)), x, y


def _propagate_params(params, prov, faces_prev):
    """Domain-side coordinates for one refinement level: images copy their
    parent, face points average the parent face corners, edge points average
    the parent edge endpoints."""
    n2 = len(prov.kind)
    out = np.empty((n2, params.shape[1]), dtype=np.float64)
    img = prov.kind == KIND_VERTEX_IMAGE
    out[img] = params[prov.src_a[img]]
    fp = prov.kind == KIND_FACE_POINT
    if fp.any():
        corners = faces_prev[prov.src_a[fp]]
        out[fp] = (params[corners[:, 0]] + params[corners[:, 1]] + params[corners[:, 2]]) / 3.0
    ep = prov.kind == KIND_EDGE_POINT
    if ep.any():
        out[ep] = (params[prov.src_a[ep]] + params[prov.src_b[ep]]) * 0.5
    return out


def _candidate_pairs(tri_xy):
    """Bounding-box grid pruning for the overlap scan."""
    lo = tri_xy.min(axis=1)
    hi = tri_xy.max(axis=1)
    ext = hi - lo
    cell = max(float(np.median(ext.max(axis=1))), 1e-12)
    origin = lo.min(axis=0)
    gi0 = np.floor((lo - origin) / cell).astype(np.int64)
    gi1 = np.floor((hi - origin) / cell).astype(np.int64)
    buckets = {}
    for t in range(len(tri_xy)):
        for cx in range(gi0[t, 0], gi1[t, 0] + 1):
            for cy in range(gi0[t, 1], gi1[t, 1] + 1):
                buckets.setdefault((cx, cy), []).append(t)
    seen = set()
    ci, cj = [], []
    for members in buckets.values():
        m = len(members)
        if m < 2:
            continue
        for ii in range(m):
            for jj in range(ii + 1, m):
                a, b = members[ii], members[jj]
                if a > b:
                    a, b = b, a
                if (a, b) not in seen:
                    seen.add((a, b))
                    ci.append(a)
                    cj.append(b)
    return np.asarray(ci, dtype=np.int64), np.asarray(cj, dtype=np.int64)


def characteristic_map(
    scheme: SchemeKind, n: int, resolution: int
) -> CharacteristicMapSample:
    """Sample the characteristic map on the valence-n fan.

    The local net's subdominant eigen-plane supplies 2D control coordinates;
    running the actual scheme refines them, and the fan (graph distance up
    to the row count) is read off as a per-sector triangular grid. Regularity
    means every sampled triangle is positively oriented; injectivity means no
    two sampled triangles overlap. Both verdicts are resolution-limited.
    """
    if resolution < 1:
        raise ConfigurationTooSmall("resolution must be >= 1")
    if n < 3:
        raise InvalidValence(f"valence must be >= 3, got {n}")

    if scheme is SchemeKind.LOOP:
        steps_per_block, block = 1, 2
        net_rings, patch_rings = 3, 5
    else:
        steps_per_block, block = 2, 3  # aligned only after double steps
        net_rings, patch_rings = 4, 6

    k = max(1, math.ceil(math.log(resolution) / math.log(block) - 1e-12))
    rows = block**k
    steps = steps_per_block * k

    config = LocalConfiguration(n, scheme)
    matrix = _indicator_matrix(scheme, config, steps_per_block, net_rings, patch_rings)
    sub, x, y = _subdominant_plane(matrix)

    pos2d, faces = n_regular_patch(n, patch_rings)
    mesh = build_mesh(pos2d, faces)
    net_ids = np.concatenate(patch_ring_ids(n, net_rings))
    char0 = np.zeros((mesh.n_vertices, 2), dtype=np.float64)
    scale = max(np.abs(x).max(), np.abs(y).max())
    char0[net_ids, 0] = x / scale
    char0[net_ids, 1] = y / scale

    char_mesh = TriMesh(char0, faces)
    meshes, _, provs = _run_steps(scheme, char_mesh, SharpnessTags(), steps)
    params = pos2d.copy()
    for lvl in range(steps):
        params = _propagate_params(params, provs[lvl], meshes[lvl].faces)

    final = meshes[-1]
    dist = _bfs_rings(final, 0, rows)
    sampled = (dist >= 0) & (dist <= rows)
    char = final.vertices

    # sampled triangles: faces whose corners all lie in the fan
    fmask = sampled[final.faces].all(axis=1)
    tris = final.faces[fmask]
    xy = char[tris]
    signs = np.sign(
        (xy[:, 1, 0] - xy[:, 0, 0]) * (xy[:, 2, 1] - xy[:, 0, 1])
        - (xy[:, 2, 0] - xy[:, 0, 0]) * (xy[:, 1, 1] - xy[:, 0, 1])
    )
    if (signs < 0).sum() > (signs > 0).sum():
        char = char.copy()
        char[:, 1] *= -1.0
        xy = char[tris]
        signs = -signs
    regular = bool((signs > 0).all())

    overlaps = []
    if regular:
        ci, cj = _candidate_pairs(xy)
        overlaps = kernels.overlapping_pairs(tris, xy, ci, cj)
    injective = regular and not overlaps

    # per-sector grids for iso-line export
    ang = np.arctan2(params[:, 1], params[:, 0])
    sector_w = 2.0 * math.pi / n
    eps = 1e-9
    grid = []
    ids = np.flatnonzero(sampled)
    for j in range(n):
        rel = np.mod(ang[ids] - j * sector_w, 2.0 * math.pi)
        inside = (rel <= sector_w + eps) | (rel >= 2.0 * math.pi - eps)
        rel = np.where(rel >= 2.0 * math.pi - eps, rel - 2.0 * math.pi, rel)
        sector_rows = [char[0:1].copy()]
        for a in range(1, rows + 1):
            row_ids = ids[inside & (dist[ids] == a)]
            row_rel = rel[inside & (dist[ids] == a)]
            order = np.argsort(row_rel, kind="stable")
            row_ids = row_ids[order]
            if len(row_ids) != a + 1:
                raise ConfigurationTooSmall(
                    f"sector {j} row {a}: found {len(row_ids)} samples, expected {a + 1}"
                )
            sector_rows.append(char[row_ids])
        grid.append(sector_rows)

    return CharacteristicMapSample(
        scheme=scheme,
        valence=n,
        requested_resolution=resolution,
        rows=rows,
        grid=grid,
        triangles=tris,
        signs=signs,
        regular=regular,
        injective=injective,
        overlap_count=len(overlaps),
        note=f"numerical verdict at resolution {rows}",
        subdominant=sub,
    )


def write_char_map_points(sample: CharacteristicMapSample, fh) -> None:
    """Iso-parameter polylines as a plain point cloud: `x y` per line, one
    blank line between polylines. Emits the row family and the spoke-parallel
    family of every sector."""
    first = True
    for sector_rows in sample.grid:
        rows = len(sector_rows) - 1
        for a in range(rows + 1):
            if not first:
                fh.write("\n")
            first = False
            for x, y in sector_rows[a]:
                fh.write(f"{x:.12g} {y:.12g}\n")
        for b in range(rows + 1):
            if not first:
                fh.write("\n")
            first = False
            for a in range(b, rows + 1):
                x, y = sector_rows[a][b]
                fh.write(f"{x:.12g} {y:.12g}\n")


# ---------------------------------------------------------------------------
# packaged analysis for the CLI


@dataclass
class AnalysisReport:
    scheme: SchemeKind
    valence: int
    steps: int
    spectrum: SpectrumReport
    ordering_check: ConditionCheck
    tangent_check: ConditionCheck
    char_map: CharacteristicMapSample = None
    expected_subdominant: float = field(default=0.0)


def analyze_scheme(
    scheme: SchemeKind, valence: int, steps: int = None, char_map_resolution: int = None
) -> AnalysisReport:
    """Local-matrix spectrum plus condition checks for one (scheme, valence)."""
    config = LocalConfiguration(valence, scheme)
    if steps is None:
        steps = 2 if scheme in (SchemeKind.SQRT3, SchemeKind.HYBRID) else 1
    matrix = local_matrix(config, steps)
    spec = spectrum(matrix)
    ordering = check_sqrt3_conditions(spec)
    tangent = check_tangent_plane_condition(spec)
    if scheme is SchemeKind.LOOP:
        expected = loop_subdominant(valence) ** steps
    else:
        expected = float(expected_sqrt3_spectrum(valence)[1])
    cmap = None
    if char_map_resolution:
        cmap = characteristic_map(scheme, valence, char_map_resolution)
    return AnalysisReport(scheme, valence, steps, spec, ordering, tangent, cmap, expected)


def report_tree(report: AnalysisReport) -> dict:
    """Stable machine-readable key-value tree for one analysis report."""
    tree = {
        "scheme": report.scheme.value,
        "valence": report.valence,
        "steps": report.steps,
        "eigenvalues": [float(v) for v in report.spectrum.magnitudes],
        "subdominant": report.spectrum.subdominant,
        "condition_eq8": bool(report.ordering_check),
        "condition_eq9": bool(report.tangent_check),
    }
    if report.char_map is not None:
        tree["char_map"] = {
            "resolution": report.char_map.rows,
            "regular": report.char_map.regular,
            "injective": report.char_map.injective,
            "note": report.char_map.note,
        }
    return tree


def report_text(report: AnalysisReport) -> str:
    lines = [
        f"scheme: {report.scheme.value}",
        f"valence: {report.valence}",
        f"steps: {report.steps}",
        f"matrix-size: {len(report.spectrum)}",
    ]
    for v, flag in zip(report.spectrum.eigenvalues, report.spectrum.complex_flags):
        suffix = " (complex pair)" if flag else ""
        lines.append(f"eigenvalue: {abs(v):.10f}{suffix}")
    lines.append(f"subdominant: {report.spectrum.subdominant:.10f}")
    lines.append(f"expected-subdominant: {report.expected_subdominant:.10f}")
    ok8 = "PASS" if report.ordering_check else "FAIL"
    ok9 = "PASS" if report.tangent_check else "FAIL"
    lines.append(f"condition subdominant-pair-ordering: {ok8} ({report.ordering_check.detail})")
    lines.append(f"condition tangent-plane-ordering: {ok9} ({report.tangent_check.detail})")
    if report.char_map is not None:
        cm = report.char_map
        lines.append(
            f"char-map: rows={cm.rows} regular={'yes' if cm.regular else 'no'} "
            f"injective={'yes' if cm.injective else 'no'} ({cm.note})"
        )
    return "\n".join(lines)
