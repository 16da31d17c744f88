"""Numeric inner-loop kernels with two interchangeable backends.

The hot loops of a subdivision step are plain gather/scatter arithmetic over
float64 arrays. Each kernel exists twice: an @njit version and a pure-numpy
version that performs the same floating-point operations in the same order,
so the two backends produce bit-identical results. The active backend is
chosen by the CREASE_SUBDIV_BACKEND environment variable ("numba" or
"numpy"); default is numba when importable.
"""

import os

import numpy as np

from .errors import CreaseSubdivError

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


_env = os.environ.get("CREASE_SUBDIV_BACKEND", "").strip().lower()
if _env and _env not in ("numba", "numpy"):
    raise CreaseSubdivError(
        f"CREASE_SUBDIV_BACKEND must be 'numba' or 'numpy', got {_env!r}"
    )
if _env == "numba" and not HAVE_NUMBA:
    raise CreaseSubdivError("CREASE_SUBDIV_BACKEND=numba but numba is not importable")

_backend = _env or ("numba" if HAVE_NUMBA else "numpy")


def active_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    """Switch kernel backend at runtime ("numba" or "numpy")."""
    global _backend
    if name not in ("numba", "numpy"):
        raise CreaseSubdivError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise CreaseSubdivError("numba backend requested but numba is not importable")
    _backend = name


# ---------------------------------------------------------------------------
# ring sums: sum of neighbor positions and vertex degree, accumulated in
# canonical edge order (both backends add a-side contributions first).


def _ring_sums_numpy(edges, pos, nv):
    sums = np.zeros((nv, pos.shape[1]), dtype=np.float64)
    deg = np.zeros(nv, dtype=np.int64)
    a = edges[:, 0]
    b = edges[:, 1]
    np.add.at(sums, a, pos[b])
    np.add.at(sums, b, pos[a])
    np.add.at(deg, a, 1)
    np.add.at(deg, b, 1)
    return sums, deg


@njit(cache=True)
def _ring_sums_numba(edges, pos, nv):
    d = pos.shape[1]
    sums = np.zeros((nv, d), dtype=np.float64)
    deg = np.zeros(nv, dtype=np.int64)
    ne = edges.shape[0]
    for e in range(ne):
        a = edges[e, 0]
        b = edges[e, 1]
        for k in range(d):
            sums[a, k] += pos[b, k]
    for e in range(ne):
        a = edges[e, 0]
        b = edges[e, 1]
        for k in range(d):
            sums[b, k] += pos[a, k]
    for e in range(ne):
        deg[edges[e, 0]] += 1
    for e in range(ne):
        deg[edges[e, 1]] += 1
    return sums, deg


def ring_sums(edges, pos, nv):
    """Per-vertex neighbor-position sum and degree from an edge list."""
    edges = np.ascontiguousarray(edges, dtype=np.int64)
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    if _backend == "numba":
        return _ring_sums_numba(edges, pos, nv)
    return _ring_sums_numpy(edges, pos, nv)


# ---------------------------------------------------------------------------
# face centroids


def _centroids_numpy(tris, pos):
    return (pos[tris[:, 0]] + pos[tris[:, 1]] + pos[tris[:, 2]]) / 3.0


@njit(cache=True)
def _centroids_numba(tris, pos):
    m = tris.shape[0]
    d = pos.shape[1]
    out = np.empty((m, d), dtype=np.float64)
    for i in range(m):
        a = tris[i, 0]
        b = tris[i, 1]
        c = tris[i, 2]
        for k in range(d):
            out[i, k] = (pos[a, k] + pos[b, k] + pos[c, k]) / 3.0
    return out


def face_centroids(tris, pos):
    """Arithmetic mean of each index triple's positions."""
    tris = np.ascontiguousarray(tris, dtype=np.int64)
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    if len(tris) == 0:
        return np.zeros((0, pos.shape[1]), dtype=np.float64)
    if _backend == "numba":
        return _centroids_numba(tris, pos)
    return _centroids_numpy(tris, pos)


# ---------------------------------------------------------------------------
# edge midpoints


def _midpoints_numpy(pairs, pos):
    return (pos[pairs[:, 0]] + pos[pairs[:, 1]]) * 0.5


@njit(cache=True)
def _midpoints_numba(pairs, pos):
    m = pairs.shape[0]
    d = pos.shape[1]
    out = np.empty((m, d), dtype=np.float64)
    for i in range(m):
        a = pairs[i, 0]
        b = pairs[i, 1]
        for k in range(d):
            out[i, k] = (pos[a, k] + pos[b, k]) * 0.5
    return out


def midpoints(pairs, pos):
    pairs = np.ascontiguousarray(pairs, dtype=np.int64)
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    if len(pairs) == 0:
        return np.zeros((0, pos.shape[1]), dtype=np.float64)
    if _backend == "numba":
        return _midpoints_numba(pairs, pos)
    return _midpoints_numpy(pairs, pos)


# ---------------------------------------------------------------------------
# four-point weighted combination (interior edge points)


def _weighted4_numpy(quads, w, pos):
    return (
        w[:, 0:1] * pos[quads[:, 0]]
        + w[:, 1:2] * pos[quads[:, 1]]
        + w[:, 2:3] * pos[quads[:, 2]]
        + w[:, 3:4] * pos[quads[:, 3]]
    )


@njit(cache=True)
def _weighted4_numba(quads, w, pos):
    m = quads.shape[0]
    d = pos.shape[1]
    out = np.empty((m, d), dtype=np.float64)
    for i in range(m):
        a = quads[i, 0]
        b = quads[i, 1]
        c = quads[i, 2]
        e = quads[i, 3]
        for k in range(d):
            out[i, k] = (
                w[i, 0] * pos[a, k]
                + w[i, 1] * pos[b, k]
                + w[i, 2] * pos[c, k]
                + w[i, 3] * pos[e, k]
            )
    return out


def weighted4(quads, w, pos):
    """Row-wise 4-point stencil: sum_j w[i,j] * pos[quads[i,j]]."""
    quads = np.ascontiguousarray(quads, dtype=np.int64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    if len(quads) == 0:
        return np.zeros((0, pos.shape[1]), dtype=np.float64)
    if _backend == "numba":
        return _weighted4_numba(quads, w, pos)
    return _weighted4_numpy(quads, w, pos)


# ---------------------------------------------------------------------------
# crease even mask (1/8, 3/4, 1/8)


def _crease_evens_numpy(prev, mid, nxt, pos):
    return 0.125 * pos[prev] + 0.75 * pos[mid] + 0.125 * pos[nxt]


@njit(cache=True)
def _crease_evens_numba(prev, mid, nxt, pos):
    m = prev.shape[0]
    d = pos.shape[1]
    out = np.empty((m, d), dtype=np.float64)
    for i in range(m):
        p = prev[i]
        v = mid[i]
        q = nxt[i]
        for k in range(d):
            out[i, k] = 0.125 * pos[p, k] + 0.75 * pos[v, k] + 0.125 * pos[q, k]
    return out


def crease_evens(prev, mid, nxt, pos):
    prev = np.ascontiguousarray(prev, dtype=np.int64)
    mid = np.ascontiguousarray(mid, dtype=np.int64)
    nxt = np.ascontiguousarray(nxt, dtype=np.int64)
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    if len(mid) == 0:
        return np.zeros((0, pos.shape[1]), dtype=np.float64)
    if _backend == "numba":
        return _crease_evens_numba(prev, mid, nxt, pos)
    return _crease_evens_numpy(prev, mid, nxt, pos)


# ---------------------------------------------------------------------------
# smooth even mask: (1 - a) v + (a / deg) * ring_sum


def _smooth_evens_numpy(v, sums, deg, alpha):
    q = alpha / deg
    return v * (1.0 - alpha)[:, None] + q[:, None] * sums


@njit(cache=True)
def _smooth_evens_numba(v, sums, deg, alpha):
    m = v.shape[0]
    d = v.shape[1]
    out = np.empty((m, d), dtype=np.float64)
    for i in range(m):
        a = alpha[i]
        q = a / deg[i]
        for k in range(d):
            out[i, k] = v[i, k] * (1.0 - a) + q * sums[i, k]
    return out


def smooth_evens(v, sums, deg, alpha):
    """Relax positions toward their ring average with per-row weight alpha."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    sums = np.ascontiguousarray(sums, dtype=np.float64)
    deg = np.ascontiguousarray(deg, dtype=np.float64)
    alpha = np.ascontiguousarray(alpha, dtype=np.float64)
    if len(v) == 0:
        return v.copy()
    if _backend == "numba":
        return _smooth_evens_numba(v, sums, deg, alpha)
    return _smooth_evens_numpy(v, sums, deg, alpha)


# ---------------------------------------------------------------------------
# triangle-pair overlap scan (characteristic-map injectivity).
#
# Candidate pairs come pre-pruned by a uniform grid; the exact test clips one
# triangle against the other (Sutherland-Hodgman) and flags the pair when the
# intersection area exceeds a relative threshold. Pairs sharing a vertex id
# are adjacent in the sampled triangulation and are skipped.


def _clip_area_py(ax, ay, bx, by):
    # clip polygon a (triangle) by each edge of triangle b; return area
    poly = [(ax[0], ay[0]), (ax[1], ay[1]), (ax[2], ay[2])]
    # ensure b is counter-clockwise
    cross = (bx[1] - bx[0]) * (by[2] - by[0]) - (bx[2] - bx[0]) * (by[1] - by[0])
    order = (0, 1, 2) if cross >= 0.0 else (0, 2, 1)
    for i in range(3):
        e0 = order[i]
        e1 = order[(i + 1) % 3]
        ex0, ey0 = bx[e0], by[e0]
        ex, ey = bx[e1] - ex0, by[e1] - ey0
        new_poly = []
        n = len(poly)
        for j in range(n):
            x0, y0 = poly[j]
            x1, y1 = poly[(j + 1) % n]
            s0 = ex * (y0 - ey0) - ey * (x0 - ex0)
            s1 = ex * (y1 - ey0) - ey * (x1 - ex0)
            if s0 >= 0.0:
                new_poly.append((x0, y0))
            if (s0 > 0.0 > s1) or (s0 < 0.0 < s1):
                t = s0 / (s0 - s1)
                new_poly.append((x0 + t * (x1 - x0), y0 + t * (y1 - y0)))
        poly = new_poly
        if len(poly) < 3:
            return 0.0
    area = 0.0
    n = len(poly)
    for j in range(n):
        x0, y0 = poly[j]
        x1, y1 = poly[(j + 1) % n]
        area += x0 * y1 - x1 * y0
    return 0.5 * abs(area)


def _overlap_pairs_python(tri_ids, tri_xy, cand_i, cand_j, rel_tol):
    flagged = []
    for idx in range(len(cand_i)):
        i = cand_i[idx]
        j = cand_j[idx]
        shared = False
        for u in range(3):
            for v in range(3):
                if tri_ids[i, u] == tri_ids[j, v]:
                    shared = True
        if shared:
            continue
        ax = tri_xy[i, :, 0]
        ay = tri_xy[i, :, 1]
        bx = tri_xy[j, :, 0]
        by = tri_xy[j, :, 1]
        a1 = 0.5 * abs(
            (ax[1] - ax[0]) * (ay[2] - ay[0]) - (ax[2] - ax[0]) * (ay[1] - ay[0])
        )
        a2 = 0.5 * abs(
            (bx[1] - bx[0]) * (by[2] - by[0]) - (bx[2] - bx[0]) * (by[1] - by[0])
        )
        inter = _clip_area_py(ax, ay, bx, by)
        if inter > rel_tol * min(a1, a2):
            flagged.append((i, j))
    return flagged


@njit(cache=True)
def _overlap_pairs_numba(tri_ids, tri_xy, cand_i, cand_j, rel_tol):
    m = cand_i.shape[0]
    out_i = np.empty(m, dtype=np.int64)
    out_j = np.empty(m, dtype=np.int64)
    count = 0
    px = np.empty(8, dtype=np.float64)
    py = np.empty(8, dtype=np.float64)
    qx = np.empty(8, dtype=np.float64)
    qy = np.empty(8, dtype=np.float64)
    for idx in range(m):
        i = cand_i[idx]
        j = cand_j[idx]
        shared = False
        for u in range(3):
            for v in range(3):
                if tri_ids[i, u] == tri_ids[j, v]:
                    shared = True
        if shared:
            continue
        a1 = 0.5 * abs(
            (tri_xy[i, 1, 0] - tri_xy[i, 0, 0]) * (tri_xy[i, 2, 1] - tri_xy[i, 0, 1])
            - (tri_xy[i, 2, 0] - tri_xy[i, 0, 0]) * (tri_xy[i, 1, 1] - tri_xy[i, 0, 1])
        )
        a2 = 0.5 * abs(
            (tri_xy[j, 1, 0] - tri_xy[j, 0, 0]) * (tri_xy[j, 2, 1] - tri_xy[j, 0, 1])
            - (tri_xy[j, 2, 0] - tri_xy[j, 0, 0]) * (tri_xy[j, 1, 1] - tri_xy[j, 0, 1])
        )
        # clip triangle i by the edges of triangle j
        n = 3
        for u in range(3):
            px[u] = tri_xy[i, u, 0]
            py[u] = tri_xy[i, u, 1]
        cross = (tri_xy[j, 1, 0] - tri_xy[j, 0, 0]) * (
            tri_xy[j, 2, 1] - tri_xy[j, 0, 1]
        ) - (tri_xy[j, 2, 0] - tri_xy[j, 0, 0]) * (tri_xy[j, 1, 1] - tri_xy[j, 0, 1])
        for ei in range(3):
            if cross >= 0.0:
                e0 = ei
                e1 = (ei + 1) % 3
            else:
                e0 = (3 - ei) % 3
                e1 = (2 - ei) % 3
            ex0 = tri_xy[j, e0, 0]
            ey0 = tri_xy[j, e0, 1]
            ex = tri_xy[j, e1, 0] - ex0
            ey = tri_xy[j, e1, 1] - ey0
            nn = 0
            for v in range(n):
                x0 = px[v]
                y0 = py[v]
                x1 = px[(v + 1) % n]
                y1 = py[(v + 1) % n]
                s0 = ex * (y0 - ey0) - ey * (x0 - ex0)
                s1 = ex * (y1 - ey0) - ey * (x1 - ex0)
                if s0 >= 0.0:
                    qx[nn] = x0
                    qy[nn] = y0
                    nn += 1
                if (s0 > 0.0 and s1 < 0.0) or (s0 < 0.0 and s1 > 0.0):
                    t = s0 / (s0 - s1)
                    qx[nn] = x0 + t * (x1 - x0)
                    qy[nn] = y0 + t * (y1 - y0)
                    nn += 1
            n = nn
            for v in range(n):
                px[v] = qx[v]
                py[v] = qy[v]
            if n < 3:
                break
        inter = 0.0
        if n >= 3:
            acc = 0.0
            for v in range(n):
                x0 = px[v]
                y0 = py[v]
                x1 = px[(v + 1) % n]
                y1 = py[(v + 1) % n]
                acc += x0 * y1 - x1 * y0
            inter = 0.5 * abs(acc)
        lim = a1 if a1 < a2 else a2
        if inter > rel_tol * lim:
            out_i[count] = i
            out_j[count] = j
            count += 1
    return out_i[:count], out_j[:count]


def overlapping_pairs(tri_ids, tri_xy, cand_i, cand_j, rel_tol=1e-9):
    """Return candidate pairs whose open interiors overlap.

    tri_ids: (T,3) vertex ids, used only to skip adjacent triangles.
    tri_xy:  (T,3,2) planar corner coordinates.
    cand_i/cand_j: candidate pair indices from the caller's spatial pruning.
    """
    tri_ids = np.ascontiguousarray(tri_ids, dtype=np.int64)
    tri_xy = np.ascontiguousarray(tri_xy, dtype=np.float64)
    cand_i = np.ascontiguousarray(cand_i, dtype=np.int64)
    cand_j = np.ascontiguousarray(cand_j, dtype=np.int64)
    if len(cand_i) == 0:
        return []
    if _backend == "numba":
        fi, fj = _overlap_pairs_numba(tri_ids, tri_xy, cand_i, cand_j, rel_tol)
        return list(zip(fi.tolist(), fj.tolist()))
    return _overlap_pairs_python(tri_ids, tri_xy, cand_i, cand_j, rel_tol)


def warm_up():
    """Trigger JIT compilation of the numba kernels on tiny inputs."""
    if _backend != "numba":
        return
    pos = np.zeros((3, 3), dtype=np.float64)
    edges = np.array([[0, 1], [1, 2]], dtype=np.int64)
    ring_sums(edges, pos, 3)
    face_centroids(np.array([[0, 1, 2]], dtype=np.int64), pos)
    midpoints(edges, pos)
    weighted4(
        np.array([[0, 1, 2, 0]], dtype=np.int64),
        np.full((1, 4), 0.25),
        pos,
    )
    crease_evens(
        np.array([0], dtype=np.int64),
        np.array([1], dtype=np.int64),
        np.array([2], dtype=np.int64),
        pos,
    )
    smooth_evens(pos, pos, np.ones(3), np.full(3, 0.5))
    ids = np.array([[0, 1, 2], [3, 4, 5]], dtype=np.int64)
    xy = np.array(
        [[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[2.0, 2.0], [3.0, 2.0], [2.0, 3.0]]]
    )
    overlapping_pairs(ids, xy, np.array([0]), np.array([1]))
