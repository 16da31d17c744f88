import numpy as np
import pytest

from crease_subdiv import kernels
from crease_subdiv.errors import CreaseSubdivError


@pytest.fixture
def restore_backend():
    saved = kernels.active_backend()
    yield
    kernels.set_backend(saved)


needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable")


def _random_mesh_arrays(seed=0, nv=200, ne=600, d=3):
    rng = np.random.default_rng(seed)
    pos = rng.normal(size=(nv, d))
    edges = rng.integers(0, nv, size=(ne, 2))
    edges = edges[edges[:, 0] != edges[:, 1]]
    edges = np.sort(edges, axis=1)
    return pos, np.unique(edges, axis=0)


@needs_numba
def test_backends_bit_identical(restore_backend):
    pos, edges = _random_mesh_arrays()
    rng = np.random.default_rng(1)
    tris = rng.integers(0, len(pos), size=(150, 3))
    quads = rng.integers(0, len(pos), size=(80, 4))
    w = rng.dirichlet(np.ones(4), size=80)
    prev = rng.integers(0, len(pos), size=40)
    mid = rng.integers(0, len(pos), size=40)
    nxt = rng.integers(0, len(pos), size=40)
    deg = rng.integers(1, 9, size=60).astype(float)
    al = rng.uniform(0.1, 0.6, size=60)

    results = {}
    for backend in ("numpy", "numba"):
        kernels.set_backend(backend)
        results[backend] = (
            kernels.ring_sums(edges, pos, len(pos)),
            kernels.face_centroids(tris, pos),
            kernels.midpoints(edges[:50], pos),
            kernels.weighted4(quads, w, pos),
            kernels.crease_evens(prev, mid, nxt, pos),
            kernels.smooth_evens(pos[:60], pos[60:120], deg, al),
        )
    (s_a, d_a), c_a, m_a, w_a, ce_a, se_a = results["numpy"]
    (s_b, d_b), c_b, m_b, w_b, ce_b, se_b = results["numba"]
    assert np.array_equal(s_a, s_b)
    assert np.array_equal(d_a, d_b)
    assert np.array_equal(c_a, c_b)
    assert np.array_equal(m_a, m_b)
    assert np.array_equal(w_a, w_b)
    assert np.array_equal(ce_a, ce_b)
    assert np.array_equal(se_a, se_b)


def test_ring_sums_small():
    pos = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
    edges = np.array([[0, 1], [1, 2]])
    sums, deg = kernels.ring_sums(edges, pos, 3)
    assert np.array_equal(deg, [1, 2, 1])
    assert np.allclose(sums, [[0, 1], [3, 2], [0, 1]])


def test_overlap_scan_detects_overlap(restore_backend):
    ids = np.array([[0, 1, 2], [3, 4, 5], [6, 7, 8]])
    xy = np.array(
        [
            [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]],
            [[0.5, 0.5], [1.5, 0.5], [0.5, 1.5]],  # overlaps the first
            [[10.0, 10.0], [11.0, 10.0], [10.0, 11.0]],  # far away
        ]
    )
    cand_i = np.array([0, 0, 1])
    cand_j = np.array([1, 2, 2])
    for backend in ("numpy", "numba") if kernels.HAVE_NUMBA else ("numpy",):
        kernels.set_backend(backend)
        pairs = kernels.overlapping_pairs(ids, xy, cand_i, cand_j)
        assert pairs == [(0, 1)]


def test_overlap_scan_ignores_shared_vertices(restore_backend):
    # two triangles sharing an edge: adjacent, not overlapping
    ids = np.array([[0, 1, 2], [0, 1, 3]])
    xy = np.array(
        [
            [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            [[0.0, 0.0], [1.0, 0.0], [1.0, -1.0]],
        ]
    )
    for backend in ("numpy", "numba") if kernels.HAVE_NUMBA else ("numpy",):
        kernels.set_backend(backend)
        assert kernels.overlapping_pairs(ids, xy, np.array([0]), np.array([1])) == []


def test_touching_triangles_not_flagged(restore_backend):
    # disjoint ids but only touching along an edge: intersection area ~ 0
    ids = np.array([[0, 1, 2], [3, 4, 5]])
    xy = np.array(
        [
            [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        ]
    )
    for backend in ("numpy", "numba") if kernels.HAVE_NUMBA else ("numpy",):
        kernels.set_backend(backend)
        assert kernels.overlapping_pairs(ids, xy, np.array([0]), np.array([1])) == []


def test_set_backend_validation():
    with pytest.raises(CreaseSubdivError):
        kernels.set_backend("cuda")


@needs_numba
def test_full_pipeline_backends_bit_identical(restore_backend):
    import sys

    sys.path.insert(0, "tests")
    from conftest import make_patch

    from crease_subdiv.schemes import SchemeKind, SharpnessTags, subdivide

    patch = make_patch(6, 3)
    tags = SharpnessTags.from_iterables([(0, 1), (0, 4)], (7, 9))
    out = {}
    for backend in ("numpy", "numba"):
        kernels.set_backend(backend)
        rec = subdivide(patch, tags, SchemeKind.HYBRID, 3)[-1]
        out[backend] = rec.mesh
    assert np.array_equal(out["numpy"].vertices, out["numba"].vertices)
    assert np.array_equal(out["numpy"].faces, out["numba"].faces)
