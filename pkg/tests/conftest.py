import math

import numpy as np
import pytest

from crease_subdiv import kernels
from crease_subdiv.analysis import n_regular_patch
from crease_subdiv.mesh import build_mesh
from crease_subdiv.tagging import SharpnessTags

PHI = (1.0 + 5.0**0.5) / 2.0

ICO_VERTS = np.array(
    [
        (-1, PHI, 0), (1, PHI, 0), (-1, -PHI, 0), (1, -PHI, 0),
        (0, -1, PHI), (0, 1, PHI), (0, -1, -PHI), (0, 1, -PHI),
        (PHI, 0, -1), (PHI, 0, 1), (-PHI, 0, -1), (-PHI, 0, 1),
    ],
    dtype=np.float64,
)

ICO_FACES = np.array(
    [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ],
    dtype=np.int64,
)


def make_icosahedron():
    return build_mesh(ICO_VERTS, ICO_FACES)


def make_torus(p=6, q=5, major=2.0, minor=0.7):
    """Regular p x q torus triangulation: pq vertices, 2pq faces, 3pq edges."""
    verts = []
    for i in range(p):
        for j in range(q):
            u = 2.0 * math.pi * i / p
            v = 2.0 * math.pi * j / q
            r = major + minor * math.cos(v)
            verts.append((r * math.cos(u), r * math.sin(u), minor * math.sin(v)))

    def vid(i, j):
        return (i % p) * q + (j % q)

    faces = []
    for i in range(p):
        for j in range(q):
            faces.append((vid(i, j), vid(i + 1, j), vid(i, j + 1)))
            faces.append((vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)))
    return build_mesh(np.asarray(verts), np.asarray(faces, dtype=np.int64))


def make_triangle():
    return build_mesh(
        np.array([(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]),
        np.array([(0, 1, 2)], dtype=np.int64),
    )


def make_patch(n=6, rings=3):
    pos, faces = n_regular_patch(n, rings)
    return build_mesh(np.c_[pos, np.zeros(len(pos))], faces)


def patch_spoke(rings, sector, n=6):
    """Vertex ids along one spoke of a hex patch, center excluded."""
    def ring_start(m):
        return 1 + n * m * (m - 1) // 2

    return [ring_start(m) + sector * m for m in range(1, rings + 1)]


def crossing_polyline(rings, n=6):
    """Control chain through the center of a hex patch, boundary to boundary."""
    left = patch_spoke(rings, n // 2, n)
    right = patch_spoke(rings, 0, n)
    return list(reversed(left)) + [0] + right


def polyline_tags(chain):
    return SharpnessTags.from_iterables(
        [(chain[i], chain[i + 1]) for i in range(len(chain) - 1)], ()
    )


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    kernels.warm_up()


@pytest.fixture(scope="session")
def icosahedron():
    return make_icosahedron()


@pytest.fixture(scope="session")
def torus():
    return make_torus()


@pytest.fixture(scope="session")
def triangle():
    return make_triangle()


@pytest.fixture(scope="session")
def hex_patch():
    return make_patch(6, 3)
