"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the hybrid scheme on a progressively refined tagged mesh under both
backends and reports per-level wall time. Usage:

    crease-subdiv-bench [--levels N] [--seed-subdivisions K]
"""

import argparse
import sys
import time

import numpy as np

from . import kernels
from .schemes import SchemeKind, SharpnessTags, subdivide
from .mesh import build_mesh


def _seed_mesh(seed_subdivisions: int):
    """Icosahedron refined a few times, with a tagged equatorial band."""
    phi = (1.0 + 5.0**0.5) / 2.0
    verts = np.array(
        [
            (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
            (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
            (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
        ],
        dtype=np.float64,
    )
    faces = np.array(
        [
            (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
            (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
            (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
            (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
        ],
        dtype=np.int64,
    )
    mesh = build_mesh(verts, faces)
    records = subdivide(mesh, SharpnessTags(), SchemeKind.LOOP, seed_subdivisions)
    mesh = records[-1].mesh
    # tag a band of edges near the equator plus a handful of faces
    e = mesh.edges
    mid = 0.5 * (mesh.vertices[e[:, 0], 1] + mesh.vertices[e[:, 1], 1])
    band = np.flatnonzero(np.abs(mid) < 0.05 * (1 + seed_subdivisions))
    tag_edges = [tuple(map(int, e[i])) for i in band[:40]]
    tag_faces = list(range(0, mesh.n_faces, max(1, mesh.n_faces // 16)))[:16]
    return mesh, SharpnessTags.from_iterables(tag_edges, tag_faces)


def _run(mesh, tags, levels):
    t0 = time.perf_counter()
    records = subdivide(mesh, tags, SchemeKind.HYBRID, levels)
    dt = time.perf_counter() - t0
    return dt, records[-1].mesh.n_faces


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--levels", type=int, default=4)
    parser.add_argument("--seed-subdivisions", type=int, default=3)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    mesh, tags = _seed_mesh(args.seed_subdivisions)
    print(f"seed mesh: {mesh.n_vertices} vertices, {mesh.n_faces} faces", file=sys.stderr)

    results = {}
    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    for backend in backends:
        kernels.set_backend(backend)
        kernels.warm_up()
        _run(mesh, tags, 1)  # warm caches
        best = None
        for _ in range(args.repeats):
            dt, nf = _run(mesh, tags, args.levels)
            best = dt if best is None else min(best, dt)
        results[backend] = (best, nf)
        print(f"{backend:>6}: {best:8.3f} s for {args.levels} levels ({nf} faces)")
    if len(results) == 2:
        ratio = results["numpy"][0] / results["numba"][0]
        print(f"speedup numba vs numpy: {ratio:.2f}x")


if __name__ == "__main__":
    main()
