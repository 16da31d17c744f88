import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_patch, make_torus
from crease_subdiv.errors import TagMeshMismatch, UnknownEdge
from crease_subdiv.tagging import (
    EdgeClass,
    FaceClass,
    SharpnessTags,
    VertexKind,
    classify_edge,
    classify_face,
    classify_vertex,
    sharp_edge_count,
)


@pytest.fixture(scope="module")
def patch():
    return make_patch(6, 3)


def first_interior_edge(mesh):
    interior = ~mesh.boundary_edge_mask()
    eid = int(np.flatnonzero(interior)[0])
    return tuple(int(x) for x in mesh.edges[eid])


def test_classify_edge_smooth_default(patch):
    e = first_interior_edge(patch)
    assert classify_edge(patch, SharpnessTags(), e) is EdgeClass.SMOOTH_SMOOTH


def test_classify_edge_sharp_between_smooth(patch):
    e = first_interior_edge(patch)
    tags = SharpnessTags.from_iterables([e], ())
    assert classify_edge(patch, tags, e) is EdgeClass.SHARP_BETWEEN_SMOOTH


def test_classify_edge_face_cases(patch):
    e = first_interior_edge(patch)
    eid = patch.edge_id(*e)
    f0, f1 = (int(x) for x in patch.edge_table.edge_faces[eid])
    one = SharpnessTags.from_iterables((), (f0,))
    both = SharpnessTags.from_iterables((), (f0, f1))
    assert classify_edge(patch, one, e) is EdgeClass.MIXED_SMOOTH_SHARP
    assert classify_edge(patch, both, e) is EdgeClass.SHARP_SHARP


def test_classify_edge_boundary(patch):
    eid = int(np.flatnonzero(patch.boundary_edge_mask())[0])
    e = tuple(int(x) for x in patch.edges[eid])
    assert classify_edge(patch, SharpnessTags(), e) is EdgeClass.BOUNDARY_EDGE


def test_classify_edge_symmetric(patch):
    a, b = first_interior_edge(patch)
    tags = SharpnessTags.from_iterables([(a, b)], ())
    assert classify_edge(patch, tags, (a, b)) == classify_edge(patch, tags, (b, a))


def test_classify_edge_unknown(patch):
    with pytest.raises(UnknownEdge):
        classify_edge(patch, SharpnessTags(), (0, patch.n_vertices - 1))


def test_classify_vertex_smooth_interior(patch):
    cls = classify_vertex(patch, SharpnessTags(), 0)
    assert cls.kind is VertexKind.SMOOTH_INTERIOR
    assert cls.n == 6
    assert cls.e_sh == 0


def test_classify_vertex_crease_and_corner(patch):
    ring1 = [1, 2, 3, 4, 5, 6]
    two = SharpnessTags.from_iterables([(0, ring1[0]), (0, ring1[3])], ())
    assert classify_vertex(patch, two, 0).kind is VertexKind.CREASE
    three = SharpnessTags.from_iterables(
        [(0, ring1[0]), (0, ring1[2]), (0, ring1[4])], ()
    )
    assert classify_vertex(patch, three, 0).kind is VertexKind.CORNER


def test_classify_vertex_boundary_toggle(patch):
    v = int(np.flatnonzero(patch.boundary_vertex_mask())[0])
    # boundary edges count as creases by default
    on = classify_vertex(patch, SharpnessTags(), v)
    assert on.kind in (VertexKind.CREASE, VertexKind.CORNER)
    off = classify_vertex(patch, SharpnessTags(), v, boundary_as_crease=False)
    assert off.kind is VertexKind.BOUNDARY


def test_classify_face(patch):
    tags = SharpnessTags.from_iterables((), (2,))
    assert classify_face(patch, tags, 2) is FaceClass.SHARP_FACE
    assert classify_face(patch, tags, 0) is FaceClass.SMOOTH_FACE


def test_all_edges_tagged_face_still_smooth(patch):
    f = 0
    corners = patch.faces[f]
    edges = [(int(corners[i]), int(corners[(i + 1) % 3])) for i in range(3)]
    tags = SharpnessTags.from_iterables(edges, ())
    assert classify_face(patch, tags, f) is FaceClass.SMOOTH_FACE


def test_sharp_edge_count_polyline(patch):
    tags = SharpnessTags.from_iterables([(1, 0), (0, 4)], ())
    assert sharp_edge_count(patch, tags, 0) == 2
    assert sharp_edge_count(patch, tags, 1) == 1
    assert sharp_edge_count(patch, tags, 2) == 0
    assert sharp_edge_count(patch, SharpnessTags(), 0) == 0


def test_validate_against(patch):
    SharpnessTags.from_iterables([(0, 1)], (0,)).validate_against(patch)
    with pytest.raises(TagMeshMismatch):
        SharpnessTags.from_iterables([(0, patch.n_vertices - 1)], ()).validate_against(patch)
    with pytest.raises(TagMeshMismatch):
        SharpnessTags.from_iterables((), (patch.n_faces,)).validate_against(patch)
    with pytest.raises(TagMeshMismatch):
        SharpnessTags.from_iterables([(0, 99999)], ()).validate_against(patch)


def test_tagged_boundary_edge_counts_once(patch):
    # an edge that is both tagged and on the boundary is one crease edge,
    # not two: its endpoints stay crease vertices
    eid = int(np.flatnonzero(patch.boundary_edge_mask())[0])
    a, b = (int(x) for x in patch.edges[eid])
    tags = SharpnessTags.from_iterables([(a, b)], ())
    for v in (a, b):
        assert classify_vertex(patch, tags, v).kind is VertexKind.CREASE
    # and subdivision handles it without corrupting the crease gather
    from crease_subdiv.schemes import SchemeKind, subdivide

    records = subdivide(patch, tags, SchemeKind.HYBRID, 2)
    assert len(records[-1].tags.sharp_edges) == 4


@settings(deadline=None, max_examples=25)
@given(data=st.data())
def test_sharp_degree_sums_to_twice_edge_count(data):
    torus = make_torus(5, 4)
    ne = torus.n_edges
    ids = data.draw(st.sets(st.integers(0, ne - 1), max_size=ne))
    tags = SharpnessTags.from_iterables(
        [tuple(int(x) for x in torus.edges[i]) for i in ids], ()
    )
    total = sum(sharp_edge_count(torus, tags, v) for v in range(torus.n_vertices))
    assert total == 2 * len(tags.sharp_edges)
