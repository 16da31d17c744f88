import math

import numpy as np
import pytest

from conftest import make_icosahedron, make_patch
from crease_subdiv.analysis import (
    LocalConfiguration,
    analyze_scheme,
    characteristic_map,
    check_sqrt3_conditions,
    check_tangent_plane_condition,
    convergence_ratio,
    expected_sqrt3_spectrum,
    local_matrix,
    loop_subdominant,
    loop_third_eigenvalue,
    n_regular_patch,
    report_tree,
    spectrum,
    two_step_map,
    valence_trace,
)
from crease_subdiv.errors import (
    ConfigurationTooSmall,
    InvalidValence,
    NonSquare,
    TooFewLevels,
)
from crease_subdiv.mesh import build_mesh, euler_characteristic
from crease_subdiv.schemes import (
    SchemeKind,
    SharpnessTags,
    sqrt3_alpha,
    subdivide,
)

VALENCES = range(3, 11)


# ---------------------------------------------------------------------------
# patch construction


@pytest.mark.parametrize("n", [3, 5, 6, 9])
def test_n_regular_patch_valences(n):
    pos, faces = n_regular_patch(n, 3)
    mesh = build_mesh(np.c_[pos, np.zeros(len(pos))], faces)  # validates winding
    assert euler_characteristic(mesh) == 1
    deg = mesh.vertex_degrees()
    interior = ~mesh.boundary_vertex_mask()
    assert deg[0] == n
    assert (deg[interior][1:] == 6).all()
    # planar orientation: every face positively oriented
    xy = pos[faces]
    area2 = (xy[:, 1, 0] - xy[:, 0, 0]) * (xy[:, 2, 1] - xy[:, 0, 1]) - (
        xy[:, 2, 0] - xy[:, 0, 0]
    ) * (xy[:, 1, 1] - xy[:, 0, 1])
    assert (area2 > 0).all()


def test_patch_parameter_validation():
    with pytest.raises(InvalidValence):
        n_regular_patch(2, 3)
    with pytest.raises(ConfigurationTooSmall):
        n_regular_patch(6, 0)


# ---------------------------------------------------------------------------
# local matrices


def test_local_matrix_shape_and_rows():
    m = local_matrix(LocalConfiguration(6, SchemeKind.SQRT3), 2)
    assert m.shape == (7, 7)
    assert np.allclose(m.sum(axis=1), 1.0, atol=1e-12)


def test_local_matrix_loop_center_row():
    n = 6
    m = local_matrix(LocalConfiguration(n, SchemeKind.LOOP), 1)
    a = 1.0 / 3.0  # interior weight at valence 6
    expect = np.r_[1.0 - a, np.full(n, a / n)]
    assert np.allclose(m[0], expect, atol=1e-12)


def test_local_matrix_constant_preserved():
    m = local_matrix(LocalConfiguration(5, SchemeKind.LOOP), 1)
    const = np.ones(6)
    assert np.allclose(m @ const, const, atol=1e-12)


def test_local_matrix_sqrt3_needs_two_steps():
    with pytest.raises(ConfigurationTooSmall):
        local_matrix(LocalConfiguration(6, SchemeKind.SQRT3), 1)


def test_local_matrix_crease_spokes_loop_only():
    cfg = LocalConfiguration(6, SchemeKind.LOOP, crease_spokes=(0, 3))
    m = local_matrix(cfg, 1)
    assert np.allclose(m.sum(axis=1), 1.0, atol=1e-12)
    # center is a crease vertex: its row is the spline even mask over the
    # two marked spokes
    expect = np.zeros(7)
    expect[0] = 0.75
    expect[1] = 0.125
    expect[4] = 0.125
    assert np.allclose(m[0], expect, atol=1e-12)
    with pytest.raises(ConfigurationTooSmall):
        local_matrix(LocalConfiguration(6, SchemeKind.SQRT3, crease_spokes=(0, 3)), 2)


@pytest.mark.parametrize("n", VALENCES)
def test_two_step_map_matches_composed_matrix(n):
    rng = np.random.default_rng(n)
    pts = rng.normal(size=(n + 1, 3))
    m = local_matrix(LocalConfiguration(n, SchemeKind.SQRT3), 2)
    assert np.abs(m @ pts - two_step_map(n, sqrt3_alpha(n), pts)).max() < 1e-12


def test_two_step_map_affine_and_linear():
    n = 6
    p = np.array([2.0, -1.0, 0.5])
    pts = np.tile(p, (n + 1, 1))
    assert np.allclose(two_step_map(n, sqrt3_alpha(n), pts), pts)
    rng = np.random.default_rng(1)
    base = rng.normal(size=(n + 1, 3))
    delta = np.zeros_like(base)
    delta[0] = (1.0, 0.0, 0.0)
    out0 = two_step_map(n, 1 / 3, base)
    out1 = two_step_map(n, 1 / 3, base + delta)
    out2 = two_step_map(n, 1 / 3, base + 2 * delta)
    assert np.allclose(out2 - out1, out1 - out0, atol=1e-12)


def test_two_step_map_invalid():
    with pytest.raises(InvalidValence):
        two_step_map(2, 0.5, np.zeros((3, 3)))
    with pytest.raises(ValueError):
        two_step_map(6, 0.5, np.zeros((6, 3)))


# ---------------------------------------------------------------------------
# spectra


def test_spectrum_identity():
    rep = spectrum(np.eye(5))
    assert np.allclose(rep.magnitudes, 1.0)
    assert not rep.complex_flags.any()


def test_spectrum_sqrt3_n6_multiset():
    m = local_matrix(LocalConfiguration(6, SchemeKind.SQRT3), 2)
    rep = spectrum(m)
    want = np.sort([1, 1 / 3, 1 / 3, 1 / 9, 1 / 9, 1 / 9, 0])[::-1]
    assert np.abs(np.sort(rep.magnitudes)[::-1] - want).max() < 1e-6


def test_spectrum_complex_pair_flagged():
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    rep = spectrum(rot)
    assert rep.complex_flags.all()


def test_spectrum_non_square():
    with pytest.raises(NonSquare):
        spectrum(np.zeros((3, 4)))


@pytest.mark.parametrize("n", VALENCES)
def test_expected_sqrt3_spectrum_formula(n):
    vals = expected_sqrt3_spectrum(n)
    assert len(vals) == n + 1
    assert vals[0] == pytest.approx(1.0)
    a = sqrt3_alpha(n)
    members = {round(v, 12) for v in vals}
    assert round((2.0 - 3.0 * a) ** 2 / 9.0, 12) in members
    for k in range(1, n):
        assert round((2.0 + 2.0 * math.cos(2 * math.pi * k / n)) / 9.0, 12) in members


def test_expected_sqrt3_spectrum_n4_explicit():
    a = (4.0 - 2.0 * math.cos(math.pi / 2.0)) / 9.0
    assert a == pytest.approx(4.0 / 9.0)
    vals = np.sort(expected_sqrt3_spectrum(4, a))[::-1]
    want = np.sort(
        [1.0, (2.0 - 4.0 / 3.0) ** 2 / 9.0]
        + [(2.0 + 2.0 * math.cos(math.pi * k / 2.0)) / 9.0 for k in (1, 2, 3)]
    )[::-1]
    assert np.allclose(vals, want)


def test_check_sqrt3_conditions():
    m = local_matrix(LocalConfiguration(6, SchemeKind.SQRT3), 2)
    ok = check_sqrt3_conditions(spectrum(m))
    assert ok.passed
    assert not check_sqrt3_conditions([1.0, 0.5, 0.3]).passed
    assert check_sqrt3_conditions([1.0, 0.4, 0.4, 0.1]).passed


def test_loop_subdominant_values():
    assert loop_subdominant(6) == pytest.approx(0.5)
    assert loop_subdominant(3) == pytest.approx(0.25)
    assert loop_subdominant(4) == pytest.approx(3.0 / 8.0)
    with pytest.raises(InvalidValence):
        loop_subdominant(2)


def test_check_tangent_plane_condition():
    m = local_matrix(LocalConfiguration(6, SchemeKind.LOOP), 1)
    assert check_tangent_plane_condition(spectrum(m)).passed
    assert not check_tangent_plane_condition([1.0, 0.5, 0.5, 0.5]).passed
    assert not check_tangent_plane_condition([1.0, 1.0, 0.5, 0.2]).passed


@pytest.mark.parametrize("n", VALENCES)
def test_loop_third_eigenvalue_below_pair(n):
    assert loop_third_eigenvalue(n) < loop_subdominant(n)


# ---------------------------------------------------------------------------
# valence trace / convergence


def test_valence_trace_crease_between_smooth_faces():
    patch = make_patch(6, 4)
    tags = SharpnessTags.from_iterables([(0, 1)], ())
    trace = valence_trace(patch, tags, 3)
    assert trace.max_abs_residual() == 0
    by_kind = {}
    for row in trace.rows:
        by_kind.setdefault(row.kind, []).append(row)
    assert [r.valences for r in by_kind["midpoint"]] == [(4, 6, 8)]
    for r in by_kind["endpoint"]:
        assert r.valences == (6, 7, 8, 9)
        assert r.sharp_counts == (1, 1, 1, 1)


def test_valence_trace_smooth_vertex_constant():
    patch = make_patch(6, 4)
    tags = SharpnessTags.from_iterables([(0, 1)], ())
    records = subdivide(patch, tags, SchemeKind.HYBRID, 3)
    # a smooth interior vertex far from the crease keeps its valence
    far = 2  # ring-1 vertex not on the tagged edge
    for rec in records:
        assert rec.mesh.vertex_degrees()[far] == 6


def test_valence_trace_needs_levels():
    patch = make_patch(6, 3)
    tags = SharpnessTags.from_iterables([(0, 1)], ())
    with pytest.raises(TooFewLevels):
        valence_trace(patch, tags, 0)


def test_convergence_ratio_constant_mesh():
    pos = np.ones((12, 3))
    mesh = build_mesh(pos, make_icosahedron().faces)
    records = subdivide(mesh, SharpnessTags(), SchemeKind.SQRT3, 3)
    assert convergence_ratio(records) == 0.0


def test_convergence_ratio_sqrt3_band(icosahedron):
    records = subdivide(icosahedron, SharpnessTags(), SchemeKind.SQRT3, 6)
    ratio = convergence_ratio(records[2:])
    assert ratio < 0.9
    # per double step the contraction approaches the two-step subdominant 1/3
    assert 0.25 < ratio * ratio < 0.42
    # trend: later windows sit closer to 1/3 than earlier ones
    early = convergence_ratio(records[:4]) ** 2
    late = convergence_ratio(records[3:]) ** 2
    assert abs(late - 1.0 / 3.0) <= abs(early - 1.0 / 3.0) + 1e-9


def test_convergence_ratio_loop_band(icosahedron):
    records = subdivide(icosahedron, SharpnessTags(), SchemeKind.LOOP, 5)
    ratio = convergence_ratio(records[1:])
    assert 0.3 < ratio < 0.7


def test_convergence_ratio_too_few(icosahedron):
    records = subdivide(icosahedron, SharpnessTags(), SchemeKind.SQRT3, 1)
    with pytest.raises(TooFewLevels):
        convergence_ratio(records)


# ---------------------------------------------------------------------------
# characteristic map


def test_characteristic_map_loop_regular_cases():
    for n in (5, 6):
        sample = characteristic_map(SchemeKind.LOOP, n, 16)
        assert sample.rows == 16
        assert sample.regular
        assert sample.injective
        assert sample.overlap_count == 0
        assert len(sample.grid) == n
        for a, row in enumerate(sample.grid[0]):
            assert row.shape == (a + 1, 2)


def test_characteristic_map_sqrt3():
    sample = characteristic_map(SchemeKind.SQRT3, 5, 9)
    assert sample.rows == 9
    assert sample.regular and sample.injective


def test_characteristic_map_bad_resolution():
    with pytest.raises(ConfigurationTooSmall):
        characteristic_map(SchemeKind.LOOP, 6, 0)


def test_characteristic_map_subdominant_matches_closed_form():
    sample = characteristic_map(SchemeKind.LOOP, 7, 8)
    assert sample.subdominant == pytest.approx(loop_subdominant(7), abs=1e-9)


# ---------------------------------------------------------------------------
# packaged reports


def test_report_tree_keys():
    rep = analyze_scheme(SchemeKind.LOOP, 6)
    tree = report_tree(rep)
    assert tree["scheme"] == "loop"
    assert tree["valence"] == 6
    assert tree["steps"] == 1
    assert tree["condition_eq9"] is True
    assert tree["subdominant"] == pytest.approx(0.5, abs=1e-9)
    assert len(tree["eigenvalues"]) == 7


def test_report_sqrt3_passes_conditions():
    rep = analyze_scheme(SchemeKind.SQRT3, 6)
    assert rep.ordering_check.passed
    assert rep.tangent_check.passed
    assert rep.spectrum.subdominant == pytest.approx(1.0 / 3.0, abs=1e-9)
