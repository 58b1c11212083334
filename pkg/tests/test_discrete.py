import math

import numpy as np
import pytest

from meandist import discrete, generators
from meandist.discrete import DiscreteManifold, MeshError
from meandist.meshio import MeshFormatError, read_mesh, write_off
from meandist.model_spaces import Sphere

from .oracles import dijkstra_reference

TORUS_EXACT = (math.sqrt(2) + math.log(1 + math.sqrt(2))) / 6


@pytest.fixture(scope="module")
def ico4():
    return generators.icosphere(4)


# -- construction and mesh input ----------------------------------------------

def test_icosahedron_counts_and_area():
    m = generators.icosphere(0)
    assert (m.vertex_count, m.edge_count) == (12, 30)
    # regular icosahedron with circumradius 1: edge a = 4 / sqrt(10 + 2 sqrt 5), area 5 sqrt(3) a^2
    a = 4 / math.sqrt(10 + 2 * math.sqrt(5))
    assert np.allclose(m.lengths, a)
    assert m.total_volume == pytest.approx(5 * math.sqrt(3) * a * a, rel=1e-12)
    assert m.euler_characteristic() == 2


def test_square_sheet_weights():
    m = generators.square_sheet()
    assert m.total_volume == pytest.approx(1.0)
    assert np.allclose(m.vertex_weight, [1 / 3, 1 / 6, 1 / 3, 1 / 6])


def test_two_component_mesh_rejected(tmp_path):
    path = tmp_path / "two.off"
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 0, 0], [6, 0, 0], [5, 1, 0]], dtype=float)
    write_off(path, verts, [[0, 1, 2], [3, 4, 5]])
    with pytest.raises(MeshError, match="disconnected"):
        discrete.from_mesh(path)


def test_non_manifold_and_degenerate_rejected():
    verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1]], dtype=float)
    with pytest.raises(MeshError, match="non-manifold"):
        discrete.from_mesh((verts, [[0, 1, 2], [0, 1, 3], [0, 1, 4]]))
    flat = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
    with pytest.raises(MeshError, match="degenerate"):
        discrete.from_mesh((flat, [[0, 1, 2]]))


def test_off_obj_roundtrip(tmp_path):
    m = generators.icosphere(1)
    off = tmp_path / "ico.off"
    write_off(off, m.embedding, m.faces)
    obj = tmp_path / "ico.obj"
    lines = ["# comment", "o ico"] + [f"v {float(x)!r} {float(y)!r} {float(z)!r}" for x, y, z in m.embedding]
    lines += ["vn 0 0 1"] + [f"f {a + 1}//1 {b + 1}//1 {c + 1}//1" for a, b, c in m.faces]
    obj.write_text("\n".join(lines) + "\n")
    for path in (off, obj):
        m2 = discrete.from_mesh(path)
        assert m2.vertex_count == 42 and m2.edge_count == 120
        assert m2.total_volume == pytest.approx(m.total_volume, rel=1e-14)


def test_obj_quads_and_unknown_format(tmp_path):
    obj = tmp_path / "quad.obj"
    obj.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    with pytest.raises(MeshFormatError):
        read_mesh(obj)
    with pytest.raises(MeshFormatError):
        read_mesh(tmp_path / "x.stl")


def test_manifold_invariants():
    with pytest.raises(MeshError):
        DiscreteManifold(2, [[0, 1]], [0.0], [1, 1], 1)
    with pytest.raises(MeshError):
        DiscreteManifold(2, [[0, 1]], [1.0], [-1, 1], 1)
    with pytest.raises(MeshError):
        DiscreteManifold(2, [[0, 1], [1, 0]], [1.0, 1.0], [1, 1], 1)
    with pytest.raises(MeshError):
        DiscreteManifold(3, [[0, 1]], [1.0], [1, 1, 1], 1)


# -- subdivision --------------------------------------------------------------

def test_subdivide_counts_and_identity():
    base = generators.icosphere(0)
    assert generators.icosphere(1).vertex_count == 42
    assert discrete.subdivide(base, 0) is base
    assert discrete.subdivide(generators.square_sheet(), 2).total_volume == pytest.approx(1.0)


def test_subdivide_level3_area():
    m = generators.icosphere(3)
    assert abs(m.total_volume - 4 * math.pi) / (4 * math.pi) < 0.005


def test_subdivide_needs_embedding():
    with pytest.raises(MeshError):
        discrete.subdivide(generators.cycle(8), 1)


# -- distance fields ----------------------------------------------------------

def test_cycle_and_path_examples():
    c = generators.cycle(8, 8.0)
    assert discrete.distance_field(c, 0).dist[4] == 4
    p = generators.path_graph([1.0, 2.0])
    assert list(discrete.distance_field(p, 0).dist) == [0, 1, 3]
    with pytest.raises(IndexError):
        discrete.distance_field(p, 3)


@pytest.mark.parametrize("maker", [lambda: generators.icosphere(2), lambda: generators.torus_grid(9),
                                   lambda: generators.euclidean_grid(6)])
def test_distance_field_matches_heap_dijkstra(maker):
    m = maker()
    for s in (0, m.vertex_count // 2, m.vertex_count - 1):
        ref = dijkstra_reference(m.vertex_count, m.edges, m.lengths, s)
        assert np.allclose(discrete.distance_field(m, s).dist, ref, rtol=0, atol=1e-12)


def test_distance_field_lipschitz_and_deterministic():
    m = generators.icosphere(3)
    for s in (0, 100, 641):
        d = discrete.distance_field(m, s).dist
        assert d[s] == 0
        assert np.all(np.abs(d[m.edges[:, 0]] - d[m.edges[:, 1]]) <= m.lengths + 1e-12)
        assert np.array_equal(d, discrete.distance_field(m, s).dist)


def test_icosphere_pole_to_antipode_within_3_percent(ico4):
    d = discrete.distance_field(ico4, generators.NORTH_POLE).dist[generators.SOUTH_POLE]
    assert abs(d - math.pi) / math.pi < 0.03


def test_icosphere_graph_distance_overestimates(ico4):
    # the edge-graph metric never undercuts chords and stays within the ~1.1 distortion band
    d = discrete.distance_field(ico4, generators.NORTH_POLE).dist[generators.SOUTH_POLE]
    assert math.pi <= d <= 1.1 * math.pi


# -- f and oracle fields ------------------------------------------------------

def test_f_examples():
    assert discrete.f_of(generators.cycle(100, 1.0), 0) == pytest.approx(0.25, abs=1e-3)
    assert discrete.f_of(generators.single_vertex(), 0) == 0.0


def test_torus_grid_oracle_f():
    m = generators.torus_grid(200)
    f = discrete.f_of(m, 0, discrete.distance_oracle_field(m, 0))
    assert abs(f - 0.3826) / 0.3826 < 0.01


def test_oracle_field_examples(ico4):
    m = generators.torus_grid(4)
    fld = discrete.distance_oracle_field(m, 0)
    assert fld.dist[12] == pytest.approx(0.25)  # vertex (0.75, 0)
    assert fld.dist[0] == 0
    sph = discrete.distance_oracle_field(ico4, generators.NORTH_POLE)
    assert sph.dist[generators.SOUTH_POLE] == pytest.approx(math.pi)
    with pytest.raises(MeshError):
        discrete.distance_oracle_field(generators.square_sheet(), 0)


def test_oracle_field_matches_scalar_distance(ico4):
    space = Sphere(2, 1.0)
    fld = discrete.distance_oracle_field(ico4, 5)
    for j in (0, 17, 400, 2561):
        assert fld.dist[j] == pytest.approx(space.distance(ico4.points[5], ico4.points[j]), abs=1e-14)


# -- diameter, eccentricity, profiles ----------------------------------------

def test_diameter_examples():
    assert discrete.diameter(generators.cycle(8, 8.0)).value == 4
    est = discrete.diameter(generators.path_graph([1.0, 2.0]))
    assert est.value == 3 and not est.lower_bound_only


def test_diameter_icosphere_level4(ico4):
    est = discrete.diameter(ico4)
    assert abs(est.value - math.pi) / math.pi < 0.03


def test_sampled_diameter_is_lower_bound():
    m = generators.icosphere(3)
    exact = discrete.diameter(m).value
    est = discrete.diameter(m, "sampled", seeds=4, rng=np.random.default_rng(0))
    assert est.lower_bound_only and est.value <= exact
    assert est.value > 0.95 * exact
    with pytest.raises(MeshError):
        discrete.diameter(m, "exact", budget=100)


def test_eccentricity_examples():
    c = generators.cycle(8, 8.0)
    assert all(discrete.eccentricity(c, s) == 4 for s in range(8))
    assert discrete.eccentricity(generators.path_graph([1.0, 2.0]), 1) == 2


def test_profile_examples():
    c = generators.cycle(8, 8.0)
    prof = discrete.ball_volume_profile(c, 0)
    assert prof.volume_at(2) == 5 * c.vertex_weight[0]
    assert prof.radial_integral == pytest.approx(discrete.f_of(c, 0), rel=1e-15)
    g = generators.euclidean_grid(10)
    prof = discrete.ball_volume_profile(g, 0)
    assert prof.volumes[-1] == pytest.approx(g.total_volume, rel=1e-14)
    assert np.all(np.diff(prof.volumes) > 0) and np.all(np.diff(prof.radii) > 0)


@pytest.mark.parametrize("maker", [lambda: generators.icosphere(3), lambda: generators.torus_grid(20),
                                   lambda: generators.euclidean_grid(15)])
def test_radial_integral_equals_f(maker):
    m = maker()
    for s in (0, m.vertex_count - 1):
        prof = discrete.ball_volume_profile(m, s)
        assert prof.radial_integral == pytest.approx(discrete.f_of(m, s), rel=1e-12)


def test_refinement_convergence_to_sphere_value():
    errors = [abs(discrete.f_of(generators.icosphere(lv), 0) - 2 * math.pi ** 2) for lv in (2, 3, 4, 5)]
    assert all(b <= a for a, b in zip(errors, errors[1:])), errors


def test_refinement_convergence_with_oracle_distances():
    errors = [abs(discrete.f_of(m, 0, discrete.distance_oracle_field(m, 0)) - 2 * math.pi ** 2)
              for m in (generators.icosphere(lv) for lv in (2, 3, 4, 5))]
    assert all(b < a for a, b in zip(errors, errors[1:])), errors


# -- pairwise properties on small corpora ------------------------------------

@pytest.mark.parametrize("maker", [lambda: generators.icosphere(2), lambda: generators.torus_grid(12),
                                   lambda: generators.cycle(40), lambda: generators.euclidean_grid(8)])
def test_pairwise_mean_distance_properties(maker):
    m = maker()
    D = np.vstack([blk for _, blk in discrete.distance_rows(m, chunk=50)])
    f = discrete.f_all(m)
    V = m.total_volume
    assert np.all(f[:, None] + f[None, :] >= D * V - 1e-9)
    assert np.all(np.abs(f[:, None] - f[None, :]) <= D * V + 1e-9)
    assert f.max() >= 0.5 * D.max() * V - 1e-9
    ecc = D.max(axis=1)
    assert np.all(ecc >= 0.5 * ecc.max() - 1e-9)
