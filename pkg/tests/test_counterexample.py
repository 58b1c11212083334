import math

import numpy as np
import pytest

from meandist import discrete
from meandist.counterexample import (DumbbellParams, build_dumbbell_mesh, neck_for, sweep,
                                     write_dumbbell_off)
from meandist.model_spaces import PreconditionError

L_SWEEP = [5.0, 10.0, 20.0, 40.0, 80.0]


@pytest.fixture(scope="module")
def mesh_l5():
    return build_dumbbell_mesh(DumbbellParams(L=5.0, C=1 / 125, rings_sphere=32, rings_cyl=64, fan_disk=16))


@pytest.fixture(scope="module")
def mesh_rows():
    return sweep([5.0, 10.0, 20.0], mode="mesh")


def test_params_validation():
    with pytest.raises(ValueError):
        DumbbellParams(L=1.0, C=2 * math.pi)
    with pytest.raises(ValueError):
        DumbbellParams(L=0.0, C=0.01)
    with pytest.raises(ValueError):
        DumbbellParams(L=1.0, C=0.01, rings_cyl=2)
    p = DumbbellParams(L=5.0, C=1 / 125)
    assert 0 < p.eps < 1
    # C = 2 pi sqrt(2 eps - eps^2)
    assert 2 * math.pi * math.sqrt(2 * p.eps - p.eps ** 2) == pytest.approx(p.C, rel=1e-12)


def test_mesh_topology(mesh_l5):
    m = mesh_l5.manifold
    assert m.vertex_count == mesh_l5.params.vertex_count
    assert m.euler_characteristic() == 2
    assert mesh_l5.regions[mesh_l5.p] == "sphere" and mesh_l5.regions[mesh_l5.q] == "disk"
    assert set(np.unique(mesh_l5.regions)) == {"sphere", "cylinder", "disk"}


def test_mesh_total_weight(mesh_l5):
    target = 4 * math.pi + 5.0 / 125
    assert abs(mesh_l5.manifold.total_volume - target) / target < 0.02


def test_mesh_pole_distance(mesh_l5):
    d = discrete.distance_field(mesh_l5.manifold, mesh_l5.p).dist[mesh_l5.q]
    assert abs(d - (5.0 + math.pi)) / (5.0 + math.pi) < 0.03


def test_write_off_roundtrip(tmp_path):
    params = DumbbellParams(L=2.0, C=0.05, rings_sphere=8, rings_cyl=8, fan_disk=4, segments=16)
    mesh = write_dumbbell_off(tmp_path / "db.off", params)
    m2 = discrete.from_mesh(tmp_path / "db.off")
    assert m2.vertex_count == mesh.manifold.vertex_count
    assert m2.total_volume == pytest.approx(mesh.manifold.total_volume, rel=1e-12)


def test_neck_rules():
    assert neck_for(10.0, "inverse_cube") == pytest.approx(1e-3)
    assert neck_for(10.0, 0.02) == 0.02


def test_asymptotic_sweep_limits():
    rows = sweep(L_SWEEP)
    assert [r.L for r in rows] == L_SWEEP
    rp = [r.ratio_p for r in rows]
    rq = [r.ratio_q for r in rows]
    assert all(b < a for a, b in zip(rp, rp[1:]))
    assert all(b > a for a, b in zip(rq, rq[1:]))
    assert rp[-1] < 0.08 and rp[-1] < 0.05
    assert rq[-1] > 0.9
    for r in rows:
        assert r.source == "asymptotic" and not r.fallback
        assert 0 < r.ratio_p < 1 and 0 < r.ratio_q < 1
        assert r.ratio_p + r.ratio_q >= 0.95


def test_asymptotic_ratio_p_closed_form():
    for r in sweep(L_SWEEP):
        C, L = r.C, r.L
        expected = (2 * math.pi ** 2 + C * (math.pi * L + L * L / 2)) / ((L + math.pi) * (4 * math.pi + L * C))
        assert r.ratio_p == pytest.approx(expected, rel=1e-12)


def test_sweep_parallel_matches_serial():
    assert sweep(L_SWEEP, workers=4) == sweep(L_SWEEP, workers=1)


def test_sweep_errors():
    with pytest.raises(ValueError):
        sweep([10.0, 5.0])
    with pytest.raises(ValueError):
        sweep([])
    with pytest.raises(ValueError):
        sweep([5.0], mode="exact")
    with pytest.raises(PreconditionError):
        sweep([1.0, 2.0], rule=0.5)


def test_budget_fallback():
    rows = sweep([5.0, 10.0], mode="mesh", budget=100)
    assert all(r.source == "asymptotic" and r.fallback for r in rows)


def test_mesh_sweep_rows(mesh_rows):
    asym = sweep([5.0, 10.0, 20.0])
    rp = [r.ratio_p for r in mesh_rows]
    rq = [r.ratio_q for r in mesh_rows]
    assert all(r.source == "mesh" and not r.diameter_lower_bound for r in mesh_rows)
    assert all(b < a for a, b in zip(rp, rp[1:]))
    assert all(b > a for a, b in zip(rq, rq[1:]))
    for m, a in zip(mesh_rows, asym):
        assert abs(m.ratio_p - a.ratio_p) / a.ratio_p < 0.10
        assert m.ratio_p + m.ratio_q >= 0.95
