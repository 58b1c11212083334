"""Built-in verification suites over a fixed corpus of spaces and meshes.

Every suite returns a list of :class:`Check` rows; a suite passes when all of
its rows pass.  Rows marked ``informational`` (spaces outside a theorem's
hypothesis) are reported but never fail a suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import bounds, discrete, generators
from .counterexample import DumbbellParams, build_dumbbell_mesh
from .model_spaces import (
    Circle,
    EuclideanBall,
    FlatTorus,
    HyperbolicBall,
    Sphere,
    ball_mean_distance,
    ball_volume,
    mean_distance_exact,
)

SUITES = ("t1_1", "p2_5", "t4_1", "t4_2", "lemma3_1", "section2", "bishop_gromov")
PAIR_SLACK = 1e-9
CORPUS_VERTEX_LIMIT = 2000


@dataclass
class Check:
    suite: str
    name: str
    value: float
    threshold: float
    passed: bool
    theorem: str | None = None
    informational: bool = False
    details: dict = field(default_factory=dict)

    def as_dict(self):
        out = {
            "suite": self.suite,
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "passed": self.passed,
            "informational": self.informational,
        }
        if self.theorem:
            out["theorem"] = self.theorem
        out.update(self.details)
        return out


def model_corpus():
    """Compact model spaces with Ric >= 0."""
    return [Circle(1.0), Circle(7.0), Sphere(1, 1.0), Sphere(2, 1.0), Sphere(2, 4.0), Sphere(3, 1.0),
            FlatTorus(1.0, 1.0), FlatTorus(1.0, 2.0)]


@lru_cache(maxsize=None)
def mesh_corpus() -> tuple:
    """(manifold, ricci_nonnegative) pairs, all with at most 2000 vertices."""
    dumbbell = build_dumbbell_mesh(DumbbellParams(L=5.0, C=1 / 125, rings_sphere=8, rings_cyl=8,
                                                  fan_disk=4, segments=16)).manifold
    return (
        (generators.cycle(64, 1.0), True),
        (generators.path_graph([1.0, 2.0, 0.5, 1.5]), False),
        (generators.icosphere(3), True),
        (generators.torus_grid(30), True),
        (generators.euclidean_grid(12), False),
        (dumbbell, False),
    )


def _all_pairs(m):
    assert m.vertex_count <= CORPUS_VERTEX_LIMIT
    return np.vstack([block for _, block in discrete.distance_rows(m)])


def suite_t1_1():
    out = []
    for n in range(1, 11):
        c = bounds.c_compact(n)
        out.append(Check("t1_1", f"c_compact({n}) < 1/2", c, 0.5, c < 0.5, "T1_1"))
    for space in model_corpus():
        spec = bounds.BoundSpec.for_theorem("T1_1", space.dim)
        rep = bounds.check_lower_bound(spec, mean_distance_exact(space), space.diameter(), space.volume())
        out.append(Check("t1_1", f"{space!r} f/(dV)", rep.ratio, rep.threshold, rep.satisfied, "T1_1",
                         details={"margin": rep.ratio / rep.threshold, "provenance": "exact"}))
    for m, ricci in mesh_corpus():
        if m.dim_hint < 1:
            continue
        f = discrete.f_all(m)
        d = discrete.diameter(m).value
        spec = bounds.BoundSpec.for_theorem("T1_1", m.dim_hint, hypothesis_holds=ricci)
        rep = bounds.check_lower_bound(spec, float(f.min()), d, m.total_volume)
        out.append(Check("t1_1", f"{m.label} min f/(dV)", rep.ratio, rep.threshold, rep.satisfied, "T1_1",
                         informational=not ricci,
                         details={"margin": rep.ratio / rep.threshold, "verdict": rep.verdict,
                                  "provenance": "graph"}))
    return out


def suite_p2_5():
    out = []
    for n, k in [(1, 1.0), (2, 1.0), (2, 4.0), (3, 1.0), (2, 0.25), (3, 4.0)]:
        s = Sphere(n, k)
        rep = bounds.check_upper_bound_sphere(n, k, mean_distance_exact(s))
        out.append(Check("p2_5", f"{s!r} equality", rep.ratio, 0.5, rep.equality, "P2_5"))
    m = generators.icosphere(4)
    f = discrete.f_of(m, generators.NORTH_POLE, discrete.distance_oracle_field(m, generators.NORTH_POLE))
    # mesh measure with the exact sphere metric; normalize by the mesh's own area
    ratio = f / (math.pi * m.total_volume)
    rep = bounds.check_upper_bound_sphere(2, 1.0, ratio * math.pi * 4 * math.pi, mesh_input=True)
    out.append(Check("p2_5", "icosphere(4) oracle f/(dV)", ratio, 0.5, rep.equality, "P2_5",
                     details={"rel_error": abs(ratio - 0.5) / 0.5}))
    return out


def suite_t4_1():
    out = []
    for n in range(1, 7):
        ball = EuclideanBall(n, 1.0)
        ratio = ball_mean_distance(ball) / (ball.radius * ball_volume(ball, ball.radius))
        c = bounds.c_hadamard(n)
        out.append(Check("t4_1", f"EuclideanBall(n={n}) f/(dV)", ratio, c, ratio > c, "T4_1",
                         details={"exact": n / (n + 1)}))
    for n in (1, 2, 3):
        for d in (0.5, 1.0, 2.0):
            ball = HyperbolicBall(n, d)
            ratio = ball_mean_distance(ball) / (d * ball_volume(ball, d))
            c = bounds.c_hadamard(n)
            out.append(Check("t4_1", f"HyperbolicBall(n={n}, d={d}) f/(dV)", ratio, c, ratio > c, "T4_1",
                             details={"provenance": "quadrature"}))
    return out


def suite_t4_2():
    out = []
    for n in range(1, 11):
        out.append(Check("t4_2", f"c_noncompact({n}) < c_hadamard({n})", bounds.c_noncompact(n),
                         bounds.c_hadamard(n), bounds.c_noncompact(n) < bounds.c_hadamard(n), "T4_2"))
    for n in range(1, 7):
        for d in (0.5, 1.0, 3.0):
            ball = EuclideanBall(n, d)
            ratio = ball_mean_distance(ball) / (d * ball_volume(ball, d))
            c = bounds.c_noncompact(n)
            out.append(Check("t4_2", f"EuclideanBall(n={n}, d={d}) f/(dV)", ratio, c, ratio >= c, "T4_2",
                             details={"strict": ratio > c}))
    return out


def suite_lemma3_1():
    out = []
    for m, _ in mesh_corpus():
        D = _all_pairs(m)
        ecc = D.max(axis=1)
        diam = float(ecc.max())
        worst = float(ecc.min())
        out.append(Check("lemma3_1", f"{m.label} min eccentricity", worst, 0.5 * diam,
                         worst >= 0.5 * diam - PAIR_SLACK, "L3_1"))
    return out


def suite_section2(slack: float = PAIR_SLACK):
    out = []
    for m, _ in mesh_corpus():
        D = _all_pairs(m)
        V = m.total_volume
        f = D @ m.vertex_weight
        fsum = f[:, None] + f[None, :]
        fdiff = np.abs(f[:, None] - f[None, :])
        dV = D * V
        sum_gap = float(np.min(fsum - dV))
        lip_gap = float(np.min(dV - fdiff))
        diam = float(D.max())
        out.append(Check("section2", f"{m.label} f(p)+f(q) >= d(p,q)V", sum_gap, -slack, sum_gap >= -slack))
        out.append(Check("section2", f"{m.label} |f(p)-f(q)| <= d(p,q)V", lip_gap, -slack, lip_gap >= -slack))
        out.append(Check("section2", f"{m.label} max f >= dV/2", float(f.max()), 0.5 * diam * V,
                         float(f.max()) >= 0.5 * diam * V - slack))
        sym = float(np.max(np.abs(D - D.T)))
        out.append(Check("section2", f"{m.label} symmetric distances", sym, slack, sym <= slack))
    return out


def suite_bishop_gromov(band: float = bounds.MONOTONE_BAND):
    out = []
    for level in (3, 4):
        m = generators.icosphere(level)
        h = float(m.lengths.max())
        for kind, fld in (("graph", discrete.distance_field(m, 0)),
                          ("oracle", discrete.distance_oracle_field(m, 0))):
            prof = discrete.ball_volume_profile(m, 0, fld)
            v = bounds.volume_comparison_check(prof, 2, "lower", band=band, resolution=h)
            out.append(Check("bishop_gromov", f"icosphere({level}) {kind} V/r^2 nonincreasing",
                             v.worst_excess, band, v.passed, details={"worst_pair": list(v.worst_pair)}))
    radii = np.linspace(0.05, 3.0, 60)
    for n in (2, 3):
        prof = bounds.model_profile(HyperbolicBall(n, 3.0), radii)
        v = bounds.volume_comparison_check(prof, n, "upper", band=band)
        out.append(Check("bishop_gromov", f"hyperbolic(n={n}) V/r^n nondecreasing", v.worst_excess, band, v.passed))
    for n in (1, 2, 3):
        prof = bounds.model_profile(EuclideanBall(n, 3.0), radii)
        spread = float(np.ptp(prof.volumes / radii ** n) / np.mean(prof.volumes / radii ** n))
        out.append(Check("bishop_gromov", f"euclidean(n={n}) V/r^n constant", spread, 1e-12, spread <= 1e-12))
    return out


SUITE_FUNCS = {
    "t1_1": suite_t1_1,
    "p2_5": suite_p2_5,
    "t4_1": suite_t4_1,
    "t4_2": suite_t4_2,
    "lemma3_1": suite_lemma3_1,
    "section2": suite_section2,
    "bishop_gromov": suite_bishop_gromov,
}


TOLERANCE_KEYS = {"band": "bishop_gromov", "slack": "section2"}


def run_suite(name: str, tolerances: dict | None = None) -> list[Check]:
    """Run one suite (or ``"all"``); ``tolerances`` may override ``band`` and ``slack``."""
    tolerances = dict(tolerances or {})
    unknown = set(tolerances) - set(TOLERANCE_KEYS)
    if unknown:
        raise ValueError(f"unknown tolerance key(s) {sorted(unknown)}; known: {sorted(TOLERANCE_KEYS)}")
    names = SUITES if name == "all" else (name,)
    out = []
    for suite in names:
        if suite not in SUITE_FUNCS:
            raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
        kwargs = {k: v for k, v in tolerances.items() if TOLERANCE_KEYS[k] == suite}
        out.extend(SUITE_FUNCS[suite](**kwargs))
    return out


def suite_passed(checks: list[Check]) -> bool:
    return all(c.passed for c in checks if not c.informational)
