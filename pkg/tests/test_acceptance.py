"""The twelve acceptance criteria, each at its stated tolerance and runtime budget.

Every criterion records one PASS/FAIL line; the lines are printed together
when the module finishes (visible in ``pytest -v`` output).
"""
import json
import math
import time

import numpy as np
import pytest
from mpmath import mp, mpf

from meandist import bounds, discrete, generators, verify
from meandist.cli import main
from meandist.counterexample import sweep
from meandist.model_spaces import (Circle, EuclideanBall, FlatTorus, HyperbolicBall, Sphere, ball_mean_distance,
                                   ball_volume, mean_distance_exact)

TORUS_CLOSED_FORM = (math.sqrt(2) + math.log(1 + math.sqrt(2))) / 6
RESULTS = {}


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    lines = [f"acceptance {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}" for k, (ok, detail) in sorted(RESULTS.items())]
    if reporter is not None:
        reporter.write_line("")
        for line in lines:
            reporter.write_line(line)
    else:  # pragma: no cover
        print("\n".join(lines))


def record(k, checks, elapsed, budget):
    """checks: list of (description, passed)."""
    checks = list(checks) + [(f"runtime {elapsed:.2f}s < {budget:g}s", elapsed < budget)]
    failed = [d for d, ok in checks if not ok]
    ok = not failed
    RESULTS[k] = (ok, "; ".join(failed) if failed else f"{len(checks)} checks, {elapsed:.2f}s")
    assert ok, "; ".join(failed)


def _cli_json(capsys, *argv):
    code = main(list(argv))
    out, _ = capsys.readouterr()
    return code, {r["quantity"]: r["value"] for r in json.loads(out)["results"]}


def test_01_torus_exact_value(capsys):
    t0 = time.perf_counter()
    code, vals = _cli_json(capsys, "model-eval", "--space", "torus:1,1")
    f = vals["f"]
    elapsed = time.perf_counter() - t0
    record(1, [
        (f"exit code {code} == 0", code == 0),
        (f"f={f!r} equals closed form", abs(f - TORUS_CLOSED_FORM) <= 1e-12),
        (f"f rounds to 0.3826 (got {round(f, 4)})", round(f, 4) == 0.3826),
        (f"f > sqrt(2)/4", f > math.sqrt(2) / 4),
    ], elapsed, 1.0)


def test_02_torus_discrete_convergence():
    t0 = time.perf_counter()
    errors = []
    for N in (50, 100, 200):
        m = generators.torus_grid(N)
        f = discrete.f_of(m, 0, discrete.distance_oracle_field(m, 0))
        errors.append(abs(f - 0.38260) / 0.38260)
    elapsed = time.perf_counter() - t0
    record(2, [
        (f"errors decrease {errors}", all(b < a for a, b in zip(errors, errors[1:]))),
        (f"N=200 error {errors[-1]:.2e} < 1%", errors[-1] < 0.01),
    ], elapsed, 30.0)


def test_03_sphere_equality():
    t0 = time.perf_counter()
    checks = []
    for n, k in [(1, 1.0), (2, 1.0), (2, 4.0), (3, 1.0)]:
        s = Sphere(n, k)
        ratio = mean_distance_exact(s) / (s.diameter() * s.volume())
        checks.append((f"S^{n}_{k:g} ratio {ratio!r} == 0.5", abs(ratio - 0.5) <= 1e-12))
    m = generators.icosphere(4)
    f = discrete.f_of(m, generators.NORTH_POLE, discrete.distance_oracle_field(m, generators.NORTH_POLE))
    ratio = f / (math.pi * m.total_volume)
    checks.append((f"icosphere(4) oracle ratio {ratio:.5f} within 1% of 0.5", abs(ratio - 0.5) / 0.5 < 0.01))
    record(3, checks, time.perf_counter() - t0, 60.0)


def test_04_circle():
    t0 = time.perf_counter()
    l = 1.0
    m = generators.cycle(1000, l)
    f = discrete.f_of(m, 0)
    err = abs(f - l * l / 4) / (l * l / 4)
    record(4, [(f"cycle(1000) f={f!r} within 0.1% of l^2/4 (err {err:.1e})", err < 1e-3)],
           time.perf_counter() - t0, 5.0)


def test_05_compact_lower_bound_margin():
    t0 = time.perf_counter()
    checks = [
        ("c_compact(1) == 1/16", abs(bounds.c_compact(1) - 1 / 16) <= 1e-12),
        ("c_compact(2) == 1/54", abs(bounds.c_compact(2) - 1 / 54) <= 1e-12),
    ]
    # homogeneous model spaces: f is the same from every source, so the min is f itself
    for space in (Circle(1.0), Sphere(1, 1.0), Sphere(2, 1.0), Sphere(2, 4.0), Sphere(3, 1.0), FlatTorus(1.0, 1.0)):
        ratio = mean_distance_exact(space) / (space.diameter() * space.volume())
        margin = ratio / bounds.c_compact(space.dim)
        checks.append((f"{space!r} margin {margin:.2f}x >= 10x", margin >= 10.0))
    for m in (generators.cycle(64, 1.0), generators.icosphere(3), generators.torus_grid(30)):
        ratio = float(discrete.f_all(m).min()) / (discrete.diameter(m).value * m.total_volume)
        margin = ratio / bounds.c_compact(m.dim_hint)
        checks.append((f"{m.label} min-over-sources margin {margin:.2f}x >= 10x", margin >= 10.0))
    record(5, checks, time.perf_counter() - t0, 60.0)


def test_06_g_optimizers():
    t0 = time.perf_counter()
    checks = []
    cases = [("compact", bounds.g_compact, bounds.argmax_g_compact, bounds.c_compact, 0.5),
             ("hadamard", bounds.g_hadamard, bounds.argmax_g_hadamard, bounds.c_hadamard, 1.0),
             ("noncompact", bounds.g_noncompact, bounds.argmax_g_noncompact, bounds.c_noncompact, 0.5)]
    d = 1.0
    for name, g, argmax, const, hi in cases:
        for n in range(1, 11):
            xs = np.linspace(0.0, hi * d, 100_001)
            vals = g(xs, d, n)
            k = int(np.argmax(vals))
            checks.append((f"{name} n={n} argmax", abs(xs[k] - argmax(d, n)) <= 1e-5 * d))
            checks.append((f"{name} n={n} max", abs(vals[k] - const(n) * d) <= 1e-6 * const(n) * d))
    record(6, checks, time.perf_counter() - t0, 5.0)


def test_07_cartan_hadamard_balls():
    t0 = time.perf_counter()
    checks = []
    for n in range(1, 7):
        ball = EuclideanBall(n, 1.0)
        ratio = ball_mean_distance(ball) / (ball.radius * ball_volume(ball, ball.radius))
        checks.append((f"euclidean n={n} ratio == n/(n+1)", abs(ratio - n / (n + 1)) <= 1e-12))
        checks.append((f"euclidean n={n} ratio > c_hadamard", ratio > bounds.c_hadamard(n)))
    for d in (0.5, 1.0, 2.0):
        ball = HyperbolicBall(2, d)
        ratio = ball_mean_distance(ball) / (d * ball_volume(ball, d))
        checks.append((f"hyperbolic d={d} ratio {ratio:.5f} > c_hadamard(2)", ratio > bounds.c_hadamard(2)))
    record(7, checks, time.perf_counter() - t0, 5.0)


def _noncompact_high_precision(n):
    mp.dps = 40
    s = mp.sqrt(n * n + n + 1)
    return float(3 / (2 * s + 2 * n + 1) * (mpf(n) / (n + 2 + 2 * s)) ** n)


def test_08_noncompact_constant():
    t0 = time.perf_counter()
    checks = []
    for n, shown in ((1, 0.071797), (2, 0.013507)):
        ref = _noncompact_high_precision(n)
        checks.append((f"c_noncompact({n}) == high-precision formula", abs(bounds.c_noncompact(n) - ref) <= 1e-9))
        # displayed values carry six decimals; the exact value behind 0.013507 is 0.0135061...
        checks.append((f"c_noncompact({n}) ~ {shown}", abs(bounds.c_noncompact(n) - shown) < 1e-6))
    for n in (1, 2):
        t = bounds.argmax_g_noncompact(1.0, n)
        checks.append((f"c_noncompact({n}) == g(t*) / d",
                       abs(bounds.c_noncompact(n) - bounds.g_noncompact(t, 1.0, n)) <= 1e-9))
    for n in range(1, 7):
        for d in (0.5, 1.0, 3.0):
            ball = EuclideanBall(n, d)
            rep = bounds.check_lower_bound(bounds.BoundSpec.for_theorem("T4_2", n), ball_mean_distance(ball),
                                           d, ball_volume(ball, d))
            checks.append((f"euclidean n={n} d={d} satisfies with margin",
                           rep.satisfied and rep.ratio > 2 * rep.threshold))
    record(8, checks, time.perf_counter() - t0, 5.0)


def test_09_dumbbell_sweep():
    t0 = time.perf_counter()
    rows = sweep([5.0, 10.0, 20.0, 40.0, 80.0])
    rp = [r.ratio_p for r in rows]
    rq = [r.ratio_q for r in rows]
    mesh = sweep([10.0], mode="mesh")[0]
    agree = abs(mesh.ratio_p - rows[1].ratio_p) / rows[1].ratio_p
    record(9, [
        ("ratio_p strictly decreasing", all(b < a for a, b in zip(rp, rp[1:]))),
        (f"final ratio_p {rp[-1]:.4f} < 0.05", rp[-1] < 0.05),
        ("ratio_q strictly increasing", all(b > a for a, b in zip(rq, rq[1:]))),
        (f"final ratio_q {rq[-1]:.4f} > 0.9", rq[-1] > 0.9),
        (f"mesh row source {mesh.source!r}", mesh.source == "mesh"),
        (f"mesh L=10 ratio_p agrees within 10% (rel {agree:.2e})", agree < 0.10),
    ], time.perf_counter() - t0, 300.0)


def test_10_pairwise_property_suites():
    t0 = time.perf_counter()
    checks = verify.run_suite("section2", {"slack": 1e-9}) + verify.run_suite("lemma3_1")
    record(10, [(f"{c.suite}: {c.name} ({c.value:.3g} vs {c.threshold:.3g})", c.passed) for c in checks],
           time.perf_counter() - t0, 120.0)


def test_11_bishop_gromov_monitor():
    t0 = time.perf_counter()
    checks = []
    for level in (3, 4):
        m = generators.icosphere(level)
        prof = discrete.ball_volume_profile(m, generators.NORTH_POLE)
        v = bounds.volume_comparison_check(prof, 2, "lower", band=0.02, resolution=float(m.lengths.max()))
        checks.append((f"icosphere({level}) nonincreasing (worst {v.worst_excess:.3g})", v.passed))
    radii = np.linspace(0.05, 3.0, 60)
    for n in (2, 3):
        v = bounds.volume_comparison_check(bounds.model_profile(HyperbolicBall(n, 3.0), radii), n, "upper", band=0.02)
        checks.append((f"hyperbolic n={n} nondecreasing", v.passed))
    for n in (1, 2, 3):
        prof = bounds.model_profile(EuclideanBall(n, 3.0), radii)
        q = prof.volumes / radii ** n
        checks.append((f"euclidean n={n} constant", float(np.ptp(q)) <= 1e-12 * float(q.mean())))
        for direction in ("lower", "upper"):
            checks.append((f"euclidean n={n} {direction} passes",
                           bounds.volume_comparison_check(prof, n, direction, band=0.02).passed))
    record(11, checks, time.perf_counter() - t0, 30.0)


def test_12_growth():
    t0 = time.perf_counter()
    radii = [1.0, 2.0, 4.0, 8.0]
    plane = EuclideanBall(2, 1.0)
    v = bounds.growth_check(radii, [ball_mean_distance(plane, r) for r in radii])
    record(12, [
        ("f/r strictly increasing", v.passed),
        (f"growth factors {v.growth_factors} == 4", all(abs(g - 4.0) <= 1e-12 for g in v.growth_factors)),
        ("f/r == (2/3) pi r^2", all(abs(x - 2 / 3 * math.pi * r * r) <= 1e-12 * x for x, r in zip(v.values, radii))),
    ], time.perf_counter() - t0, 1.0)
