"""Batch command-line interface.

Subcommands: ``model-eval``, ``mesh-eval``, ``verify``, ``dumbbell-sweep``.
Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, bounds, counterexample, discrete, generators, verify
from .discrete import MeshError
from .meshio import MeshFormatError
from .model_spaces import (
    Circle,
    Dumbbell,
    EuclideanBall,
    FlatTorus,
    HyperbolicBall,
    PointRef,
    PreconditionError,
    Sphere,
    UnsupportedVariant,
    ball_mean_distance,
    ball_volume,
    dumbbell_asymptotics,
    eps_from_circumference,
    mean_distance_exact,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _numbers(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from exc


def parse_space(spec: str):
    """``circle:l``, ``sphere:n,k``, ``torus:a,b``, ``ball:n,d``, ``hyperbolic:n,d``, ``dumbbell:L,C``."""
    kind, _, args = spec.partition(":")
    vals = _numbers(args)
    kind = kind.strip().lower()
    try:
        if kind == "circle" and len(vals) == 1:
            return Circle(vals[0])
        if kind == "sphere" and len(vals) in (1, 2):
            return Sphere(int(vals[0]), vals[1] if len(vals) == 2 else 1.0)
        if kind == "torus" and len(vals) == 2:
            return FlatTorus(vals[0], vals[1])
        if kind == "ball" and len(vals) == 2:
            return EuclideanBall(int(vals[0]), vals[1])
        if kind == "hyperbolic" and len(vals) == 2:
            return HyperbolicBall(int(vals[0]), vals[1])
        if kind == "dumbbell" and len(vals) == 2:
            return Dumbbell(eps_from_circumference(vals[1]), vals[0])
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    raise InputError(f"cannot parse space {spec!r}")


def parse_generator(spec: str):
    """Returns (manifold, ricci_nonnegative, named_points)."""
    kind, _, args = spec.partition(":")
    vals = _numbers(args)
    kind = kind.strip().lower()
    try:
        if kind == "cycle" and len(vals) in (1, 2):
            return generators.cycle(int(vals[0]), vals[1] if len(vals) == 2 else 1.0), True, {}
        if kind == "torus_grid" and len(vals) in (1, 3):
            a, b = (vals[1], vals[2]) if len(vals) == 3 else (1.0, 1.0)
            return generators.torus_grid(int(vals[0]), a, b), True, {}
        if kind == "icosphere" and len(vals) == 1:
            names = {"pole": generators.NORTH_POLE, "north": generators.NORTH_POLE, "south": generators.SOUTH_POLE}
            return generators.icosphere(int(vals[0])), True, names
        if kind == "euclidean_grid" and len(vals) in (1, 2):
            # a flat patch with boundary, not a closed manifold
            return generators.euclidean_grid(int(vals[0]), vals[1] if len(vals) == 2 else 1.0), False, {}
        if kind == "dumbbell" and len(vals) in (2, 6):
            L, C = vals[0], vals[1]
            res = {}
            if len(vals) == 6:
                res = dict(zip(("rings_sphere", "rings_cyl", "fan_disk", "segments"), map(int, vals[2:])))
            mesh = counterexample.build_dumbbell_mesh(counterexample.DumbbellParams(L=L, C=C, **res))
            return mesh.manifold, False, {"p": mesh.p, "q": mesh.q}
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    raise InputError(f"cannot parse generator {spec!r}")


def parse_sources(text: str, m, names: dict, seed: int) -> list[int]:
    text = text.strip()
    if text == "all":
        return list(range(m.vertex_count))
    match = re.fullmatch(r"sample\((\d+)(?:,\s*(\d+))?\)", text)
    if match:
        k = int(match.group(1))
        rng = np.random.default_rng(int(match.group(2)) if match.group(2) else seed)
        return sorted(rng.choice(m.vertex_count, size=min(k, m.vertex_count), replace=False).tolist())
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in names:
            out.append(names[tok])
        elif tok.lstrip("-").isdigit():
            v = int(tok)
            if not 0 <= v < m.vertex_count:
                raise InputError(f"vertex id {v} out of range [0, {m.vertex_count})")
            out.append(v)
        else:
            raise InputError(f"unknown source selector {tok!r}")
    return out


def parse_tolerances(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"tolerance must be KEY=VALUE, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError as exc:
            raise InputError(f"bad tolerance value in {item!r}") from exc
    return out


def _row(quantity, value, provenance, **extra):
    row = {"quantity": quantity, "value": value, "provenance": provenance}
    row.update({k: v for k, v in extra.items() if v is not None})
    return row


def _report_rows(rep: bounds.BoundReport, provenance: str) -> dict:
    return _row(
        f"{rep.spec.theorem_id} ratio",
        rep.ratio,
        provenance,
        theorem=rep.spec.theorem_id,
        verdict=rep.verdict,
        constant=rep.spec.constant,
        threshold=rep.threshold,
    )


def _passes(rows) -> bool:
    return all(r.get("verdict") not in ("violated", "fail") for r in rows)


def cmd_model_eval(args):
    space = parse_space(args.space)
    rows = []
    if isinstance(space, (Circle, Sphere, FlatTorus)):
        p = None
        if args.point:
            p = PointRef(tuple(_numbers(args.point)))
            space.check_point(p)
        square = isinstance(space, FlatTorus) and space.side_a == space.side_b == 1.0
        prov = "quadrature" if isinstance(space, FlatTorus) and not square else "exact"
        f = mean_distance_exact(space, p)
        d, V = space.diameter(), space.volume()
        rows += [_row("f", f, prov), _row("d", d, "exact"), _row("V", V, "exact"),
                 _row("ratio", f / (d * V), prov)]
        rep = bounds.check_lower_bound(bounds.BoundSpec.for_theorem("T1_1", space.dim), f, d, V)
        rows.append(_report_rows(rep, prov))
        if isinstance(space, Sphere):
            rep = bounds.check_upper_bound_sphere(space.dim, space.curvature, f)
            rows.append(_row("P2_5 equality", rep.equality, "exact", theorem="P2_5", verdict=rep.verdict,
                             constant=0.5, threshold=0.5))
    elif isinstance(space, (EuclideanBall, HyperbolicBall)):
        prov = "exact" if isinstance(space, EuclideanBall) else "quadrature"
        d = space.radius
        f = ball_mean_distance(space)
        V = ball_volume(space, d)
        rows += [_row("f(p,d)", f, prov), _row("d", d, "exact"), _row("V_p(d)", V, prov),
                 _row("ratio", f / (d * V), prov)]
        rows.append(_report_rows(bounds.check_lower_bound(bounds.BoundSpec.for_theorem("T4_1", space.dim),
                                                          f, d, V), prov))
        if isinstance(space, EuclideanBall):
            rows.append(_report_rows(bounds.check_lower_bound(
                bounds.BoundSpec.for_theorem("T4_2", space.dim), f, d, V), prov))
    elif isinstance(space, Dumbbell):
        try:
            est = dumbbell_asymptotics(space.eps, space.L)
        except PreconditionError as exc:
            raise InputError(str(exc)) from exc
        rows += [_row("C", est.C, "exact"), _row("f(p)", est.f_p, "asymptotic"),
                 _row("f(q)", est.f_q, "quadrature"), _row("dV", est.dV, "asymptotic"),
                 _row("ratio_p", est.ratio_p, "asymptotic"), _row("ratio_q", est.ratio_q, "asymptotic")]
        spec = bounds.BoundSpec.for_theorem("T1_1", 2, hypothesis_holds=False)
        rep = bounds.check_lower_bound(spec, est.f_p, space.diameter(), space.volume(),
                                       asymptotic_inputs=True)
        rows.append(_report_rows(rep, "asymptotic"))
    else:  # pragma: no cover
        raise UnsupportedVariant(type(space).__name__)
    inputs = {"space": args.space, "point": args.point}
    return _emit("model-eval", inputs, rows, args), EXIT_OK if _passes(rows) else EXIT_FAIL


def cmd_mesh_eval(args):
    if bool(args.mesh) == bool(args.generator):
        raise InputError("give exactly one of --mesh or --generator")
    if args.mesh:
        m = discrete.from_mesh(args.mesh)
        ricci, names = args.assume_ricci_nonneg, {}
    else:
        m, ricci, names = parse_generator(args.generator)
    sources = parse_sources(args.source, m, names, args.seed)
    if not sources:
        raise InputError("no sources selected")

    if args.oracle:
        if m.space is None:
            raise InputError(f"{m.label} has no model-space annotations; --oracle unavailable")
        fields = [discrete.distance_oracle_field(m, s) for s in sources]
        f = np.array([fld.dist @ m.vertex_weight for fld in fields])
        d, lower_only, prov = m.space.diameter(), False, "oracle"
    else:
        f = discrete.f_all(m, sources)
        if m.vertex_count <= discrete.EXACT_DIAMETER_BUDGET:
            est = discrete.diameter(m, "exact")
        else:
            est = discrete.diameter(m, "sampled", seeds=8, rng=np.random.default_rng(args.seed))
        d, lower_only, prov = est.value, est.lower_bound_only, "graph"
    V = m.total_volume
    ratios = f / (d * V)

    rows = [_row("f", float(fv), prov, source=int(s)) for s, fv in zip(sources, f)]
    rows += [_row("ratio", float(r), prov, source=int(s)) for s, r in zip(sources, ratios)]
    rows += [
        _row("d", d, prov, verdict="lower_bound_only" if lower_only else None),
        _row("V", V, "exact"),
        _row("min f", float(f.min()), prov),
        _row("max f", float(f.max()), prov),
        _row("min ratio", float(ratios.min()), prov),
        _row("max ratio", float(ratios.max()), prov),
    ]
    spec = bounds.BoundSpec.for_theorem("T1_1", max(m.dim_hint, 1), hypothesis_holds=ricci)
    if lower_only:
        rows.append(_row("T1_1 ratio", float(ratios.min()), prov, theorem="T1_1", verdict="refused",
                         constant=spec.constant))
    else:
        rows.append(_report_rows(bounds.check_lower_bound(spec, float(f.min()), d, V), prov))
    if args.source == "all" and not lower_only:
        ok = float(f.max()) >= 0.5 * d * V - verify.PAIR_SLACK
        rows.append(_row("max f >= dV/2", ok, "check", verdict="pass" if ok else "fail",
                         threshold=0.5 * d * V))

    inputs = {"mesh": args.mesh, "generator": args.generator, "source": args.source,
              "oracle": bool(args.oracle), "seed": args.seed}
    if args.format == "csv":
        text = _csv(["source", "f", "ratio"], [[s, float(fv), float(r)] for s, fv, r in zip(sources, f, ratios)])
    else:
        text = _json("mesh-eval", inputs, rows)
    return text, EXIT_OK if _passes(rows) else EXIT_FAIL


def cmd_verify(args):
    tolerances = parse_tolerances(args.tolerance)
    try:
        checks = verify.run_suite(args.suite, tolerances)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    ok = verify.suite_passed(checks)
    if args.format == "csv":
        text = _csv(["suite", "name", "value", "threshold", "passed", "informational"],
                    [[c.suite, c.name, c.value, c.threshold, c.passed, c.informational] for c in checks])
    else:
        rows = []
        for c in checks:
            verdict = "pass" if c.passed else ("info" if c.informational else "fail")
            rows.append(_row(f"{c.suite}: {c.name}", c.value, "check", theorem=c.theorem,
                             verdict=verdict, threshold=c.threshold))
        text = _json("verify", {"suite": args.suite, "tolerance": tolerances}, rows)
    return text, EXIT_OK if ok else EXIT_FAIL


SWEEP_COLUMNS = ["L", "C", "ratio_p", "ratio_q", "source"]


def cmd_dumbbell_sweep(args):
    L_values = _numbers(args.L)
    rule = args.rule
    if rule.startswith("fixed"):
        _, _, val = rule.partition(":")
        if not val:
            raise InputError("fixed rule needs a value, e.g. fixed:0.01")
        rule = float(val)
    elif rule not in ("inverse_cube", "1/L^3"):
        raise InputError(f"unknown rule {args.rule!r}")
    try:
        records = counterexample.sweep(L_values, rule, args.mode)
    except (PreconditionError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    rows = [[r.L, r.C, r.ratio_p, r.ratio_q, r.source] for r in records]
    if args.format == "json":
        results = []
        for r in records:
            prov = "graph" if r.source == "mesh" else "asymptotic"
            for name, value in (("ratio_p", r.ratio_p), ("ratio_q", r.ratio_q)):
                results.append(_row(name, value, prov, source=r.source, L=r.L, C=r.C))
        text = _json("dumbbell-sweep", {"L": L_values, "rule": args.rule, "mode": args.mode}, results)
    else:
        text = _csv(SWEEP_COLUMNS, rows)
    return text, EXIT_OK


def _json(command, inputs, rows) -> str:
    payload = {"command": command, "inputs": inputs, "results": rows, "version": __version__}
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _emit(command, inputs, rows, args) -> str:
    if args.format == "csv":
        return _csv(["quantity", "value", "provenance", "theorem", "verdict"],
                    [[r["quantity"], r["value"], r["provenance"], r.get("theorem", ""), r.get("verdict", "")]
                     for r in rows])
    return _json(command, inputs, rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meandist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format="json"):
        p.add_argument("--format", choices=["json", "csv"], default=default_format)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")

    p = sub.add_parser("model-eval", help="exact/quadrature f, d, V and bound checks on a model space")
    p.add_argument("--space", required=True, help="circle:l | sphere:n,k | torus:a,b | ball:n,d | "
                                                  "hyperbolic:n,d | dumbbell:L,C")
    p.add_argument("--point", default=None, help="base point coordinates (circle/sphere/torus)")
    common(p)
    p.set_defaults(func=cmd_model_eval)

    p = sub.add_parser("mesh-eval", help="discrete f over selected sources of a mesh or generated manifold")
    p.add_argument("--mesh", type=Path, default=None, help=".off or .obj triangle mesh")
    p.add_argument("--generator", default=None, help="cycle:N[,l] | torus_grid:N[,a,b] | icosphere:levels | "
                                                    "euclidean_grid:N[,size] | dumbbell:L,C[,rings_sphere,rings_cyl,fan_disk,segments]")
    p.add_argument("--source", default="all", help="vertex id(s), named point, 'all', or 'sample(k[,seed])'")
    p.add_argument("--oracle", action="store_true", help="use model-space distances instead of graph distances")
    p.add_argument("--assume-ricci-nonneg", action="store_true",
                   help="treat a file mesh as satisfying the compact Ric >= 0 hypothesis")
    common(p)
    p.set_defaults(func=cmd_mesh_eval)

    p = sub.add_parser("verify", help="run a built-in verification suite")
    p.add_argument("--suite", default="all", choices=("all",) + verify.SUITES)
    p.add_argument("--tolerance", action="append", default=[], metavar="KEY=VALUE",
                   help="override band (Bishop-Gromov, default 0.02) or slack (pair checks, default 1e-9)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dumbbell-sweep", help="f(p)/(dV) and f(q)/(dV) along increasing tube length")
    p.add_argument("--L", default="5,10,20,40,80")
    p.add_argument("--rule", default="inverse_cube", help="inverse_cube (C = 1/L^3) or fixed:C")
    p.add_argument("--mode", choices=["asymptotic", "mesh"], default="asymptotic")
    common(p, default_format="csv")
    p.set_defaults(func=cmd_dumbbell_sweep)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        text, code = args.func(args)
    except (InputError, MeshError, MeshFormatError, PreconditionError, UnsupportedVariant,
            FileNotFoundError, IndexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
