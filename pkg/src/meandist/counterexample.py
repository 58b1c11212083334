"""Thin-neck dumbbell: the space on which f(p) / (d V) can be made arbitrarily small.

The surface is a unit sphere with a small cap cut off near the south pole, a
tube of circumference C and length L glued to the cut, and a flat lid closing
the tube.  With C = 1/L^3 the ratio at the north pole p tends to 0 while the
ratio at the lid center q tends to 1.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import discrete
from .discrete import DiscreteManifold
from .model_spaces import Dumbbell, PointRef, dumbbell_asymptotics, eps_from_circumference

MESH_VERTEX_BUDGET = 300_000


@dataclass(frozen=True)
class DumbbellParams:
    L: float
    C: float
    rings_sphere: int = 32
    rings_cyl: int = 64
    fan_disk: int = 16
    segments: int = 64

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not 0 < self.C < 2 * math.pi:
            raise ValueError(f"neck circumference C must lie in (0, 2 pi), got {self.C!r}")
        for name in ("rings_sphere", "rings_cyl", "fan_disk", "segments"):
            if getattr(self, name) < 3:
                raise ValueError(f"{name} must be >= 3 to weld the rings")

    @property
    def eps(self) -> float:
        return eps_from_circumference(self.C)

    @property
    def neck_radius(self) -> float:
        return self.C / (2.0 * math.pi)

    @property
    def vertex_count(self) -> int:
        return 2 + self.segments * (self.rings_sphere + self.rings_cyl + self.fan_disk - 1)

    @property
    def space(self) -> Dumbbell:
        return Dumbbell(self.eps, self.L)


@dataclass(frozen=True)
class DumbbellMesh:
    manifold: DiscreteManifold
    p: int
    q: int
    regions: np.ndarray
    params: DumbbellParams


@dataclass(frozen=True)
class SweepRecord:
    L: float
    C: float
    ratio_p: float
    ratio_q: float
    source: str
    fallback: bool = False
    diameter_lower_bound: bool = False


def _profile(params: DumbbellParams):
    """Meridian profile (radius, z, region, local coordinate) from p down to q."""
    eps, L, a = params.eps, params.L, params.neck_radius
    theta_end = math.pi - math.acos(1.0 - eps)
    rings = []
    for i in range(1, params.rings_sphere + 1):
        th = theta_end * i / params.rings_sphere
        rings.append((math.sin(th), math.cos(th), "sphere", th))
    # the last sphere ring is the neck; pin it exactly to the cut
    rings[-1] = (a, -1.0 + eps, "sphere", theta_end)
    z0 = -1.0 + eps
    for j in range(1, params.rings_cyl + 1):
        t = L * j / params.rings_cyl
        rings.append((a, z0 - t, "cylinder", t))
    for k in range(1, params.fan_disk):
        rho = a * (1.0 - k / params.fan_disk)
        rings.append((rho, z0 - L, "disk", rho))
    return rings, z0 - L


def build_dumbbell_mesh(params: DumbbellParams) -> DumbbellMesh:
    """Surface-of-revolution triangulation of the dumbbell, welded into one sphere-like mesh."""
    S = params.segments
    rings, z_bottom = _profile(params)
    phis = 2.0 * math.pi * np.arange(S) / S
    verts = [(0.0, 0.0, 1.0)]
    regions = ["sphere"]
    points = [PointRef((0.0, 0.0), "sphere")]
    for radius, z, region, coord in rings:
        for phi in phis:
            verts.append((radius * math.cos(phi), radius * math.sin(phi), z))
            regions.append(region)
            points.append(PointRef((coord, phi), region))
    verts.append((0.0, 0.0, z_bottom))
    regions.append("disk")
    points.append(PointRef((0.0, 0.0), "disk"))
    q = len(verts) - 1

    faces = []
    ring0 = 1
    for s in range(S):
        faces.append((0, ring0 + s, ring0 + (s + 1) % S))
    for r in range(len(rings) - 1):
        top, bot = 1 + r * S, 1 + (r + 1) * S
        for s in range(S):
            a, b = top + s, top + (s + 1) % S
            c, d = bot + s, bot + (s + 1) % S
            faces.append((a, c, d))
            faces.append((a, d, b))
    last = 1 + (len(rings) - 1) * S
    for s in range(S):
        faces.append((q, last + (s + 1) % S, last + s))

    verts = np.asarray(verts)
    m = discrete.from_mesh(
        (verts, np.asarray(faces, dtype=np.int64)),
        label=f"dumbbell(L={params.L:g},C={params.C:.3g})",
        points=points,
        space=params.space,
    )
    return DumbbellMesh(m, p=0, q=q, regions=np.asarray(regions), params=params)


def _mesh_row(params: DumbbellParams) -> SweepRecord:
    mesh = build_dumbbell_mesh(params)
    m = mesh.manifold
    if m.vertex_count <= discrete.EXACT_DIAMETER_BUDGET:
        diam = discrete.diameter(m, "exact")
    else:
        diam = discrete.diameter(m, "sampled", seeds=8)
    dV = diam.value * m.total_volume
    return SweepRecord(
        L=params.L,
        C=params.C,
        ratio_p=discrete.f_of(m, mesh.p) / dV,
        ratio_q=discrete.f_of(m, mesh.q) / dV,
        source="mesh",
        diameter_lower_bound=diam.lower_bound_only,
    )


def _asymptotic_row(L: float, C: float, fallback: bool = False) -> SweepRecord:
    est = dumbbell_asymptotics(eps_from_circumference(C), L)
    return SweepRecord(L=L, C=C, ratio_p=est.ratio_p, ratio_q=est.ratio_q, source="asymptotic", fallback=fallback)


def neck_for(L: float, rule: str | float) -> float:
    """C for a given L: ``"inverse_cube"`` gives 1/L^3, a number fixes C."""
    if rule in ("inverse_cube", "1/L^3"):
        return L ** -3.0
    return float(rule)


def sweep(
    L_values: Sequence[float],
    rule: str | float = "inverse_cube",
    mode: str = "asymptotic",
    resolution: dict | None = None,
    budget: int = MESH_VERTEX_BUDGET,
    workers: int | None = None,
) -> list[SweepRecord]:
    """Evaluate f(p)/(dV) and f(q)/(dV) along an increasing list of tube lengths."""
    L_values = [float(L) for L in L_values]
    if not L_values:
        raise ValueError("need at least one L")
    if any(b <= a for a, b in zip(L_values, L_values[1:])):
        raise ValueError("L values must be strictly increasing")
    if mode not in ("asymptotic", "mesh"):
        raise ValueError(f"unknown sweep mode {mode!r}")
    resolution = resolution or {}

    def row(L):
        C = neck_for(L, rule)
        if mode == "asymptotic":
            return _asymptotic_row(L, C)
        params = DumbbellParams(L=L, C=C, **resolution)
        if params.vertex_count > budget:
            return _asymptotic_row(L, C, fallback=True)
        return _mesh_row(params)

    # validate every row's C before spending time on meshes
    for L in L_values:
        C = neck_for(L, rule)
        if mode == "asymptotic" or DumbbellParams(L=L, C=C, **resolution).vertex_count > budget:
            dumbbell_asymptotics(eps_from_circumference(C), L)
        else:
            DumbbellParams(L=L, C=C, **resolution)

    if workers == 1 or len(L_values) == 1:
        return [row(L) for L in L_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(row, L_values))


def write_dumbbell_off(path, params: DumbbellParams) -> DumbbellMesh:
    from .meshio import write_off

    mesh = build_dumbbell_mesh(params)
    write_off(path, mesh.manifold.embedding, mesh.manifold.faces)
    return mesh
