"""Synthetic discrete manifolds: cycles, paths, wrap grids, icospheres, sheets."""
from __future__ import annotations

import math

import numpy as np

from .discrete import DiscreteManifold, from_mesh, subdivide
from .model_spaces import Circle, FlatTorus, PointRef, Sphere


def cycle(N: int, length: float = 1.0) -> DiscreteManifold:
    """Cycle graph with N equal edges and uniform weights summing to ``length``."""
    if N < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    h = length / N
    ids = np.arange(N)
    return DiscreteManifold(
        vertex_count=N,
        edges=np.column_stack([ids, (ids + 1) % N]),
        lengths=np.full(N, h),
        vertex_weight=np.full(N, h),
        dim_hint=1,
        label=f"cycle({N},{length:g})",
        points=[PointRef((i * h,)) for i in ids],
        space=Circle(length),
    )


def path_graph(lengths, weights=None) -> DiscreteManifold:
    lengths = np.asarray(lengths, dtype=float)
    n = lengths.size + 1
    ids = np.arange(n - 1)
    return DiscreteManifold(
        vertex_count=n,
        edges=np.column_stack([ids, ids + 1]),
        lengths=lengths,
        vertex_weight=np.ones(n) if weights is None else weights,
        dim_hint=1,
        label="path",
    )


def single_vertex(weight: float = 1.0) -> DiscreteManifold:
    return DiscreteManifold(1, np.empty((0, 2)), np.empty(0), np.array([weight]), dim_hint=0, label="point")


def torus_grid(N: int, a: float = 1.0, b: float = 1.0) -> DiscreteManifold:
    """N x N wrap-around grid on the a x b flat torus, one cell of measure ab/N^2 per vertex."""
    if N < 3:
        raise ValueError("torus grid needs N >= 3")
    i, j = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    vid = (i * N + j).ravel()
    right = (i * N + (j + 1) % N).ravel()
    down = (((i + 1) % N) * N + j).ravel()
    edges = np.concatenate([np.column_stack([vid, down]), np.column_stack([vid, right])])
    lengths = np.concatenate([np.full(vid.size, a / N), np.full(vid.size, b / N)])
    xy = np.column_stack([i.ravel() * a / N, j.ravel() * b / N])
    return DiscreteManifold(
        vertex_count=N * N,
        edges=edges,
        lengths=lengths,
        vertex_weight=np.full(N * N, a * b / (N * N)),
        dim_hint=2,
        embedding=xy,
        label=f"torus_grid({N},{a:g},{b:g})",
        points=[PointRef(p) for p in xy],
        space=FlatTorus(a, b),
    )


def icosahedron() -> tuple[np.ndarray, np.ndarray]:
    """Unit-circumradius icosahedron with a vertex at the north pole (index 0)."""
    z = 1.0 / math.sqrt(5.0)
    r = 2.0 / math.sqrt(5.0)
    verts = [(0.0, 0.0, 1.0)]
    verts += [(r * math.cos(2 * math.pi * k / 5), r * math.sin(2 * math.pi * k / 5), z) for k in range(5)]
    verts += [(r * math.cos(2 * math.pi * (k + 0.5) / 5), r * math.sin(2 * math.pi * (k + 0.5) / 5), -z)
              for k in range(5)]
    verts.append((0.0, 0.0, -1.0))
    faces = []
    for k in range(5):
        u0, u1 = 1 + k, 1 + (k + 1) % 5
        l0, l1 = 6 + k, 6 + (k + 1) % 5
        faces.append((0, u0, u1))
        faces.append((u0, l0, u1))
        faces.append((u1, l0, l1))
        faces.append((11, l1, l0))
    return np.array(verts), np.array(faces, dtype=np.int64)


def icosphere(levels: int, project: bool = True) -> DiscreteManifold:
    """Subdivided icosahedron; vertex 0 is the north pole, vertex 11 the south pole."""
    verts, faces = icosahedron()
    base = from_mesh((verts, faces), label="icosahedron",
                     points=[PointRef(v) for v in verts], space=Sphere(2, 1.0))
    if levels == 0:
        return base
    return subdivide(base, levels, project=project)


NORTH_POLE = 0
SOUTH_POLE = 11


def square_sheet() -> DiscreteManifold:
    """Unit square split into two triangles."""
    verts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
    return from_mesh((verts, np.array([[0, 1, 2], [0, 2, 3]])), label="square_sheet")


def euclidean_grid(N: int, size: float = 1.0) -> DiscreteManifold:
    """Triangulated planar (N+1) x (N+1) patch of side ``size``."""
    xs = np.linspace(0.0, size, N + 1)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    verts = np.column_stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)])
    faces = []
    for i in range(N):
        for j in range(N):
            a = i * (N + 1) + j
            b, c, d = a + 1, a + N + 1, a + N + 2
            faces += [(a, c, d), (a, d, b)]
    return from_mesh((verts, np.array(faces)), label=f"euclidean_grid({N})")
