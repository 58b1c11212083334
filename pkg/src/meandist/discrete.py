"""Discrete manifolds as weighted metric graphs.

A :class:`DiscreteManifold` is an undirected graph with positive edge lengths
and a nonnegative measure on its vertices.  The discrete mean-distance
functional is ``f(p) = sum_x dist(p, x) * w(x)``.

Shortest paths are computed with :func:`scipy.sparse.csgraph.dijkstra`;
multi-source work is batched so all-pairs drivers never hold more than
``chunk`` rows at a time.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .model_spaces import ModelSpace, PointRef

logger = logging.getLogger(__name__)

EXACT_DIAMETER_BUDGET = 20_000
DEFAULT_CHUNK = 256


class MeshError(ValueError):
    """Invalid or unsupported mesh/graph input."""


@dataclass(frozen=True, eq=False)
class DiscreteManifold:
    """Weighted metric graph discretizing (M, dv).

    Parameters
    ----------
    vertex_count : int
    edges : (E, 2) int array
        Each undirected edge stored once.
    lengths : (E,) float array
        Strictly positive edge lengths.
    vertex_weight : (V,) float array
        Vertex measure; its sum is the total volume.
    dim_hint : int
        Dimension used to pick the bound constants.
    embedding : (V, k) float array, optional
    faces : (F, 3) int array, optional
        Triangles, kept for subdivision and Euler characteristic.
    points : sequence of PointRef, optional
        Model-space coordinates of each vertex (enables oracle distances).
    space : ModelSpace, optional
        The model space the ``points`` live in.
    """

    vertex_count: int
    edges: np.ndarray
    lengths: np.ndarray
    vertex_weight: np.ndarray
    dim_hint: int
    embedding: np.ndarray | None = None
    faces: np.ndarray | None = None
    label: str = ""
    points: Sequence[PointRef] | None = None
    space: ModelSpace | None = None
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        lengths = np.asarray(self.lengths, dtype=float).reshape(-1)
        weight = np.asarray(self.vertex_weight, dtype=float).reshape(-1)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "vertex_weight", weight)
        n = self.vertex_count
        if n < 1:
            raise MeshError("manifold needs at least one vertex")
        if weight.shape != (n,):
            raise MeshError(f"expected {n} vertex weights, got {weight.shape[0]}")
        if lengths.shape[0] != edges.shape[0]:
            raise MeshError("one length per edge required")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise MeshError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise MeshError("self-loop edges are not allowed")
        if np.any(~(lengths > 0)) or not np.all(np.isfinite(lengths)):
            raise MeshError("edge lengths must be strictly positive and finite")
        if np.any(weight < 0) or not weight.sum() > 0:
            raise MeshError("vertex weights must be nonnegative with positive sum")
        key = np.sort(edges, axis=1)
        if np.unique(key, axis=0).shape[0] != key.shape[0]:
            raise MeshError("duplicate undirected edge")
        if self.points is not None and len(self.points) != n:
            raise MeshError("one PointRef per vertex required")
        ncomp, _ = csgraph.connected_components(self.adjacency, directed=False)
        if ncomp != 1:
            raise MeshError(f"graph is disconnected ({ncomp} components)")

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        n = self.vertex_count
        u, v = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.concatenate([self.lengths, self.lengths])
        return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))

    @property
    def total_volume(self) -> float:
        return float(self.vertex_weight.sum())

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def euler_characteristic(self) -> int:
        if self.faces is None:
            raise MeshError("Euler characteristic needs faces")
        return self.vertex_count - self.edge_count + int(self.faces.shape[0])

    def check_vertex(self, v: int) -> int:
        if int(v) != v or not 0 <= v < self.vertex_count:
            raise IndexError(f"vertex id {v!r} out of range [0, {self.vertex_count})")
        return int(v)


@dataclass(frozen=True, eq=False)
class DistanceField:
    source: int
    dist: np.ndarray


@dataclass(frozen=True, eq=False)
class BallVolumeProfile:
    source: int
    radii: np.ndarray
    volumes: np.ndarray

    @property
    def radial_integral(self) -> float:
        """sum of radius * (volume increment): the shell-by-shell form of f."""
        increments = np.diff(self.volumes, prepend=0.0)
        return float(np.sum(self.radii * increments))

    def volume_at(self, r: float) -> float:
        idx = np.searchsorted(self.radii, r, side="right")
        return 0.0 if idx == 0 else float(self.volumes[idx - 1])


@dataclass(frozen=True)
class DiameterEstimate:
    value: float
    lower_bound_only: bool


def distance_field(m: DiscreteManifold, source: int) -> DistanceField:
    """Exact graph shortest-path distances from ``source``."""
    source = m.check_vertex(source)
    dist = csgraph.dijkstra(m.adjacency, directed=False, indices=source)
    return DistanceField(source, dist)


def distance_rows(
    m: DiscreteManifold, sources: Sequence[int] | None = None, chunk: int = DEFAULT_CHUNK
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(source_ids, distance_block)`` for batches of sources."""
    if sources is None:
        sources = np.arange(m.vertex_count)
    sources = np.asarray([m.check_vertex(s) for s in sources], dtype=np.int64)
    for start in range(0, sources.size, chunk):
        ids = sources[start:start + chunk]
        yield ids, csgraph.dijkstra(m.adjacency, directed=False, indices=ids)


def f_of(m: DiscreteManifold, source: int, field: DistanceField | None = None) -> float:
    """Discrete f(p) = sum_x d(p, x) w(x)."""
    if field is None:
        field = distance_field(m, source)
    return float(field.dist @ m.vertex_weight)


def f_all(m: DiscreteManifold, sources: Sequence[int] | None = None) -> np.ndarray:
    """f at every requested source (default: all vertices)."""
    out = []
    for _, block in distance_rows(m, sources):
        out.append(block @ m.vertex_weight)
    return np.concatenate(out)


def distance_oracle_field(m: DiscreteManifold, source: int, space: ModelSpace | None = None) -> DistanceField:
    """Distance field taken from the model space instead of the graph."""
    source = m.check_vertex(source)
    space = space if space is not None else m.space
    if space is None or m.points is None:
        raise MeshError(f"manifold {m.label!r} carries no model-space point annotations")
    dist = model_distances(space, m.points[source], m.points)
    dist[source] = 0.0
    return DistanceField(source, dist)


def model_distances(space: ModelSpace, p: PointRef, points: Sequence[PointRef]) -> np.ndarray:
    """Distances from ``p`` to every point, vectorized for the common spaces."""
    from .model_spaces import Circle, FlatTorus, Sphere

    if isinstance(space, FlatTorus):
        xy = np.array([q.coords for q in points])
        d = np.abs(xy - np.asarray(p.coords))
        d = np.minimum(d, np.array([space.side_a, space.side_b]) - d)
        return np.hypot(d[:, 0], d[:, 1])
    if isinstance(space, Sphere):
        u = np.asarray(p.coords)
        x = np.array([q.coords for q in points])
        ang = 2.0 * np.arctan2(np.linalg.norm(x - u, axis=1), np.linalg.norm(x + u, axis=1))
        return ang * space.radius
    if isinstance(space, Circle):
        s = np.array([q.coords[0] for q in points])
        g = np.abs(s - p.coords[0])
        return np.minimum(g, space.length - g)
    return np.array([space.distance(p, q) for q in points])


def eccentricity(m: DiscreteManifold, source: int) -> float:
    return float(distance_field(m, source).dist.max())


def _farthest(m: DiscreteManifold, start: int) -> tuple[int, float]:
    d = distance_field(m, start).dist
    far = int(np.argmax(d))
    return far, float(d[far])


def diameter(
    m: DiscreteManifold,
    mode: str = "exact",
    seeds: int = 8,
    rng: np.random.Generator | None = None,
    budget: int = EXACT_DIAMETER_BUDGET,
) -> DiameterEstimate:
    """Graph diameter.

    ``exact`` takes the max over every single-source field and refuses graphs
    above ``budget`` vertices.  ``sampled`` uses ``seeds`` random sources plus
    two double-sweep passes and is flagged as a lower bound.
    """
    if mode == "exact":
        if m.vertex_count > budget:
            raise MeshError(
                f"exact diameter limited to {budget} vertices (got {m.vertex_count}); use sampled mode"
            )
        best = 0.0
        for _, block in distance_rows(m):
            best = max(best, float(block.max()))
        return DiameterEstimate(best, lower_bound_only=False)
    if mode == "sampled":
        rng = rng if rng is not None else np.random.default_rng(0)
        starts = rng.choice(m.vertex_count, size=min(seeds, m.vertex_count), replace=False)
        best = 0.0
        for _, block in distance_rows(m, starts):
            best = max(best, float(block.max()))
        for start in (int(starts[0]), int(np.argmax(m.vertex_weight))):
            a, _ = _farthest(m, start)
            _, dab = _farthest(m, a)
            best = max(best, dab)
        return DiameterEstimate(best, lower_bound_only=True)
    raise ValueError(f"unknown diameter mode {mode!r}")


def ball_volume_profile(
    m: DiscreteManifold, source: int, field: DistanceField | None = None
) -> BallVolumeProfile:
    """V_p(r) at every distinct distance value from ``source``."""
    if field is None:
        field = distance_field(m, source)
    order = np.argsort(field.dist, kind="stable")
    d = field.dist[order]
    cum = np.cumsum(m.vertex_weight[order])
    last = np.r_[d[1:] != d[:-1], True]
    return BallVolumeProfile(field.source, d[last], cum[last])


# -- mesh construction -------------------------------------------------------

def _triangle_areas(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    v = vertices
    if v.shape[1] == 2:
        v = np.column_stack([v, np.zeros(len(v))])
    e1 = v[faces[:, 1]] - v[faces[:, 0]]
    e2 = v[faces[:, 2]] - v[faces[:, 0]]
    return 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)


def lumped_weights(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Barycentric mass lumping: each vertex gets a third of its incident areas."""
    areas = _triangle_areas(vertices, faces)
    w = np.zeros(len(vertices))
    for k in range(3):
        np.add.at(w, faces[:, k], areas / 3.0)
    return w


def mesh_edges(faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unique undirected edges and how many faces use each."""
    half = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    half = np.sort(half, axis=1)
    edges, counts = np.unique(half, axis=0, return_counts=True)
    return edges, counts


def from_mesh(
    mesh_source,
    label: str | None = None,
    points: Sequence[PointRef] | None = None,
    space: ModelSpace | None = None,
    area_tol: float = 1e-12,
) -> DiscreteManifold:
    """Build a manifold from a triangle mesh.

    ``mesh_source`` is a path to an OFF/OBJ file or a ``(vertices, faces)`` pair.
    """
    from .meshio import read_mesh

    if isinstance(mesh_source, tuple):
        vertices, faces = mesh_source
        label = label or "mesh"
    else:
        vertices, faces = read_mesh(mesh_source)
        label = label or str(mesh_source)
    vertices = np.asarray(vertices, dtype=float)
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if faces.size == 0:
        raise MeshError("mesh has no triangles")
    if faces.min() < 0 or faces.max() >= len(vertices):
        raise MeshError("face index out of range")
    if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])):
        raise MeshError("face with repeated vertex")
    areas = _triangle_areas(vertices, faces)
    # scale-free degeneracy test: area against the squared longest side
    corners = vertices[faces]
    longest = np.max(np.linalg.norm(corners - np.roll(corners, 1, axis=1), axis=2), axis=1)
    bad = np.flatnonzero(areas <= area_tol * longest ** 2)
    if bad.size:
        raise MeshError(f"{bad.size} degenerate (zero-area) triangle(s), first is face {int(bad[0])}")
    edges, counts = mesh_edges(faces)
    if np.any(counts > 2):
        raise MeshError(f"non-manifold mesh: {int(np.sum(counts > 2))} edge(s) shared by more than two faces")
    lengths = np.linalg.norm(vertices[edges[:, 0]] - vertices[edges[:, 1]], axis=1)
    return DiscreteManifold(
        vertex_count=len(vertices),
        edges=edges,
        lengths=lengths,
        vertex_weight=lumped_weights(vertices, faces),
        dim_hint=2,
        embedding=vertices,
        faces=faces,
        label=label,
        points=points,
        space=space,
    )


def subdivide(m: DiscreteManifold, levels: int, project: bool = False, radius: float = 1.0) -> DiscreteManifold:
    """Midpoint 4-split every triangle ``levels`` times.

    With ``project=True`` every vertex is pushed onto the sphere of ``radius``
    about the origin, and if the input carried a sphere model space the new
    vertices get matching point annotations.
    """
    if levels < 0:
        raise ValueError("levels must be >= 0")
    if m.embedding is None or m.faces is None:
        raise MeshError("subdivision needs an embedding and faces")
    if levels == 0:
        return m
    verts = np.array(m.embedding, dtype=float)
    faces = np.array(m.faces)
    for _ in range(levels):
        verts, faces = _split_once(verts, faces)
        if project:
            verts *= radius / np.linalg.norm(verts, axis=1, keepdims=True)
    points = None
    if project and m.space is not None and m.points is not None:
        points = [PointRef(v / radius) for v in verts]
    return from_mesh((verts, faces), label=f"{m.label}/sub{levels}", points=points,
                     space=m.space if points is not None else None)


def _split_once(verts: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    edges, _ = mesh_edges(faces)
    n = len(verts)
    mid = 0.5 * (verts[edges[:, 0]] + verts[edges[:, 1]])
    # lookup edge -> new vertex id via a sorted key
    key = edges[:, 0] * n + edges[:, 1]
    order = np.argsort(key)
    key_sorted = key[order]

    def midpoint(a, b):
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        return n + order[np.searchsorted(key_sorted, lo * n + hi)]

    a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
    ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
    new_faces = np.concatenate([
        np.column_stack([a, ab, ca]),
        np.column_stack([ab, b, bc]),
        np.column_stack([ca, bc, c]),
        np.column_stack([ab, bc, ca]),
    ])
    return np.vstack([verts, mid]), new_faces
