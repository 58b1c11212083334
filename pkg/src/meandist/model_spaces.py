"""Closed-form model geometries used as ground truth.

Each space is a frozen dataclass exposing ``diameter()``, ``volume()`` and
``distance(p, q)``.  Points are :class:`PointRef` values whose coordinates are
interpreted per space:

* ``Circle``: ``(s,)`` arc parameter in ``[0, length)``
* ``Sphere``: unit vector in R^(n+1) (scaled by the radius internally)
* ``FlatTorus``: ``(x, y)`` in ``[0, a) x [0, b)``
* ``EuclideanBall``: Cartesian vector of length ``dim``, norm <= radius
* ``HyperbolicBall``: geodesic polar (exponential map) vector, norm <= radius
* ``Dumbbell``: region tag plus ``(coord, azimuth)``; see :class:`Dumbbell`
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy import integrate

__all__ = [
    "PointRef",
    "ModelSpace",
    "Circle",
    "Sphere",
    "FlatTorus",
    "EuclideanBall",
    "HyperbolicBall",
    "Dumbbell",
    "UnsupportedVariant",
    "PreconditionError",
    "diameter",
    "volume",
    "distance",
    "mean_distance_exact",
    "ball_mean_distance",
    "ball_volume",
    "dumbbell_asymptotics",
    "unit_sphere_area",
    "neck_circumference",
    "eps_from_circumference",
]

SPHERE_AREA = 4.0 * math.pi  # V(S^2_1)
QUAD_EPSREL = 1e-10


class UnsupportedVariant(TypeError):
    """Raised when an operation is not defined for a given space variant."""


class PreconditionError(ValueError):
    """Raised when an asymptotic formula is requested outside its regime."""


@dataclass(frozen=True)
class PointRef:
    coords: tuple[float, ...]
    region: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in np.ravel(self.coords)))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


def unit_sphere_area(m: int) -> float:
    """Area of the unit m-sphere S^m in R^(m+1): 2 pi^((m+1)/2) / Gamma((m+1)/2)."""
    return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)


def _unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def _positive(name, value):
    if not value > 0 or not math.isfinite(value):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


def _dimension(n):
    if int(n) != n or n < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {n!r}")


class ModelSpace:
    """Common base for the model geometries."""

    asymptotic: ClassVar[bool] = False
    #: intrinsic dimension, used to pick the bound constants
    dim: int

    def diameter(self) -> float:
        raise NotImplementedError

    def volume(self) -> float:
        raise NotImplementedError

    def distance(self, p: PointRef, q: PointRef) -> float:
        raise NotImplementedError

    def check_point(self, p: PointRef) -> None:
        raise NotImplementedError

    def random_points(self, count: int, rng: np.random.Generator) -> list[PointRef]:
        raise NotImplementedError


@dataclass(frozen=True)
class Circle(ModelSpace):
    length: float
    dim: ClassVar[int] = 1

    def __post_init__(self):
        _positive("length", self.length)

    def diameter(self):
        return self.length / 2.0

    def volume(self):
        return self.length

    def check_point(self, p):
        if len(p.coords) != 1 or not 0.0 <= p.coords[0] < self.length:
            raise ValueError(f"circle point must be (s,) with 0 <= s < {self.length}")

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        gap = abs(p.coords[0] - q.coords[0])
        return min(gap, self.length - gap)

    def random_points(self, count, rng):
        return [PointRef((s,)) for s in rng.uniform(0.0, self.length, count)]


@dataclass(frozen=True)
class Sphere(ModelSpace):
    """Round sphere S^n_k of constant sectional curvature k (radius 1/sqrt(k))."""

    dim: int
    curvature: float = 1.0

    def __post_init__(self):
        _dimension(self.dim)
        _positive("curvature", self.curvature)

    @property
    def radius(self) -> float:
        return 1.0 / math.sqrt(self.curvature)

    def diameter(self):
        return math.pi * self.radius

    def volume(self):
        return unit_sphere_area(self.dim) * self.curvature ** (-self.dim / 2.0)

    def check_point(self, p):
        if len(p.coords) != self.dim + 1:
            raise ValueError(f"sphere point needs {self.dim + 1} coordinates")
        if abs(np.linalg.norm(p.array) - 1.0) > 1e-12:
            raise ValueError("sphere point must be a unit vector")

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        u, v = p.array, q.array
        # half-angle form stays accurate near 0 and pi, unlike arccos
        angle = 2.0 * math.atan2(np.linalg.norm(u - v), np.linalg.norm(u + v))
        return angle * self.radius

    def random_points(self, count, rng):
        x = rng.standard_normal((count, self.dim + 1))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        return [PointRef(row) for row in x]


@dataclass(frozen=True)
class FlatTorus(ModelSpace):
    """Plane modulo the rectangular lattice a Z x b Z."""

    side_a: float = 1.0
    side_b: float = 1.0
    dim: ClassVar[int] = 2

    def __post_init__(self):
        _positive("side_a", self.side_a)
        _positive("side_b", self.side_b)

    def diameter(self):
        return math.hypot(self.side_a, self.side_b) / 2.0

    def volume(self):
        return self.side_a * self.side_b

    def check_point(self, p):
        if len(p.coords) != 2:
            raise ValueError("torus point must be (x, y)")
        x, y = p.coords
        if not (0.0 <= x < self.side_a and 0.0 <= y < self.side_b):
            raise ValueError("torus point outside the fundamental domain")

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        delta = p.array - q.array
        best = math.inf
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                best = min(best, math.hypot(delta[0] + i * self.side_a, delta[1] + j * self.side_b))
        return best

    def random_points(self, count, rng):
        xs = rng.uniform(0.0, self.side_a, count)
        ys = rng.uniform(0.0, self.side_b, count)
        return [PointRef((x, y)) for x, y in zip(xs, ys)]


@dataclass(frozen=True)
class EuclideanBall(ModelSpace):
    dim: int
    radius: float

    def __post_init__(self):
        _dimension(self.dim)
        _positive("radius", self.radius)

    def diameter(self):
        return 2.0 * self.radius

    def volume(self):
        return _unit_ball_volume(self.dim) * self.radius ** self.dim

    def check_point(self, p):
        if len(p.coords) != self.dim:
            raise ValueError(f"ball point needs {self.dim} coordinates")
        if np.linalg.norm(p.array) > self.radius * (1 + 1e-12):
            raise ValueError("point outside the ball")

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        return float(np.linalg.norm(p.array - q.array))

    def random_points(self, count, rng):
        return [PointRef(v) for v in _uniform_in_ball(self.dim, self.radius, count, rng)]


@dataclass(frozen=True)
class HyperbolicBall(ModelSpace):
    """Geodesic ball of radius d in hyperbolic space of curvature -1."""

    dim: int
    radius: float
    curvature: ClassVar[float] = -1.0

    def __post_init__(self):
        _dimension(self.dim)
        _positive("radius", self.radius)

    def diameter(self):
        return 2.0 * self.radius

    def volume(self):
        return ball_volume(self, self.radius)

    def check_point(self, p):
        if len(p.coords) != self.dim:
            raise ValueError(f"ball point needs {self.dim} coordinates")
        if np.linalg.norm(p.array) > self.radius * (1 + 1e-12):
            raise ValueError("point outside the ball")

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        u, v = p.array, q.array
        r1, r2 = np.linalg.norm(u), np.linalg.norm(v)
        if r1 == 0.0 or r2 == 0.0:
            return float(r1 + r2)
        cos_t = float(np.clip(u @ v / (r1 * r2), -1.0, 1.0))
        # hyperbolic law of cosines, rewritten to avoid cancellation for close points
        arg = math.cosh(r1 - r2) + math.sinh(r1) * math.sinh(r2) * (1.0 - cos_t)
        return math.acosh(max(arg, 1.0))

    def random_points(self, count, rng):
        # directions uniform, radii drawn from the sinh^(n-1) density by inversion on a grid
        radii = np.linspace(0.0, self.radius, 4097)
        dens = np.sinh(radii) ** (self.dim - 1)
        cdf = integrate.cumulative_trapezoid(dens, radii, initial=0.0)
        cdf /= cdf[-1]
        r = np.interp(rng.uniform(size=count), cdf, radii)
        dirs = rng.standard_normal((count, self.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return [PointRef(v) for v in dirs * r[:, None]]


def neck_circumference(eps: float) -> float:
    """C = 2 pi sqrt(2 eps - eps^2)."""
    return 2.0 * math.pi * math.sqrt(2.0 * eps - eps * eps)


def eps_from_circumference(C: float) -> float:
    """Smaller root of C = 2 pi sqrt(2 eps - eps^2)."""
    if not 0.0 < C < 2.0 * math.pi:
        raise ValueError(f"neck circumference must lie in (0, 2 pi), got {C!r}")
    a = C / (2.0 * math.pi)
    # eps = 1 - sqrt(1 - a^2), written stably for tiny a
    return a * a / (1.0 + math.sqrt(1.0 - a * a))


@dataclass(frozen=True)
class Dumbbell(ModelSpace):
    """Unit sphere with a small polar cap removed, a thin tube of length L, and a flat lid.

    Regions and point coordinates:

    * ``"sphere"``: ``(theta, phi)``, polar angle from the north pole
      ``0 <= theta <= pi - theta0`` where ``cos(theta0) = 1 - eps``
    * ``"cylinder"``: ``(t, phi)``, ``0 <= t <= L`` measured down from the neck
    * ``"disk"``: ``(rho, phi)``, ``0 <= rho <= a`` from the lid center

    The distance collapses the tube to its axis and attaches it at the south
    pole, so it is a genuine (pseudo)metric that differs from the intrinsic one
    by O(sqrt(eps)).  Every value derived from it is flagged asymptotic.
    """

    eps: float
    L: float
    dim: ClassVar[int] = 2
    asymptotic: ClassVar[bool] = True

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps!r}")
        _positive("L", self.L)

    @classmethod
    def from_circumference(cls, C: float, L: float) -> "Dumbbell":
        return cls(eps_from_circumference(C), L)

    @property
    def neck_radius(self) -> float:
        return math.sqrt(2.0 * self.eps - self.eps ** 2)

    @property
    def C(self) -> float:
        return neck_circumference(self.eps)

    @property
    def cut_angle(self) -> float:
        """theta0: angular radius of the removed cap, seen from the south pole."""
        return math.acos(1.0 - self.eps)

    @property
    def p(self) -> PointRef:
        return PointRef((0.0, 0.0), "sphere")

    @property
    def q(self) -> PointRef:
        return PointRef((0.0, 0.0), "disk")

    def diameter(self):
        return self.L + math.pi

    def volume(self):
        return SPHERE_AREA + self.L * self.C

    def check_point(self, p):
        bounds = {
            "sphere": math.pi - self.cut_angle,
            "cylinder": self.L,
            "disk": self.neck_radius,
        }
        if p.region not in bounds:
            raise ValueError(f"dumbbell point region must be one of {sorted(bounds)}")
        if len(p.coords) != 2 or not 0.0 <= p.coords[0] <= bounds[p.region] * (1 + 1e-12):
            raise ValueError(f"{p.region} coordinate out of range")

    def _tube_position(self, p: PointRef) -> float:
        if p.region == "cylinder":
            return p.coords[0]
        return self.L + self.neck_radius - p.coords[0]

    def _sphere_vector(self, p: PointRef) -> np.ndarray:
        theta, phi = p.coords
        return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        if p.region == "sphere" and q.region == "sphere":
            u, v = self._sphere_vector(p), self._sphere_vector(q)
            return math.atan2(np.linalg.norm(np.cross(u, v)), float(u @ v))
        if p.region == "sphere" or q.region == "sphere":
            s, t = (p, q) if p.region == "sphere" else (q, p)
            return (math.pi - s.coords[0]) + self._tube_position(t)
        return abs(self._tube_position(p) - self._tube_position(q))

    def random_points(self, count, rng):
        # area-weighted region choice, then uniform within the region
        areas = np.array([
            2 * math.pi * (1.0 + math.cos(self.cut_angle)),
            self.L * self.C,
            math.pi * self.neck_radius ** 2,
        ])
        regions = rng.choice(3, size=count, p=areas / areas.sum())
        out = []
        for k in regions:
            phi = rng.uniform(0.0, 2 * math.pi)
            if k == 0:
                z = rng.uniform(-1.0 + self.eps, 1.0)
                out.append(PointRef((math.acos(z), phi), "sphere"))
            elif k == 1:
                out.append(PointRef((rng.uniform(0.0, self.L), phi), "cylinder"))
            else:
                out.append(PointRef((self.neck_radius * math.sqrt(rng.uniform()), phi), "disk"))
        return out


def _uniform_in_ball(n, radius, count, rng):
    dirs = rng.standard_normal((count, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    r = radius * rng.uniform(size=count) ** (1.0 / n)
    return dirs * r[:, None]


def diameter(space: ModelSpace) -> float:
    return space.diameter()


def volume(space: ModelSpace) -> float:
    return space.volume()


def distance(space: ModelSpace, p: PointRef, q: PointRef) -> float:
    return space.distance(p, q)


def _torus_axis_pieces(origin: float, side: float) -> list[tuple[float, float]]:
    # wrap distance |x - origin| mod side is smooth on each piece
    cuts = sorted({0.0, side, origin, (origin + side / 2.0) % side})
    return [(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]


def _torus_quadrature(torus: FlatTorus, p: PointRef) -> float:
    a, b = torus.side_a, torus.side_b
    px, py = p.coords

    def wrap(u, side, origin):
        g = abs(u - origin) % side
        return min(g, side - g)

    def integrand(y, x):
        return math.hypot(wrap(x, a, px), wrap(y, b, py))

    total = 0.0
    for x0, x1 in _torus_axis_pieces(px, a):
        for y0, y1 in _torus_axis_pieces(py, b):
            val, _ = integrate.dblquad(integrand, x0, x1, y0, y1, epsabs=0.0, epsrel=QUAD_EPSREL)
            total += val
    return total


def mean_distance_exact(space: ModelSpace, p: PointRef | None = None) -> float:
    """Exact f(p) = integral of d(p, x) over the space, for homogeneous spaces.

    The square torus uses its closed form; other rectangles are integrated
    numerically around ``p`` (relative tolerance well under 1e-8).
    """
    if isinstance(space, Circle):
        return space.length ** 2 / 4.0
    if isinstance(space, Sphere):
        return 0.5 * space.diameter() * space.volume()
    if isinstance(space, FlatTorus):
        if space.side_a == space.side_b == 1.0:
            return (math.sqrt(2.0) + math.log(1.0 + math.sqrt(2.0))) / 6.0
        if p is None:
            p = PointRef((0.0, 0.0))
        space.check_point(p)
        return _torus_quadrature(space, p)
    raise UnsupportedVariant(f"no exact mean distance for {type(space).__name__}")


def ball_volume(space: EuclideanBall | HyperbolicBall, r: float) -> float:
    """Volume of the metric ball of radius r about the center."""
    if isinstance(space, EuclideanBall):
        return _unit_ball_volume(space.dim) * r ** space.dim
    if isinstance(space, HyperbolicBall):
        n = space.dim
        if n == 1:
            return 2.0 * r
        shell = unit_sphere_area(n - 1)
        val, _ = integrate.quad(lambda t: math.sinh(t) ** (n - 1), 0.0, r, epsabs=0.0, epsrel=QUAD_EPSREL)
        return shell * val
    raise UnsupportedVariant(f"ball volume undefined for {type(space).__name__}")


def ball_mean_distance(space: EuclideanBall | HyperbolicBall, r: float | None = None) -> float:
    """f(o, r) = integral of d(o, x) over the ball of radius r (default: the whole ball)."""
    if r is None:
        r = space.radius
    if isinstance(space, EuclideanBall):
        n = space.dim
        return n / (n + 1.0) * r * _unit_ball_volume(n) * r ** n
    if isinstance(space, HyperbolicBall):
        n = space.dim
        if n == 1:
            return r * r
        shell = unit_sphere_area(n - 1)
        val, _ = integrate.quad(lambda t: t * math.sinh(t) ** (n - 1), 0.0, r, epsabs=0.0, epsrel=QUAD_EPSREL)
        return shell * val
    raise UnsupportedVariant(f"ball mean distance undefined for {type(space).__name__}")


@dataclass(frozen=True)
class DumbbellEstimate:
    f_p: float
    f_q: float
    dV: float
    C: float
    L: float
    asymptotic: bool = field(default=True)

    @property
    def ratio_p(self) -> float:
        return self.f_p / self.dV

    @property
    def ratio_q(self) -> float:
        return self.f_q / self.dV


MAX_ASYMPTOTIC_C = 0.1


def dumbbell_f_q(space: Dumbbell) -> float:
    """f(q) from the lid center, integrated region by region."""
    L, a, C = space.L, space.neck_radius, space.C
    top = math.pi - space.cut_angle

    sphere, _ = integrate.quad(
        lambda th: (math.pi - th + L + a) * 2.0 * math.pi * math.sin(th), 0.0, top,
        epsabs=0.0, epsrel=1e-12,
    )
    tube, _ = integrate.quad(lambda t: (L - t + a) * C, 0.0, L, epsabs=0.0, epsrel=1e-12)
    lid, _ = integrate.quad(lambda rho: rho * 2.0 * math.pi * rho, 0.0, a, epsabs=0.0, epsrel=1e-12)
    return sphere + tube + lid


def dumbbell_asymptotics(eps: float, L: float) -> DumbbellEstimate:
    """Thin-neck estimates of f(p), f(q) and d(M) V(M) for the dumbbell.

    ``f_p`` and ``dV`` are the closed thin-neck formulas; ``f_q`` comes from
    quadrature of the collapsed-tube distance to the lid center.
    """
    space = Dumbbell(eps, L)
    C = space.C
    if C >= MAX_ASYMPTOTIC_C:
        raise PreconditionError(
            f"neck circumference C={C:.4g} is not small (need C < {MAX_ASYMPTOTIC_C}); "
            "the thin-neck formulas do not apply"
        )
    f_p = 0.5 * math.pi * SPHERE_AREA + C * (math.pi * L + L * L / 2.0)
    dV = (L + math.pi) * (SPHERE_AREA + L * C)
    return DumbbellEstimate(f_p=f_p, f_q=dumbbell_f_q(space), dV=dV, C=C, L=L)
