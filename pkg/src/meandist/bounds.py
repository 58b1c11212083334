"""Bound constants, the auxiliary functions they come from, and inequality checks.

Three lower bounds on the mean-distance functional are implemented:

``T1_1``  compact, Ric >= 0:           f(p)   > c_compact(n)    * d(M) * V(M)
``T4_1``  Cartan-Hadamard:             f(p,d) > c_hadamard(n)   * d * V_p(d)
``T4_2``  complete noncompact, Ric >= 0: f(p,d) >= c_noncompact(n) * d * V_p(d)

and one upper bound, ``P2_5``: Ric >= (n-1)k > 0 gives f <= d(S^n_k) V(S^n_k) / 2.

Each constant is the maximum of a one-variable function ``g`` over an interval;
the ``g_*`` functions and their closed-form maximizers are exposed so the
constants can be cross-checked by brute force.

    c_compact(n)    = (1 - 1/(n+1))^n / (2^(n+1) (n+1))
    c_hadamard(n)   = n/(n+1) * (n+1)^(-1/n)
    c_noncompact(n) = 3/(2s + 2n + 1) * (n/(n + 2 + 2s))^n,   s = sqrt(n^2 + n + 1)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discrete import BallVolumeProfile
from .model_spaces import Sphere

THEOREMS = ("T1_1", "P2_5", "T4_1", "T4_2")

HYPOTHESES = {
    "T1_1": "compact, Ric >= 0",
    "P2_5": "Ric >= (n-1)k > 0",
    "T4_1": "Cartan-Hadamard (complete, simply connected, sec <= 0)",
    "T4_2": "complete noncompact, Ric >= 0",
}

NEAR_THRESHOLD = 0.05
EXACT_EQUALITY_RTOL = 1e-9
MESH_EQUALITY_RTOL = 1e-2
MONOTONE_BAND = 0.02


def _check_dim(n):
    if int(n) != n or n < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {n!r}")


def c_compact(n: int) -> float:
    _check_dim(n)
    return (1.0 - 1.0 / (n + 1)) ** n / (2.0 ** (n + 1) * (n + 1))


def c_hadamard(n: int) -> float:
    _check_dim(n)
    return n / (n + 1.0) * (n + 1.0) ** (-1.0 / n)


def c_noncompact(n: int) -> float:
    _check_dim(n)
    s = math.sqrt(n * n + n + 1.0)
    return 3.0 / (2.0 * s + 2.0 * n + 1.0) * (n / (n + 2.0 + 2.0 * s)) ** n


def constant_for(theorem_id: str, n: int) -> float:
    if theorem_id == "T1_1":
        return c_compact(n)
    if theorem_id == "T4_1":
        return c_hadamard(n)
    if theorem_id == "T4_2":
        return c_noncompact(n)
    if theorem_id == "P2_5":
        return 0.5
    raise ValueError(f"unknown theorem id {theorem_id!r}; expected one of {THEOREMS}")


# -- the auxiliary functions -------------------------------------------------

def _in_range(x, lo, hi, name):
    x = np.asarray(x, dtype=float)
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError(f"{name} must lie in [{lo}, {hi}]")
    return x


def g_compact(r, d: float, n: int):
    """(d/2 - r) r^n / d^n on [0, d/2]."""
    r = _in_range(r, 0.0, d / 2.0, "r")
    return (0.5 * d - r) * r ** n / d ** n


def argmax_g_compact(d: float, n: int) -> float:
    return n * d / (2.0 * (n + 1))


def g_hadamard(r, d: float, n: int):
    """r (1 - r^n / d^n) on [0, d]."""
    r = _in_range(r, 0.0, d, "r")
    return r * (1.0 - r ** n / d ** n)


def argmax_g_hadamard(d: float, n: int) -> float:
    return d / (n + 1.0) ** (1.0 / n)


def g_noncompact(t, d: float, n: int):
    """(d - 2t) t^n / (2d - t)^n on [0, d/2]."""
    t = _in_range(t, 0.0, d / 2.0, "t")
    return (d - 2.0 * t) * t ** n / (2.0 * d - t) ** n


def argmax_g_noncompact(d: float, n: int) -> float:
    """Root in [0, d/2] of t^2 - 2d(n+1)t + n d^2 = 0."""
    return (n + 1.0 - math.sqrt(n * n + n + 1.0)) * d


def noncompact_quadratic(t: float, d: float, n: int) -> float:
    return t * t - 2.0 * d * (n + 1) * t + n * d * d


# -- inequality checks -------------------------------------------------------

@dataclass(frozen=True)
class BoundSpec:
    theorem_id: str
    n: int
    constant: float
    hypothesis_note: str
    hypothesis_holds: bool = True

    def __post_init__(self):
        if self.theorem_id not in THEOREMS:
            raise ValueError(f"unknown theorem id {self.theorem_id!r}")
        if not self.constant > 0:
            raise ValueError("constant must be positive")
        if self.theorem_id == "T1_1" and not self.constant < 0.5:
            raise ValueError("a compact lower-bound constant cannot reach 1/2")
        if self.theorem_id == "T4_1" and not self.constant < 1.0:
            raise ValueError("a ball lower-bound constant must stay below 1")

    @classmethod
    def for_theorem(cls, theorem_id: str, n: int, hypothesis_holds: bool = True) -> "BoundSpec":
        return cls(theorem_id, n, constant_for(theorem_id, n), HYPOTHESES[theorem_id], hypothesis_holds)


@dataclass(frozen=True)
class BoundReport:
    spec: BoundSpec
    f_value: float
    diameter: float
    volume: float
    ratio: float
    threshold: float
    satisfied: bool
    asymptotic_inputs: bool = False
    verdict: str = ""
    equality: bool = False

    def as_dict(self) -> dict:
        return {
            "theorem": self.spec.theorem_id,
            "n": self.spec.n,
            "constant": self.spec.constant,
            "hypothesis": self.spec.hypothesis_note,
            "hypothesis_holds": self.spec.hypothesis_holds,
            "f": self.f_value,
            "diameter": self.diameter,
            "volume": self.volume,
            "ratio": self.ratio,
            "threshold": self.threshold,
            "satisfied": self.satisfied,
            "equality": self.equality,
            "asymptotic_inputs": self.asymptotic_inputs,
            "verdict": self.verdict,
        }


def _lower_verdict(spec, satisfied, ratio, threshold, asymptotic):
    if satisfied:
        return "satisfied"
    if not spec.hypothesis_holds:
        return "out of hypothesis"
    if asymptotic and abs(ratio - threshold) <= NEAR_THRESHOLD * threshold:
        return "inconclusive"
    return "violated"


def check_lower_bound(
    spec: BoundSpec,
    f_value: float,
    diameter: float,
    volume: float,
    asymptotic_inputs: bool = False,
    strict: bool | None = None,
) -> BoundReport:
    """Compare ratio = f / (diameter * volume) against the theorem constant.

    ``strict`` defaults to the strict form except for ``T4_2``, whose
    argument only delivers the non-strict inequality.
    """
    for name, value in (("f_value", f_value), ("diameter", diameter), ("volume", volume)):
        if not value > 0 or not math.isfinite(value):
            raise ValueError(f"{name} must be positive and finite, got {value!r}")
    if strict is None:
        strict = spec.theorem_id != "T4_2"
    ratio = f_value / (diameter * volume)
    satisfied = ratio > spec.constant if strict else ratio >= spec.constant
    return BoundReport(
        spec=spec,
        f_value=f_value,
        diameter=diameter,
        volume=volume,
        ratio=ratio,
        threshold=spec.constant,
        satisfied=bool(satisfied),
        asymptotic_inputs=asymptotic_inputs,
        verdict=_lower_verdict(spec, satisfied, ratio, spec.constant, asymptotic_inputs),
    )


def check_upper_bound_sphere(n: int, k: float, f_value: float, mesh_input: bool = False) -> BoundReport:
    """Compare f against d(S^n_k) V(S^n_k) / 2 and flag equality."""
    if not k > 0:
        raise ValueError(f"curvature must be positive, got {k!r}")
    model = Sphere(n, k)
    d, V = model.diameter(), model.volume()
    bound = 0.5 * d * V
    rtol = MESH_EQUALITY_RTOL if mesh_input else EXACT_EQUALITY_RTOL
    equality = abs(f_value - bound) <= rtol * bound
    satisfied = equality or f_value <= bound
    spec = BoundSpec("P2_5", n, 0.5, HYPOTHESES["P2_5"])
    return BoundReport(
        spec=spec,
        f_value=f_value,
        diameter=d,
        volume=V,
        ratio=f_value / (d * V),
        threshold=0.5,
        satisfied=bool(satisfied),
        asymptotic_inputs=mesh_input,
        verdict="equality" if equality else ("satisfied" if satisfied else "violated"),
        equality=bool(equality),
    )


# -- volume comparison -------------------------------------------------------

@dataclass(frozen=True)
class MonotoneVerdict:
    passed: bool
    direction: str
    worst_excess: float
    worst_pair: tuple[float, float] | None


def _step_volume(profile: BallVolumeProfile, r: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(profile.radii, r, side="right")
    vol = np.asarray(profile.volumes, dtype=float)
    return np.where(idx > 0, vol[np.maximum(idx - 1, 0)], 0.0)


def volume_comparison_check(
    profile: BallVolumeProfile,
    n: int,
    direction: str = "lower",
    band: float = MONOTONE_BAND,
    resolution: float = 0.0,
) -> MonotoneVerdict:
    """Check monotonicity of r -> V_p(r) / r^n along a ball-volume profile.

    ``direction="lower"`` requires the ratio to be nonincreasing (Ric >= 0),
    ``"upper"`` nondecreasing (sec <= 0).  A pair ``r < R`` counts as a
    violation only if it exceeds the relative ``band``.

    For mesh profiles pass the mesh spacing as ``resolution``: a vertex
    measure spreads over roughly one edge length, so at radius r the volume is
    bracketed by the step profile at r - resolution and r + resolution, and
    the check uses whichever end of the bracket is least favourable to a
    violation.
    """
    if direction not in ("lower", "upper"):
        raise ValueError("direction must be 'lower' or 'upper'")
    _check_dim(n)
    radii = np.asarray(profile.radii, dtype=float)
    radii = radii[radii > 0]
    if radii.size < 2:
        raise ValueError("profile needs at least two positive radii")
    scale = radii ** n
    hi = _step_volume(profile, radii + resolution) / scale
    lo = _step_volume(profile, radii - resolution) / scale if resolution > 0 else hi

    if direction == "lower":
        # for i < j need lo[j] <= hi[i] (1 + band)
        prev = np.minimum.accumulate(hi)
        excess = lo[1:] / prev[:-1] - 1.0
        arg_prev = _running_argmin(hi)
    else:
        # for i < j need hi[j] (1 + band) >= lo[i]
        prev = np.maximum.accumulate(lo)
        excess = prev[:-1] / hi[1:] - 1.0
        arg_prev = _running_argmin(-lo)
    j = int(np.argmax(excess))
    worst = float(excess[j])
    pair = (float(radii[arg_prev[j]]), float(radii[j + 1]))
    return MonotoneVerdict(passed=worst <= band, direction=direction, worst_excess=worst, worst_pair=pair)


def _running_argmin(x: np.ndarray) -> np.ndarray:
    out = np.empty(x.size, dtype=np.int64)
    best = 0
    for i in range(x.size):
        if x[i] < x[best]:
            best = i
        out[i] = best
    return out


def model_profile(space, radii) -> BallVolumeProfile:
    """Ball-volume profile of a Euclidean or hyperbolic model ball at given radii."""
    from .model_spaces import ball_volume

    radii = np.asarray(radii, dtype=float)
    return BallVolumeProfile(0, radii, np.array([ball_volume(space, r) for r in radii]))


# -- growth of f(p, r) / r ---------------------------------------------------

@dataclass(frozen=True)
class GrowthVerdict:
    passed: bool
    values: tuple[float, ...]
    growth_factors: tuple[float, ...]


def growth_check(radii, f_values, target: float | None = None) -> GrowthVerdict:
    """f(p, r)/r must increase strictly along increasing radii (and pass ``target`` if given)."""
    radii = np.asarray(radii, dtype=float)
    f_values = np.asarray(f_values, dtype=float)
    if radii.size < 3:
        raise ValueError("growth check needs at least three radii")
    if radii.shape != f_values.shape or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing, one f value per radius")
    vals = f_values / radii
    factors = vals[1:] / vals[:-1]
    ok = bool(np.all(np.diff(vals) > 0))
    if target is not None:
        ok = ok and bool(vals[-1] > target)
    return GrowthVerdict(ok, tuple(vals.tolist()), tuple(factors.tolist()))
