"""Configuration space: bounds, obstacles, start and goal, plus the JSON file format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import (
    DegenerateEnvironmentError,
    EnvironmentParseError,
    EnvironmentValidationError,
    UsageError,
)
from . import _kernels as K
from .geometry import Ball, Box, Config, as_config, distance

Obstacle = Box | Ball

RNG_NAME = "numpy.random.PCG64"
DEFAULT_REJECTION_BUDGET = 10**6
_CC_STEP_FRACTION = 1.0 / 200.0


def seeded_rng(seed: int) -> np.random.Generator:
    """Platform-independent generator: PCG64 seeded with a 64-bit unsigned integer."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise UsageError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def obstacle_kind(ob: Obstacle) -> str:
    return "aabb" if isinstance(ob, Box) else "sphere"


@dataclass(frozen=True, eq=False)
class Environment:
    """Immutable planning problem.

    ``goal.center`` doubles as the root of the goal-side tree for the
    bidirectional planners. ``cc_step`` defaults to 1/200 of the bounds
    diagonal; with only box and sphere obstacles the exact segment tests make
    it irrelevant to ``obstacle_free_path``, and it only drives
    :func:`discretized_path_free`.
    """

    bounds: Box
    start: Config
    goal: Ball
    obstacles: tuple[Obstacle, ...] = ()
    cc_step: float | None = None
    name: str = "custom"

    _box_lo: np.ndarray = field(init=False, repr=False)
    _box_hi: np.ndarray = field(init=False, repr=False)
    _sph_c: np.ndarray = field(init=False, repr=False)
    _sph_r: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.bounds.dim
        if n < 2:
            raise EnvironmentValidationError("dim", f"dimension must be >= 2, got {n}")
        if not np.all(self.bounds.extent > 0.0):
            raise EnvironmentValidationError("bounds", "every axis needs max > min")
        start = as_config(self.start)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if start.size != n:
            raise EnvironmentValidationError("start", f"expected {n} coordinates, got {start.size}")
        if self.goal.dim != n:
            raise EnvironmentValidationError("goal", f"expected {n} coordinates, got {self.goal.dim}")
        for k, ob in enumerate(self.obstacles):
            if ob.dim != n:
                raise EnvironmentValidationError(
                    f"obstacles[{k}]", f"expected {n} coordinates, got {ob.dim}"
                )
        boxes = [ob for ob in self.obstacles if isinstance(ob, Box)]
        balls = [ob for ob in self.obstacles if isinstance(ob, Ball)]
        object.__setattr__(self, "_box_lo", np.array([b.lo for b in boxes]).reshape(-1, n))
        object.__setattr__(self, "_box_hi", np.array([b.hi for b in boxes]).reshape(-1, n))
        object.__setattr__(self, "_sph_c", np.array([b.center for b in balls]).reshape(-1, n))
        object.__setattr__(self, "_sph_r", np.array([b.radius for b in balls], dtype=np.float64))

        if self.cc_step is None:
            object.__setattr__(self, "cc_step", self.diagonal * _CC_STEP_FRACTION)
        elif not (self.cc_step > 0.0 and math.isfinite(self.cc_step)):
            raise EnvironmentValidationError("cc_step", "must be positive")

        if not self.bounds.contains(start):
            raise EnvironmentValidationError("start", "outside bounds")
        if not self.point_free(start):
            raise EnvironmentValidationError("start", "inside an obstacle")
        c, r = self.goal.center, self.goal.radius
        if np.any(c - r < self.bounds.lo) or np.any(c + r > self.bounds.hi):
            raise EnvironmentValidationError("goal", "goal ball is not contained in bounds")
        if not self.point_free(c):
            raise EnvironmentValidationError("goal", "goal center is inside an obstacle")

    @property
    def n(self) -> int:
        return self.bounds.dim

    @property
    def diagonal(self) -> float:
        return float(np.sqrt(np.sum(self.bounds.extent**2)))

    def point_free(self, x: Config) -> bool:
        """True iff ``x`` is inside the bounds and outside every closed obstacle."""
        x = np.asarray(x, dtype=np.float64)
        if not K.point_in_box(x, self.bounds.lo, self.bounds.hi):
            return False
        if K.point_in_any_box(x, self._box_lo, self._box_hi):
            return False
        return not K.point_in_any_sphere(x, self._sph_c, self._sph_r)

    def segment_free(self, a: Config, b: Config) -> bool:
        """True iff the closed segment ``ab`` touches no obstacle (bounds are not checked)."""
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if K.segment_hits_any_box(a, b, self._box_lo, self._box_hi):
            return False
        return not K.segment_hits_any_sphere(a, b, self._sph_c, self._sph_r)

    def scaled(self, k: float) -> "Environment":
        """Copy with every coordinate and length multiplied by ``k``."""
        if k <= 0.0:
            raise UsageError("scale factor must be positive")
        obs = []
        for ob in self.obstacles:
            if isinstance(ob, Box):
                obs.append(Box(ob.lo * k, ob.hi * k))
            else:
                obs.append(Ball(ob.center * k, ob.radius * k))
        return Environment(
            bounds=Box(self.bounds.lo * k, self.bounds.hi * k),
            start=self.start * k,
            goal=Ball(self.goal.center * k, self.goal.radius * k),
            obstacles=tuple(obs),
            cc_step=self.cc_step * k,
            name=self.name,
        )


def sample_free(
    env: Environment, rng: np.random.Generator, max_rejections: int = DEFAULT_REJECTION_BUDGET
) -> Config:
    """Uniform sample over the free space by rejection over the bounds."""
    lo, extent = env.bounds.lo, env.bounds.extent
    for _ in range(max_rejections):
        x = lo + rng.random(env.n) * extent
        if env.point_free(x):
            return x
    raise DegenerateEnvironmentError(
        f"no free sample after {max_rejections} consecutive rejections"
    )


def obstacle_free_path(env: Environment, a: Config, b: Config) -> bool:
    """True iff the straight segment from ``a`` to ``b`` stays in free space."""
    return env.segment_free(a, b)


def discretized_path_free(env: Environment, a: Config, b: Config, step: float | None = None) -> bool:
    """Point-wise collision check at spacing ``step`` (defaults to ``env.cc_step``)."""
    step = env.cc_step if step is None else step
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    count = max(1, int(math.ceil(distance(a, b) / step)))
    for s in np.linspace(0.0, 1.0, count + 1):
        if not env.point_free((1.0 - s) * a + s * b):
            return False
    return True


def in_goal(env: Environment, x: Config) -> bool:
    """Closed-ball goal membership."""
    return distance(x, env.goal.center) <= env.goal.radius


# ---------------------------------------------------------------------------
# file format

_TOP_FIELDS = {"dim", "bounds", "start", "goal", "obstacles", "cc_step", "name"}
_REQUIRED = ("dim", "bounds", "start", "goal")


def _vector(doc: Any, fieldname: str, n: int) -> np.ndarray:
    if not isinstance(doc, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in doc
    ):
        raise EnvironmentValidationError(fieldname, "must be a list of numbers")
    if len(doc) != n:
        raise EnvironmentValidationError(
            fieldname, f"dimension mismatch: expected {n} coordinates, got {len(doc)}"
        )
    x = np.array(doc, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise EnvironmentValidationError(fieldname, "coordinates must be finite")
    return x


def _number(doc: Any, fieldname: str) -> float:
    if not isinstance(doc, (int, float)) or isinstance(doc, bool):
        raise EnvironmentValidationError(fieldname, "must be a number")
    return float(doc)


def _object(doc: Any, fieldname: str, allowed: set[str], required: Sequence[str]) -> dict:
    if not isinstance(doc, dict):
        raise EnvironmentValidationError(fieldname, "must be an object")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise EnvironmentValidationError(fieldname, f"unknown field(s) {unknown}")
    for key in required:
        if key not in doc:
            raise EnvironmentValidationError(f"{fieldname}.{key}" if fieldname else key, "missing")
    return doc


def environment_from_dict(doc: Any) -> Environment:
    doc = _object(doc, "", _TOP_FIELDS, _REQUIRED)
    n = doc["dim"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise EnvironmentValidationError("dim", "must be an integer >= 2")
    b = _object(doc["bounds"], "bounds", {"lo", "hi"}, ("lo", "hi"))
    lo, hi = _vector(b["lo"], "bounds.lo", n), _vector(b["hi"], "bounds.hi", n)
    if np.any(lo >= hi):
        raise EnvironmentValidationError("bounds", "requires lo < hi on every axis")
    start = _vector(doc["start"], "start", n)
    g = _object(doc["goal"], "goal", {"center", "radius"}, ("center", "radius"))
    center = _vector(g["center"], "goal.center", n)
    radius = _number(g["radius"], "goal.radius")
    if not radius > 0.0:
        raise EnvironmentValidationError("goal.radius", "must be positive")

    obstacles: list[Obstacle] = []
    raw_obs = doc.get("obstacles", [])
    if not isinstance(raw_obs, list):
        raise EnvironmentValidationError("obstacles", "must be a list")
    for k, ob in enumerate(raw_obs):
        where = f"obstacles[{k}]"
        if not isinstance(ob, dict) or "type" not in ob:
            raise EnvironmentValidationError(where, "must be an object with a 'type'")
        if ob["type"] == "aabb":
            ob = _object(ob, where, {"type", "min", "max"}, ("min", "max"))
            mn, mx = _vector(ob["min"], f"{where}.min", n), _vector(ob["max"], f"{where}.max", n)
            if np.any(mn > mx):
                raise EnvironmentValidationError(where, "requires min <= max on every axis")
            obstacles.append(Box(mn, mx))
        elif ob["type"] == "sphere":
            ob = _object(ob, where, {"type", "center", "radius"}, ("center", "radius"))
            c = _vector(ob["center"], f"{where}.center", n)
            r = _number(ob["radius"], f"{where}.radius")
            if not r > 0.0:
                raise EnvironmentValidationError(f"{where}.radius", "must be positive")
            obstacles.append(Ball(c, r))
        else:
            raise EnvironmentValidationError(f"{where}.type", f"unknown obstacle type {ob['type']!r}")

    cc_step = None
    if "cc_step" in doc:
        cc_step = _number(doc["cc_step"], "cc_step")
        if not cc_step > 0.0:
            raise EnvironmentValidationError("cc_step", "must be positive")
    name = doc.get("name", "custom")
    if not isinstance(name, str):
        raise EnvironmentValidationError("name", "must be a string")
    return Environment(
        bounds=Box(lo, hi),
        start=start,
        goal=Ball(center, radius),
        obstacles=tuple(obstacles),
        cc_step=cc_step,
        name=name,
    )


def load_environment(document: str) -> Environment:
    """Parse and validate an environment JSON document."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise EnvironmentParseError(f"malformed environment document: {exc}") from exc
    return environment_from_dict(doc)


def environment_to_dict(env: Environment) -> dict:
    obs = []
    for ob in env.obstacles:
        if isinstance(ob, Box):
            obs.append({"type": "aabb", "min": ob.lo.tolist(), "max": ob.hi.tolist()})
        else:
            obs.append({"type": "sphere", "center": ob.center.tolist(), "radius": ob.radius})
    return {
        "name": env.name,
        "dim": env.n,
        "bounds": {"lo": env.bounds.lo.tolist(), "hi": env.bounds.hi.tolist()},
        "start": env.start.tolist(),
        "goal": {"center": env.goal.center.tolist(), "radius": env.goal.radius},
        "obstacles": obs,
        "cc_step": env.cc_step,
    }


def dump_environment(env: Environment) -> str:
    return json.dumps(environment_to_dict(env), indent=2, sort_keys=True)
