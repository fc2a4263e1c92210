"""Euclidean primitives in R^n.

Configurations are plain 1-D float arrays. ``distance`` and ``distances``
accumulate squared components left to right in the same order, so a scalar
distance and the matching entry of a vectorised distance are bit-identical.
The nearest-neighbour index relies on that for its exactness contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UsageError

Config = np.ndarray


def as_config(coords: Sequence[float] | np.ndarray) -> Config:
    """Return ``coords`` as a finite 1-D float64 array."""
    x = np.asarray(coords, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise UsageError(f"configuration must be a non-empty 1-D sequence, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise UsageError("configuration coordinates must be finite")
    return x


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box ``[lo, hi]``."""

    lo: Config
    hi: Config

    def __post_init__(self):
        lo = as_config(self.lo)
        hi = as_config(self.hi)
        if lo.shape != hi.shape:
            raise UsageError("box corners have different dimensions")
        if np.any(lo > hi):
            raise UsageError("box requires lo <= hi on every axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def extent(self) -> Config:
        return self.hi - self.lo

    def contains(self, x: Config) -> bool:
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def volume(self) -> float:
        return float(np.prod(self.extent))


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball."""

    center: Config
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_config(self.center))
        r = float(self.radius)
        if not (r > 0.0 and math.isfinite(r)):
            raise UsageError(f"ball radius must be positive and finite, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.size

    def contains(self, x: Config) -> bool:
        return distance(self.center, x) <= self.radius


def _check_dims(a, b) -> None:
    if len(a) != len(b):
        raise UsageError(f"dimension mismatch: {len(a)} vs {len(b)}")


def distance(a: Config, b: Config) -> float:
    """Euclidean distance between two configurations."""
    _check_dims(a, b)
    diff = [float(y) - float(x) for x, y in zip(a, b)]
    acc = 0.0
    for d in diff:
        acc += d * d
    if acc == 0.0 or acc == math.inf:
        # squares under- or overflowed: redo the sum scaled by the largest component
        m = max(abs(d) for d in diff)
        if m == 0.0 or m == math.inf:
            return m
        acc = 0.0
        for d in diff:
            acc += (d / m) * (d / m)
        return m * math.sqrt(acc)
    return math.sqrt(acc)


def distances(points: np.ndarray, q: Config) -> np.ndarray:
    """Distances from every row of ``points`` to ``q``."""
    diff = points - q
    acc = diff[:, 0] * diff[:, 0]
    for k in range(1, diff.shape[1]):
        acc += diff[:, k] * diff[:, k]
    out = np.sqrt(acc)
    bad = np.flatnonzero((acc == 0.0) | (acc == np.inf))
    for j in bad:
        m = float(np.abs(diff[j]).max())
        if m == 0.0 or m == math.inf:
            out[j] = m
            continue
        s = 0.0
        for d in diff[j]:
            s += (float(d) / m) * (float(d) / m)
        out[j] = m * math.sqrt(s)
    return out


def steer_point(a: Config, b: Config, s: float) -> Config:
    """Point ``(1 - s) a + s b`` on the segment from ``a`` to ``b``."""
    _check_dims(a, b)
    if not 0.0 <= s <= 1.0:
        raise UsageError(f"steering parameter must lie in [0, 1], got {s!r}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if s == 0.0:
        return a.copy()
    if s == 1.0:
        return b.copy()
    return (1.0 - s) * a + s * b


def near_radius(i: int, n: int, gamma: float, cap: float | None = None) -> float:
    """Shrinking-ball radius ``gamma * (ln i / i) ** (1/n)``, optionally capped.

    ``i`` is clamped to at least 2 so the logarithm is positive.
    """
    if gamma <= 0.0:
        raise UsageError("gamma must be positive")
    if n < 1:
        raise UsageError("dimension must be >= 1")
    i = max(int(i), 2)
    r = gamma * (math.log(i) / i) ** (1.0 / n)
    if cap is not None:
        r = min(r, cap)
    return r


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def ball_measure(r: float, n: int) -> float:
    """Lebesgue measure of an n-ball of radius ``r``."""
    if r <= 0.0 or n < 1:
        raise UsageError("ball_measure needs r > 0 and n >= 1")
    return unit_ball_volume(n) * r**n


def segment_hits_boxes(a: Config, b: Config, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Slab test of the closed segment ``[a, b]`` against many closed boxes.

    ``lo`` and ``hi`` have shape ``(m, n)``; returns a boolean array of length m.
    Touching a face, edge or corner counts as a hit.
    """
    d = b - a
    t_enter = np.zeros(lo.shape[0])
    t_exit = np.ones(lo.shape[0])
    for k in range(d.size):
        dk = d[k]
        if dk == 0.0:
            outside = (a[k] < lo[:, k]) | (a[k] > hi[:, k])
            t_enter = np.where(outside, np.inf, t_enter)
            continue
        t1 = (lo[:, k] - a[k]) / dk
        t2 = (hi[:, k] - a[k]) / dk
        if dk > 0.0:
            np.maximum(t_enter, t1, out=t_enter)
            np.minimum(t_exit, t2, out=t_exit)
        else:
            np.maximum(t_enter, t2, out=t_enter)
            np.minimum(t_exit, t1, out=t_exit)
    return t_enter <= t_exit


def segment_hits_box(a: Config, b: Config, box: Box) -> bool:
    """True iff the closed segment ``[a, b]`` intersects the closed ``box``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_dims(a, b)
    _check_dims(a, box.lo)
    return bool(segment_hits_boxes(a, b, box.lo[None, :], box.hi[None, :])[0])


def segment_sphere_distances(a: Config, b: Config, centers: np.ndarray) -> np.ndarray:
    """Distance from each sphere centre to the closed segment ``[a, b]``."""
    d = b - a
    dd = float(d @ d)
    rel = centers - a
    if dd == 0.0:
        t = np.zeros(centers.shape[0])
    else:
        t = np.clip(rel @ d / dd, 0.0, 1.0)
    closest = a + t[:, None] * d
    return np.sqrt(((centers - closest) ** 2).sum(axis=1))


def segment_hits_ball(a: Config, b: Config, ball: Ball) -> bool:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_dims(a, b)
    return bool(segment_sphere_distances(a, b, ball.center[None, :])[0] <= ball.radius)
