"""Built-in desk-scale test scenes on unit bounds.

They are parametric stand-ins for the cluttered, maze, barrier and
narrow-passage scenes used to compare the planners, not reproductions of any
particular layout. ``scale`` sets the characteristic opening width (door,
hole or slot) as a fraction of the bounds extent; ``empty2d`` ignores it.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .environment import Environment
from .errors import UsageError
from .geometry import Ball, Box, unit_ball_volume

WALL = 0.02
# Goal balls in the obstacle scenes cover this fraction of the bounds volume,
# small enough that hitting the goal by sampling is itself part of the task.
GOAL_FRACTION = 1e-4

# Reference costs: best cost of one long IB-RRT* run per scene (10x the
# default trial budget, seed 0), regenerated with ``ibrrt reference``.
# empty2d uses the exact straight-line optimum.
REFERENCE_COSTS: dict[str, float] = {
    "empty2d": 0.8 * 2**0.5,
    "cluttered2d_a": 1.2926107642875082,
    "cluttered2d_b": 1.0419152656340263,
    "maze2d": 4.164710616889956,
    "barriers3d": 1.6481717361168577,
    "narrow3d": 1.33484081786493,
    "maze3d": 3.0454912628644517,
}

TRIAL_BUDGET_2D = 20_000
TRIAL_BUDGET_3D = 40_000
TRIAL_BUDGET = {
    "empty2d": TRIAL_BUDGET_2D,
    "cluttered2d_a": TRIAL_BUDGET_2D,
    "cluttered2d_b": TRIAL_BUDGET_2D,
    "maze2d": TRIAL_BUDGET_2D,
    "barriers3d": TRIAL_BUDGET_3D,
    "narrow3d": TRIAL_BUDGET_3D,
    "maze3d": TRIAL_BUDGET_3D,
}

DEFAULT_SCALE = {
    "empty2d": 1.0,
    "cluttered2d_a": 0.06,
    "cluttered2d_b": 0.08,
    "maze2d": 0.1,
    "barriers3d": 0.15,
    "narrow3d": 0.05,
    "maze3d": 0.15,
}


def _unit(n: int) -> Box:
    return Box(np.zeros(n), np.ones(n))


def goal_radius(n: int) -> float:
    """Radius of an ``n``-ball holding ``GOAL_FRACTION`` of the unit cube."""
    return (GOAL_FRACTION / unit_ball_volume(n)) ** (1.0 / n)


def _slab(n: int, axis: int, pos: float, lo=None, hi=None) -> Box:
    """Wall of thickness WALL centred at ``pos`` along ``axis``, spanning ``[lo, hi]`` elsewhere."""
    lo = np.zeros(n) if lo is None else np.array(lo, dtype=float)
    hi = np.ones(n) if hi is None else np.array(hi, dtype=float)
    lo[axis] = pos - WALL / 2
    hi[axis] = pos + WALL / 2
    return Box(lo, hi)


def _wall_with_hole(n: int, axis: int, pos: float, center, width: float) -> list[Box]:
    """Full-extent wall with one square (2D: slot) opening of side ``width``."""
    others = [k for k in range(n) if k != axis]
    boxes = []
    for j, k in enumerate(others):
        c = center[j]
        lo_k, hi_k = c - width / 2, c + width / 2
        # below / above the hole on axis k, full extent on the axes not yet cut
        lo = np.zeros(n)
        hi = np.ones(n)
        for jj, kk in enumerate(others[:j]):
            lo[kk] = center[jj] - width / 2
            hi[kk] = center[jj] + width / 2
        below_hi = hi.copy()
        below_hi[k] = lo_k
        above_lo = lo.copy()
        above_lo[k] = hi_k
        if lo_k > 0.0:
            boxes.append(_slab(n, axis, pos, lo, below_hi))
        if hi_k < 1.0:
            boxes.append(_slab(n, axis, pos, above_lo, hi))
    return boxes


def empty2d(scale: float) -> Environment:
    return Environment(_unit(2), np.array([0.1, 0.1]), Ball([0.9, 0.9], 0.05), name="empty2d")


def cluttered2d_a(scale: float) -> Environment:
    """Jittered lattice of square blocks between opposite corners."""
    rng = np.random.Generator(np.random.PCG64(2013))
    cells = 7
    pitch = 1.0 / cells
    side = pitch - scale
    obs = []
    for i in range(cells):
        for j in range(cells):
            if (i, j) in ((0, 0), (cells - 1, cells - 1)):
                continue
            jitter = rng.uniform(-0.25, 0.25, size=2) * scale
            c = np.array([(i + 0.5) * pitch, (j + 0.5) * pitch]) + jitter
            obs.append(Box(c - side / 2, c + side / 2))
    return Environment(
        _unit(2), np.array([0.05, 0.05]), Ball([0.95, 0.95], goal_radius(2)), tuple(obs), name="cluttered2d_a"
    )


def cluttered2d_b(scale: float) -> Environment:
    """Start and goal close together, each inside a pocket facing away from the other."""
    g = scale
    obs = [
        # central divider
        Box([0.48, 0.2], [0.52, 0.8]),
        # start pocket, open to the left
        Box([0.2, 0.62], [0.42, 0.62 + WALL]),
        Box([0.2, 0.38 - WALL], [0.42, 0.38]),
        Box([0.42, 0.38 - WALL], [0.42 + WALL, 0.62 + WALL]),
        # goal pocket, open to the right
        Box([0.58, 0.62], [0.8, 0.62 + WALL]),
        Box([0.58, 0.38 - WALL], [0.8, 0.38]),
        Box([0.58 - WALL, 0.38 - WALL], [0.58, 0.62 + WALL]),
        # outer ring with staggered doors of width g
        Box([0.08, 0.1], [0.08 + WALL, 0.5 - g / 2]),
        Box([0.08, 0.5 + g / 2], [0.08 + WALL, 0.9]),
        Box([0.92 - WALL, 0.1], [0.92, 0.5 - g / 2]),
        Box([0.92 - WALL, 0.5 + g / 2], [0.92, 0.9]),
        Box([0.1, 0.9 - WALL], [0.5 - g / 2, 0.9]),
        Box([0.5 + g / 2, 0.9 - WALL], [0.9, 0.9]),
        Box([0.1, 0.1], [0.9, 0.1 + WALL]),
    ]
    return Environment(
        _unit(2), np.array([0.3, 0.5]), Ball([0.7, 0.5], goal_radius(2)), tuple(obs), name="cluttered2d_b"
    )


def maze2d(scale: float) -> Environment:
    """Serpentine corridors: four walls with doors at alternating ends."""
    g = scale
    obs = []
    for k, y in enumerate((0.2, 0.4, 0.6, 0.8)):
        if k % 2 == 0:
            obs.append(_slab(2, 1, y, [0.0, 0.0], [1.0 - g, 1.0]))
        else:
            obs.append(_slab(2, 1, y, [g, 0.0], [1.0, 1.0]))
    return Environment(
        _unit(2), np.array([0.1, 0.1]), Ball([0.9, 0.9], goal_radius(2)), tuple(obs), name="maze2d"
    )


def barriers3d(scale: float) -> Environment:
    """Three full barriers across the start-goal axis, holes at staggered corners."""
    obs = []
    holes = [(0.25, 0.25), (0.75, 0.75), (0.25, 0.75)]
    for x, h in zip((0.25, 0.5, 0.75), holes):
        obs.extend(_wall_with_hole(3, 0, x, h, scale))
    return Environment(
        _unit(3), np.array([0.1, 0.5, 0.5]), Ball([0.9, 0.5, 0.5], goal_radius(3)), tuple(obs), name="barriers3d"
    )


def narrow3d(scale: float) -> Environment:
    """Two barriers with one slot each of side ``scale`` (a fraction of the unit extent)."""
    obs = []
    obs.extend(_wall_with_hole(3, 0, 1 / 3, (0.3, 0.7), scale))
    obs.extend(_wall_with_hole(3, 0, 2 / 3, (0.7, 0.3), scale))
    return Environment(
        _unit(3), np.array([0.1, 0.5, 0.5]), Ball([0.9, 0.5, 0.5], goal_radius(3)), tuple(obs), name="narrow3d"
    )


def maze3d(scale: float) -> Environment:
    """Three storeys joined by holes at opposite corners, each storey split by a partial wall."""
    obs = []
    obs.extend(_wall_with_hole(3, 2, 1 / 3, (0.85, 0.85), scale))
    obs.extend(_wall_with_hole(3, 2, 2 / 3, (0.15, 0.15), scale))
    # partial dividers inside each storey force detours around their ends
    obs.append(Box([0.49, 0.0, 0.0], [0.51, 0.7, 1 / 3]))
    obs.append(Box([0.49, 0.3, 1 / 3], [0.51, 1.0, 2 / 3]))
    obs.append(Box([0.49, 0.0, 2 / 3], [0.51, 0.7, 1.0]))
    return Environment(
        _unit(3), np.array([0.1, 0.1, 0.15]), Ball([0.9, 0.9, 0.85], goal_radius(3)), tuple(obs), name="maze3d"
    )


_BUILDERS: dict[str, Callable[[float], Environment]] = {
    "empty2d": empty2d,
    "cluttered2d_a": cluttered2d_a,
    "cluttered2d_b": cluttered2d_b,
    "maze2d": maze2d,
    "barriers3d": barriers3d,
    "narrow3d": narrow3d,
    "maze3d": maze3d,
}

SCENARIO_NAMES = tuple(_BUILDERS)


def builtin_scenario(name: str, scale: float | None = None) -> Environment:
    """Deterministic built-in environment ``name``."""
    if name not in _BUILDERS:
        raise UsageError(f"unknown scenario {name!r}; expected one of {SCENARIO_NAMES}")
    if scale is None:
        scale = DEFAULT_SCALE[name]
    if not scale > 0.0:
        raise UsageError("scale must be positive")
    return _BUILDERS[name](float(scale))


def reference_cost(name: str) -> float | None:
    return REFERENCE_COSTS.get(name)


def trial_budget(name: str, n: int = 2) -> int:
    """Default per-trial iteration budget; custom environments get the budget of their dimension."""
    return TRIAL_BUDGET.get(name, TRIAL_BUDGET_2D if n <= 2 else TRIAL_BUDGET_3D)
