"""RRT*, B-RRT*, IB-RRT* and the BiRRT baseline behind one step/run interface."""

from __future__ import annotations

import time
from typing import Callable

from ..environment import Environment, seeded_rng
from ..errors import UsageError
from .b_rrt_star import b_rrt_star_step, brrt_connect
from .base import (
    PLANNER_KINDS,
    FirstSolution,
    IterationOutcome,
    PlannerConfig,
    PlannerState,
    default_eta,
    default_gamma,
    extend,
    init_state,
    intensity_at,
)
from .birrt import birrt_step
from .ib_rrt_star import BestTreeParent, connect_trees, get_best_tree_parent, ib_rrt_star_step
from .rrt_star import rrt_star_step

STEPS = {
    "rrt-star": rrt_star_step,
    "b-rrt-star": b_rrt_star_step,
    "ib-rrt-star": ib_rrt_star_step,
    "birrt": birrt_step,
}

Callback = Callable[[PlannerState, IterationOutcome], bool]


def run(
    kind: str,
    config: PlannerConfig,
    env: Environment,
    callback: Callback | None = None,
) -> PlannerState:
    """Iterate until ``max_iterations``, the node cap, or ``callback`` returns True.

    Hitting the node cap sets ``state.capped``. Only the planner loop is timed.
    """
    if kind not in STEPS:
        raise UsageError(f"unknown planner kind {kind!r}; expected one of {PLANNER_KINDS}")
    state = init_state(kind, env, config)
    rng = seeded_rng(config.seed)
    step = STEPS[kind]
    state.t_start = time.perf_counter()
    while state.iteration < config.max_iterations:
        if state.node_count >= config.max_nodes:
            state.capped = True
            break
        outcome = step(state, env, rng)
        if callback is not None and callback(state, outcome):
            break
    state.elapsed = state.clock()
    return state


__all__ = [
    "PLANNER_KINDS",
    "STEPS",
    "BestTreeParent",
    "FirstSolution",
    "IterationOutcome",
    "PlannerConfig",
    "PlannerState",
    "b_rrt_star_step",
    "birrt_step",
    "brrt_connect",
    "connect_trees",
    "default_eta",
    "default_gamma",
    "extend",
    "get_best_tree_parent",
    "ib_rrt_star_step",
    "init_state",
    "intensity_at",
    "rrt_star_step",
    "run",
]
