"""Feasibility-only bidirectional RRT with greedy connect; the cost-comparison baseline."""

from __future__ import annotations

import numpy as np

from ..environment import Environment, sample_free
from ..geometry import distance
from ..tree import Tree, concat_paths, extract_path, insert_vertex
from .base import IterationOutcome, PlannerState, extend, iteration


def _greedy_connect(state: PlannerState, env: Environment, tb: Tree, target) -> int | None:
    """Grow ``tb`` towards ``target`` in ``eta`` steps; returns the vertex that reached it."""
    c = state.counters
    cur = tb.nearest(target)
    c.nearest += 1
    while state.node_budget > 0:
        x_next = extend(tb.coords[cur], target, state.eta)
        c.steer += 1
        c.collision += 1
        if not env.segment_free(tb.coords[cur], x_next):
            return None
        cur = insert_vertex(tb, x_next, cur)
        if np.array_equal(x_next, target):
            return cur
    return None


@iteration
def birrt_step(state: PlannerState, env: Environment, rng: np.random.Generator) -> IterationOutcome:
    ta = state.trees[state.active]
    tb = state.trees[1 - state.active]
    c = state.counters
    try:
        x_rand = sample_free(env, rng)
        c.sample += 1
        x_near = ta.nearest(x_rand)
        c.nearest += 1
        x_new = extend(ta.coords[x_near], x_rand, state.eta)
        c.steer += 1
        c.collision += 1
        if not env.segment_free(ta.coords[x_near], x_new):
            return IterationOutcome()
        new_id = insert_vertex(ta, x_new, x_near, distance(ta.coords[x_near], x_new))
        reached = _greedy_connect(state, env, tb, x_new)
        new_best = False
        if reached is not None and state.sigma_f is None:
            path = concat_paths(extract_path(ta, new_id), extract_path(tb, reached))
            if state.active == 1:
                path = path.reversed()
            new_best = state.offer(path)
        return IterationOutcome(inserted=True, connection_attempted=True, new_best=new_best)
    finally:
        state.active = 1 - state.active
