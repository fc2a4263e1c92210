"""Bidirectional RRT* with the partially greedy connect heuristic; trees swap every iteration."""

from __future__ import annotations

import math

import numpy as np

from ..environment import Environment, sample_free
from ..geometry import near_radius
from ..tree import (
    OpCounters,
    PathSolution,
    Tree,
    choose_best_parent,
    concat_paths,
    extract_path,
    get_sorted_list,
    insert_vertex,
    rewire_vertices,
)
from .base import IterationOutcome, PlannerState, extend, iteration


def _near_or_nearest(tree: Tree, x, r: float, fallback: int, c: OpCounters):
    near = tree.near(x, r)
    c.near += 1
    if near.size == 0:
        return [fallback]
    return near


def brrt_connect(
    tree: Tree,
    new_id: int,
    other: Tree,
    x_conn: int,
    env: Environment,
    gamma: float,
    eta: float,
    counters: OpCounters | None = None,
    below: float = math.inf,
) -> PathSolution | None:
    """Try to join ``tree``'s vertex ``new_id`` to ``other`` near ``x_conn``.

    Extends from ``x_conn`` towards the new vertex, gathers ``other``'s
    vertices around that extension (falling back to ``x_conn``), and links the
    cheapest collision-free one straight to the new vertex. Returns the path
    from ``tree``'s root to ``other``'s root, or ``None`` when every link is
    blocked or the result would not cost less than ``below``.
    """
    c = counters if counters is not None else OpCounters()
    x1 = tree.coords[new_id]
    x_ext = extend(other.coords[x_conn], x1, eta)
    c.steer += 1
    r = near_radius(len(other), env.n, gamma, cap=eta)
    near = _near_or_nearest(other, x_ext, r, x_conn, c)
    candidates = get_sorted_list(x1, near, other)
    c.steer += len(candidates)
    best = choose_best_parent(candidates, env, c)
    if best is None:
        return None
    total = tree.cost[new_id] + best.total_cost
    if not total < below:
        return None
    pa = extract_path(tree, new_id)
    pb = extract_path(other, best.vertex)
    pb = PathSolution(np.vstack([pb.states, x1]), best.total_cost)
    return concat_paths(pa, pb)


@iteration
def b_rrt_star_step(state: PlannerState, env: Environment, rng: np.random.Generator) -> IterationOutcome:
    ta = state.trees[state.active]
    tb = state.trees[1 - state.active]
    c = state.counters
    try:
        x_rand = sample_free(env, rng)
        c.sample += 1
        x_nearest = ta.nearest(x_rand)
        c.nearest += 1
        x_new = extend(ta.coords[x_nearest], x_rand, state.eta)
        c.steer += 1

        r = near_radius(len(ta), env.n, state.gamma, cap=state.eta)
        near = _near_or_nearest(ta, x_new, r, x_nearest, c)
        candidates = get_sorted_list(x_new, near, ta)
        c.steer += len(candidates)
        best = choose_best_parent(candidates, env, c)
        if best is None:
            return IterationOutcome()
        new_id = insert_vertex(ta, x_new, best.vertex, best.edge_length)
        rewired = rewire_vertices(ta, new_id, candidates, env, c)

        if state.node_count >= state.max_nodes:
            return IterationOutcome(inserted=True, rewired_count=rewired)
        x_conn = tb.nearest(x_new)
        c.nearest += 1
        path = brrt_connect(ta, new_id, tb, x_conn, env, state.gamma, state.eta, c, state.best_cost)
        new_best = False
        if path is not None:
            if state.active == 1:
                path = path.reversed()
            new_best = state.offer(path)
        return IterationOutcome(
            inserted=True, rewired_count=rewired, connection_attempted=True, new_best=new_best
        )
    finally:
        state.active = 1 - state.active
