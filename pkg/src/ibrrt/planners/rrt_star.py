"""Single-tree RRT* with deferred collision checks in parent selection."""

from __future__ import annotations

import numpy as np

from ..environment import Environment, in_goal, sample_free
from ..geometry import distance, near_radius
from ..tree import choose_best_parent, extract_path, get_sorted_list, insert_vertex, rewire_vertices
from .base import IterationOutcome, PlannerState, iteration


def _refresh_goal(state: PlannerState, env: Environment) -> bool:
    """Re-evaluate the cheapest goal vertex after costs may have dropped."""
    if not state.goal_vertices:
        return False
    tree = state.trees[0]
    ids = np.asarray(state.goal_vertices)
    total = tree.cost[ids]
    if state.join_goal_center:
        total = total + np.asarray(state.goal_join)
    k = int(np.argmin(total))
    if not total[k] < state.best_cost:
        return False
    path = extract_path(tree, int(ids[k]))
    if state.join_goal_center:
        path = path.extended(env.goal.center)
    return state.offer(path)


@iteration
def rrt_star_step(state: PlannerState, env: Environment, rng: np.random.Generator) -> IterationOutcome:
    tree = state.trees[0]
    c = state.counters
    x_rand = sample_free(env, rng)
    c.sample += 1

    r = near_radius(len(tree), env.n, state.gamma)
    near = tree.near(x_rand, r)
    c.near += 1
    if near.size == 0:
        near = [tree.nearest(x_rand)]
        c.nearest += 1
    candidates = get_sorted_list(x_rand, near, tree)
    c.steer += len(candidates)
    best = choose_best_parent(candidates, env, c)
    if best is None:
        return IterationOutcome()

    new_id = insert_vertex(tree, x_rand, best.vertex, best.edge_length)
    rewired = rewire_vertices(tree, new_id, candidates, env, c)

    goal_changed = False
    if in_goal(env, x_rand):
        join = 0.0
        ok = True
        if state.join_goal_center:
            c.collision += 1
            ok = env.segment_free(x_rand, env.goal.center)
            join = distance(x_rand, env.goal.center)
        if ok:
            state.goal_vertices.append(new_id)
            state.goal_join.append(join)
            goal_changed = True
    new_best = False
    if goal_changed or rewired:
        new_best = _refresh_goal(state, env)
    return IterationOutcome(inserted=True, rewired_count=rewired, new_best=new_best)
