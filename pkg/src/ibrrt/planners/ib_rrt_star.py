"""Intelligent bidirectional RRT*: one shared ball, insertion into the cheaper tree,
and tree connection through the sample itself."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ..environment import Environment, sample_free
from ..errors import UsageError
from ..geometry import near_radius
from ..tree import (
    Candidate,
    OpCounters,
    PathSolution,
    SortedCandidates,
    Tree,
    choose_best_parent,
    concat_paths,
    extract_path,
    get_sorted_list,
    insert_vertex,
    rewire_vertices,
)
from .base import IterationOutcome, PlannerState, iteration


class BestTreeParent(NamedTuple):
    parent: Candidate | None
    flag: bool
    sigma_f: PathSolution | None


def connect_trees(
    sigma_a: PathSolution, sigma_b: PathSolution, sigma_f: PathSolution | None
) -> PathSolution:
    """Return the cheaper of ``sigma_f`` and ``sigma_a`` followed by reversed ``sigma_b``.

    Both inputs must end at the same sample; ``sigma_f`` of ``None`` costs +inf.
    """
    if not np.array_equal(sigma_a.end, sigma_b.end):
        raise UsageError("sigma_a and sigma_b must terminate at the same state")
    if sigma_f is not None and not sigma_a.cost + sigma_b.cost < sigma_f.cost:
        return sigma_f
    return concat_paths(sigma_a, sigma_b)


def _through(tree: Tree, cand: Candidate) -> PathSolution:
    """Root-to-target path via the candidate parent."""
    base = extract_path(tree, cand.vertex)
    return PathSolution(np.vstack([base.states, cand.target]), cand.total_cost)


def get_best_tree_parent(
    lsa: SortedCandidates,
    lsb: SortedCandidates,
    connection: bool,
    sigma_f: PathSolution | None,
    env: Environment,
    tree_a: Tree,
    tree_b: Tree,
    counters: OpCounters | None = None,
) -> BestTreeParent:
    """Best collision-free parent over both trees; ties go to tree a.

    A side with no feasible candidate costs +inf. When ``connection`` holds
    and both sides are feasible, the two root paths meeting at the sample are
    offered to :func:`connect_trees`.
    """
    best_a = choose_best_parent(lsa, env, counters)
    best_b = choose_best_parent(lsb, env, counters)
    ca = best_a.total_cost if best_a is not None else math.inf
    cb = best_b.total_cost if best_b is not None else math.inf

    flag = True
    parent = None
    if best_a is not None and ca <= cb:
        parent = best_a
    elif best_b is not None and cb < ca:
        parent = best_b
        flag = False

    if connection and best_a is not None and best_b is not None:
        current = math.inf if sigma_f is None else sigma_f.cost
        # only materialise the paths when the concatenation would win
        if ca + cb < current:
            sigma_f = connect_trees(_through(tree_a, best_a), _through(tree_b, best_b), sigma_f)
    return BestTreeParent(parent, flag, sigma_f)


@iteration
def ib_rrt_star_step(state: PlannerState, env: Environment, rng: np.random.Generator) -> IterationOutcome:
    ta, tb = state.trees
    c = state.counters
    x_rand = sample_free(env, rng)
    c.sample += 1

    r = near_radius(len(ta) + len(tb), env.n, state.gamma)
    near_a = ta.near(x_rand, r)
    near_b = tb.near(x_rand, r)
    c.near += 2
    connection = True
    if near_a.size == 0 and near_b.size == 0:
        near_a = [ta.nearest(x_rand)]
        near_b = [tb.nearest(x_rand)]
        c.nearest += 2
        connection = False
    state.connection = connection

    lsa = get_sorted_list(x_rand, near_a, ta)
    lsb = get_sorted_list(x_rand, near_b, tb)
    c.steer += len(lsa) + len(lsb)
    before = state.best_cost
    choice = get_best_tree_parent(lsa, lsb, connection, state.sigma_f, env, ta, tb, c)
    state.sigma_f = choice.sigma_f
    new_best = state.best_cost < before

    if choice.parent is None:
        return IterationOutcome(connection_attempted=connection, new_best=new_best)
    tree, ls = (ta, lsa) if choice.flag else (tb, lsb)
    new_id = insert_vertex(tree, x_rand, choice.parent.vertex, choice.parent.edge_length)
    rewired = rewire_vertices(tree, new_id, ls, env, c)
    return IterationOutcome(
        inserted=True, rewired_count=rewired, connection_attempted=connection, new_best=new_best
    )
