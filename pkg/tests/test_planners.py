import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ibrrt.environment import Environment, seeded_rng
from ibrrt.errors import UsageError
from ibrrt.geometry import Ball, Box, distance
from ibrrt.planners import (
    PLANNER_KINDS,
    PlannerConfig,
    b_rrt_star_step,
    brrt_connect,
    connect_trees,
    default_eta,
    default_gamma,
    extend,
    get_best_tree_parent,
    ib_rrt_star_step,
    init_state,
    intensity_at,
    rrt_star_step,
    run,
)
from ibrrt.scenarios import builtin_scenario
from ibrrt.tree import ROOT, OpCounters, PathSolution, Tree, get_sorted_list, insert_vertex

OPT_EMPTY = distance([0.1, 0.1], [0.9, 0.9])


def open_env(obstacles=(), n=2):
    return Environment(
        Box(np.zeros(n), np.full(n, 10.0)), np.full(n, 1.0), Ball(np.full(n, 9.0), 0.5), tuple(obstacles)
    )


def path(*pts):
    pts = np.array(pts, dtype=float)
    cost = float(sum(distance(a, b) for a, b in zip(pts[:-1], pts[1:])))
    return PathSolution(pts, cost)


class FixedRng:
    """Stand-in generator replaying unit-cube draws."""

    def __init__(self, draws):
        self._draws = [np.asarray(d, dtype=float) for d in draws]

    def random(self, n):
        return self._draws.pop(0)


# --------------------------------------------------------------------- extend


def test_extend():
    assert np.array_equal(extend([0, 0], [10, 0], 1.0), [1.0, 0.0])
    assert np.array_equal(extend([0, 0], [0.3, 0.4], 1.0), [0.3, 0.4])
    assert np.array_equal(extend([2, 2], [2, 2], 1.0), [2.0, 2.0])
    with pytest.raises(UsageError):
        extend([0, 0], [1, 1], 0.0)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-100, 100), min_size=3, max_size=3),
    st.lists(st.floats(-100, 100), min_size=3, max_size=3),
    st.floats(0.01, 50),
)
def test_extend_never_overshoots(a, b, eta):
    x = extend(a, b, eta)
    assert distance(a, x) <= eta * (1 + 1e-12)
    assert distance(a, x) + distance(x, b) == pytest.approx(distance(a, b), rel=1e-9, abs=1e-9)


# ------------------------------------------------------------ config and run


def test_config_validation():
    with pytest.raises(UsageError):
        PlannerConfig(max_nodes=0)
    with pytest.raises(UsageError):
        PlannerConfig(gamma=-1.0)
    with pytest.raises(UsageError):
        PlannerConfig(max_iterations=-1)
    with pytest.raises(UsageError):
        run("rrt", PlannerConfig(), open_env())


def test_defaults():
    env = builtin_scenario("empty2d")
    assert default_eta(env) == pytest.approx(0.05 * 2**0.5)
    assert default_gamma(env) == pytest.approx(2 * 1.5**0.5 / math.pi**0.5)


@pytest.mark.parametrize("kind", PLANNER_KINDS)
def test_zero_iterations(kind):
    s = run(kind, PlannerConfig(max_iterations=0), open_env())
    assert s.sigma_f is None and s.iteration == 0
    assert s.node_count == (1 if kind == "rrt-star" else 2)


@pytest.mark.parametrize("kind", PLANNER_KINDS)
def test_node_cap(kind):
    s = run(kind, PlannerConfig(max_iterations=1000, max_nodes=10), open_env())
    assert s.node_count <= 10
    assert s.capped and s.iteration < 1000


@pytest.mark.parametrize("kind", PLANNER_KINDS)
def test_runs_are_deterministic(kind):
    env = builtin_scenario("cluttered2d_b")
    a = run(kind, PlannerConfig(max_iterations=600, seed=7), env)
    b = run(kind, PlannerConfig(max_iterations=600, seed=7), env)
    assert a.cost_trace == b.cost_trace
    assert a.counters.as_dict() == b.counters.as_dict()
    assert a.ops_trace == b.ops_trace
    assert [t.snapshot() for t in a.trees] == [t.snapshot() for t in b.trees]
    c = run(kind, PlannerConfig(max_iterations=600, seed=8), env)
    assert [t.snapshot() for t in a.trees] != [t.snapshot() for t in c.trees]


@pytest.mark.parametrize("kind", PLANNER_KINDS)
@pytest.mark.parametrize("scenario", ["cluttered2d_a", "maze2d", "narrow3d"])
def test_monotone_trace_and_integrity(kind, scenario):
    env = builtin_scenario(scenario)
    outcomes = []
    s = run(kind, PlannerConfig(max_iterations=1500, seed=3), env, lambda st, o: outcomes.append(o) and False)
    trace = np.array(s.cost_trace)
    finite = np.isfinite(trace)
    if finite.any():
        assert finite[np.argmax(finite):].all()
        assert np.all(np.diff(trace[finite]) <= 0.0)
    for t in s.trees:
        assert t.check_integrity(env) == []
    for o, before, after in zip(outcomes, [math.inf] + s.cost_trace[:-1], s.cost_trace):
        if o.new_best:
            assert after < before
        else:
            assert after == before
    counters = np.cumsum(s.ops_trace)
    assert counters[-1] == s.counters.total()
    if s.sigma_f is not None:
        assert np.array_equal(s.sigma_f.start, env.start)
        assert np.array_equal(s.sigma_f.end, env.goal.center)
        assert s.sigma_f.length == pytest.approx(s.sigma_f.cost, rel=1e-9)
        for a, b in zip(s.sigma_f.states[:-1], s.sigma_f.states[1:]):
            assert env.segment_free(a, b)


# --------------------------------------------------------------------- RRT*


def test_rrt_first_iteration_joins_root():
    env = open_env()
    s = init_state("rrt-star", env, PlannerConfig(gamma=0.01))
    o = rrt_star_step(s, env, FixedRng([[0.5, 0.1]]))
    assert o.inserted and len(s.trees[0]) == 2
    assert s.trees[0].parent[1] == ROOT
    assert s.counters.nearest == 1


def test_rrt_blocked_sample_leaves_tree():
    env = open_env([Box([2.0, 0.0], [3.0, 10.0])])
    s = init_state("rrt-star", env, PlannerConfig())
    o = rrt_star_step(s, env, FixedRng([[0.5, 0.1]]))
    assert not o.inserted and len(s.trees[0]) == 1
    assert s.iteration == 1


def test_rrt_goal_vertex_sets_path():
    env = open_env()
    s = init_state("rrt-star", env, PlannerConfig())
    o = rrt_star_step(s, env, FixedRng([[0.9, 0.9]]))
    assert o.new_best
    assert s.best_cost == pytest.approx(distance([1, 1], [9, 9]))


@pytest.mark.slow
def test_rrt_empty2d_converges():
    s = run("rrt-star", PlannerConfig(max_iterations=20_000, seed=1), builtin_scenario("empty2d"))
    assert s.best_cost <= 1.02 * OPT_EMPTY


# -------------------------------------------------------------------- B-RRT*


def test_brrt_alternates_trees():
    env = open_env()
    s = init_state("b-rrt-star", env, PlannerConfig())
    rng = seeded_rng(0)
    for k in range(40):
        assert s.active == k % 2
        sizes = [len(t) for t in s.trees]
        o = b_rrt_star_step(s, env, rng)
        grown = [len(t) - m for t, m in zip(s.trees, sizes)]
        assert grown == ([1, 0] if k % 2 == 0 else [0, 1]) or not o.inserted


def test_brrt_first_step_within_eta():
    env = open_env()
    s = init_state("b-rrt-star", env, PlannerConfig())
    b_rrt_star_step(s, env, seeded_rng(4))
    assert distance(s.trees[0].coords[1], env.start) <= s.eta * (1 + 1e-12)


def two_chains():
    ta = Tree(np.array([0.0, 0.0]))
    insert_vertex(ta, np.array([1.0, 0.0]), ROOT)
    tb = Tree(np.array([4.0, 0.0]))
    insert_vertex(tb, np.array([3.0, 0.0]), ROOT)
    return ta, tb


def test_brrt_connect_sums_costs():
    ta, tb = two_chains()
    env = open_env()
    p = brrt_connect(ta, 1, tb, 1, env, gamma=10.0, eta=5.0)
    assert p.cost == pytest.approx(4.0)
    assert np.array_equal(p.states[0], [0, 0]) and np.array_equal(p.states[-1], [4, 0])
    assert p.length == pytest.approx(p.cost)
    assert brrt_connect(ta, 1, tb, 1, env, gamma=10.0, eta=5.0, below=4.0) is None


def test_brrt_connect_blocked():
    ta, tb = two_chains()
    wall = Box([1.9, -1.0], [2.1, 1.0])
    env = Environment(Box([-5, -5], [5, 5]), np.zeros(2), Ball([4.0, 0.0], 0.1), (wall,))
    assert brrt_connect(ta, 1, tb, 1, env, gamma=10.0, eta=5.0) is None
    # tiny radius: near set empty, fallback to x_conn, still blocked
    assert brrt_connect(ta, 1, tb, 1, env, gamma=1e-6, eta=1e-6) is None


def test_brrt_first_solution_earlier_than_rrt():
    env = builtin_scenario("empty2d")
    stop = lambda st, o: st.sigma_f is not None  # noqa: E731
    first = {}
    for kind in ("rrt-star", "b-rrt-star"):
        first[kind] = [
            run(kind, PlannerConfig(max_iterations=20_000, seed=s), env, stop).first_solution.iteration
            for s in range(20)
        ]
    assert np.median(first["b-rrt-star"]) < np.median(first["rrt-star"])


# ------------------------------------------------------------------- IB-RRT*


def test_connect_trees():
    sa = path([0, 0], [3, 0])
    sb = path([5, 0], [3, 0])
    joined = connect_trees(sa, sb, None)
    assert joined.cost == 5.0
    assert np.array_equal(joined.states, [[0, 0], [3, 0], [5, 0]])
    existing = PathSolution(np.array([[0.0, 0.0], [5.0, 0.0]]), 8.0)
    long_a = PathSolution(sa.states, 6.0)
    long_b = PathSolution(sb.states, 4.0)
    assert connect_trees(long_a, long_b, existing) is existing
    jb = PathSolution(sb.states, 1.9)
    assert connect_trees(long_a, jb, existing).cost == pytest.approx(7.9)
    with pytest.raises(UsageError):
        connect_trees(sa, path([5, 0], [4, 0]), None)


def hand_trees(ca, cb):
    """Trees a and b on either side of x = (5, 5) whose cheapest route to x costs ``ca`` and ``cb``."""
    ta = Tree(np.array([5.0 - ca, 5.0]))
    insert_vertex(ta, np.array([4.0, 5.0]), ROOT)
    tb = Tree(np.array([5.0 + cb, 5.0]))
    insert_vertex(tb, np.array([6.0, 5.0]), ROOT)
    return ta, tb


def test_best_tree_parent_prefers_cheaper():
    env = open_env()
    x = np.array([5.0, 5.0])
    ta, tb = hand_trees(5.0, 7.0)
    lsa, lsb = get_sorted_list(x, [ROOT, 1], ta), get_sorted_list(x, [ROOT, 1], tb)
    assert lsa[0].total_cost == pytest.approx(5.0) and lsb[0].total_cost == pytest.approx(7.0)
    res = get_best_tree_parent(lsa, lsb, True, None, env, ta, tb)
    assert res.flag and res.parent.total_cost == pytest.approx(5.0)
    assert res.sigma_f.cost == pytest.approx(12.0)
    assert np.array_equal(res.sigma_f.start, ta.root) and np.array_equal(res.sigma_f.end, tb.root)
    res = get_best_tree_parent(lsb, lsa, False, None, env, tb, ta)
    assert not res.flag and res.sigma_f is None


def test_best_tree_parent_one_side_feasible():
    x = np.array([5.0, 5.0])
    ta, tb = hand_trees(2.0, 3.0)
    # wall between x and every vertex of tree a
    env = open_env([Box([4.4, 0.0], [4.6, 10.0])])
    lsa, lsb = get_sorted_list(x, [ROOT, 1], ta), get_sorted_list(x, [ROOT, 1], tb)
    c = OpCounters()
    res = get_best_tree_parent(lsa, lsb, True, None, env, ta, tb, c)
    assert not res.flag and res.parent.total_cost == 3.0
    assert res.sigma_f is None
    assert c.collision == 3


def test_best_tree_parent_all_blocked():
    x = np.array([5.0, 5.0])
    ta, tb = hand_trees(2.0, 3.0)
    env = open_env([Box([4.4, 0.0], [4.6, 10.0]), Box([5.4, 0.0], [5.6, 10.0])])
    old = path([0, 0], [1, 0])
    lsa, lsb = get_sorted_list(x, [ROOT, 1], ta), get_sorted_list(x, [ROOT, 1], tb)
    res = get_best_tree_parent(lsa, lsb, True, old, env, ta, tb)
    assert res.parent is None and res.flag is True and res.sigma_f is old


def test_best_tree_parent_tie_goes_to_a():
    x = np.array([5.0, 5.0])
    ta, tb = hand_trees(4.0, 4.0)
    lsa, lsb = get_sorted_list(x, [1], ta), get_sorted_list(x, [1], tb)
    assert lsa[0].total_cost == lsb[0].total_cost
    res = get_best_tree_parent(lsa, lsb, False, None, open_env(), ta, tb)
    assert res.flag


def test_ib_first_iteration():
    env = open_env()
    s = init_state("ib-rrt-star", env, PlannerConfig(gamma=0.01))
    # sample (3, 3) lies closer to the start root (1, 1) than to the goal root (9, 9)
    o = ib_rrt_star_step(s, env, FixedRng([[0.3, 0.3]]))
    assert o.inserted and not s.connection and not o.connection_attempted
    assert [len(t) for t in s.trees] == [2, 1]
    assert s.sigma_f is None
    o = ib_rrt_star_step(s, env, FixedRng([[0.75, 0.75]]))
    assert [len(t) for t in s.trees] == [2, 2]


def test_ib_bridge_in_ball():
    env = open_env()
    s = init_state("ib-rrt-star", env, PlannerConfig(gamma=100.0))
    o = ib_rrt_star_step(s, env, FixedRng([[0.5, 0.5]]))
    assert s.connection and o.new_best
    assert s.best_cost == pytest.approx(distance([1, 1], [9, 9]))


def test_ib_sigma_changes_only_with_connection():
    env = builtin_scenario("cluttered2d_a")
    log = []
    run("ib-rrt-star", PlannerConfig(max_iterations=3000, seed=2), env, lambda st, o: log.append(st.connection) and False)
    s = run("ib-rrt-star", PlannerConfig(max_iterations=3000, seed=2), env)
    trace = [math.inf] + s.cost_trace
    for k, conn in enumerate(log):
        if trace[k + 1] != trace[k]:
            assert conn


@pytest.mark.parametrize("kind", ["ib-rrt-star", "b-rrt-star", "rrt-star"])
def test_scale_invariance(kind):
    env = builtin_scenario("cluttered2d_a")
    big = env.scaled(2.0)
    gamma, eta = PlannerConfig().resolved(env)
    sizes = {}
    runs = {}
    for name, e, k in (("unit", env, 1.0), ("big", big, 2.0)):
        log = []
        runs[name] = run(
            kind,
            PlannerConfig(max_iterations=800, seed=5, gamma=gamma * k, eta=eta * k),
            e,
            lambda st, o: log.append(tuple(len(t) for t in st.trees)) and False,
        )
        sizes[name] = log
    assert sizes["unit"] == sizes["big"]
    a, b = runs["unit"], runs["big"]
    assert [2 * c for c in a.cost_trace] == b.cost_trace
    for ta, tb in zip(a.trees, b.trees):
        assert np.array_equal(ta.cost[: len(ta)] * 2, tb.cost[: len(tb)])


# --------------------------------------------------------------------- BiRRT


def test_birrt_feasibility_only():
    env = builtin_scenario("empty2d")
    outcomes = []
    s = run("birrt", PlannerConfig(max_iterations=2000, seed=1), env, lambda st, o: outcomes.append(o) and False)
    assert s.sigma_f is not None
    assert s.counters.near == 0
    assert all(o.rewired_count == 0 for o in outcomes)
    finite = [c for c in s.cost_trace if math.isfinite(c)]
    assert len(set(finite)) == 1
    again = run("birrt", PlannerConfig(max_iterations=2000, seed=1), env)
    assert again.first_solution.iteration == s.first_solution.iteration


# ----------------------------------------------------------------- intensity


def test_intensity():
    t = Tree(np.zeros(2))
    assert intensity_at(t, [5.0, 5.0], 1.0) == 0.0
    for p in ([0.1, 0], [0, 0.2], [-0.3, 0], [0, -0.4]):
        insert_vertex(t, np.array(p), ROOT)
    assert intensity_at(t, [0.0, 0.0], 1.0) == pytest.approx(5 / math.pi)
    with pytest.raises(UsageError):
        intensity_at(t, [0.0, 0.0], 0.0)


def test_ib_empty2d_reaches_optimum():
    env = builtin_scenario("empty2d")
    for seed in range(3):
        s = run("ib-rrt-star", PlannerConfig(max_iterations=20_000, seed=seed), env)
        assert s.sigma_f is not None and s.best_cost <= 1.02 * OPT_EMPTY
