"""Planner configuration, run state and the outer iteration loop."""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from ..environment import Environment
from ..errors import UsageError
from ..geometry import Config, as_config, ball_measure, distance, unit_ball_volume
from ..tree import OpCounters, PathSolution, Tree

PLANNER_KINDS = ("rrt-star", "b-rrt-star", "ib-rrt-star", "birrt")


def default_gamma(env: Environment) -> float:
    """``2 (1 + 1/n)^(1/n) (mu(X) / zeta_n)^(1/n)`` with obstacle volume ignored."""
    n = env.n
    return 2.0 * (1.0 + 1.0 / n) ** (1.0 / n) * (env.bounds.volume() / unit_ball_volume(n)) ** (1.0 / n)


def default_eta(env: Environment) -> float:
    return 0.05 * env.diagonal


@dataclass(frozen=True)
class PlannerConfig:
    """Run parameters. ``gamma``/``eta`` of ``None`` resolve to the environment defaults.

    ``join_goal_center`` makes RRT* report its path through to ``goal.center``
    so all planners measure the same start-to-goal-centre cost.
    """

    max_iterations: int = 10_000
    max_nodes: int = 5_000_000
    gamma: float | None = None
    eta: float | None = None
    seed: int = 0
    join_goal_center: bool = True

    def __post_init__(self):
        if self.max_iterations < 0:
            raise UsageError("max_iterations must be >= 0")
        if self.max_nodes < 1:
            raise UsageError("max_nodes must be >= 1")
        for name in ("gamma", "eta"):
            v = getattr(self, name)
            if v is not None and not (v > 0.0 and math.isfinite(v)):
                raise UsageError(f"{name} must be positive")

    def resolved(self, env: Environment) -> tuple[float, float]:
        gamma = default_gamma(env) if self.gamma is None else self.gamma
        eta = default_eta(env) if self.eta is None else self.eta
        return gamma, eta


class FirstSolution(NamedTuple):
    iteration: int
    seconds: float
    cost: float


class IterationOutcome(NamedTuple):
    inserted: bool = False
    rewired_count: int = 0
    connection_attempted: bool = False
    new_best: bool = False


@dataclass
class PlannerState:
    """Everything a run owns. ``trees[0]`` is rooted at the start, ``trees[1]`` at the goal centre."""

    kind: str
    trees: list[Tree]
    gamma: float
    eta: float
    max_nodes: int = 5_000_000
    join_goal_center: bool = True
    sigma_f: PathSolution | None = None
    iteration: int = 0
    counters: OpCounters = field(default_factory=OpCounters)
    first_solution: FirstSolution | None = None
    cost_trace: list[float] = field(default_factory=list)
    ops_trace: list[int] = field(default_factory=list)
    active: int = 0
    goal_vertices: list[int] = field(default_factory=list)
    goal_join: list[float] = field(default_factory=list)
    connection: bool = True
    capped: bool = False
    elapsed: float = 0.0
    t_start: float = field(default_factory=time.perf_counter)

    @property
    def best_cost(self) -> float:
        return math.inf if self.sigma_f is None else self.sigma_f.cost

    @property
    def node_count(self) -> int:
        return sum(len(t) for t in self.trees)

    @property
    def node_budget(self) -> int:
        return self.max_nodes - self.node_count

    def clock(self) -> float:
        return time.perf_counter() - self.t_start

    def offer(self, path: PathSolution) -> bool:
        """Adopt ``path`` as the best solution if strictly cheaper."""
        if path.cost < self.best_cost:
            self.sigma_f = path
            return True
        return False


def init_state(kind: str, env: Environment, config: PlannerConfig) -> PlannerState:
    if kind not in PLANNER_KINDS:
        raise UsageError(f"unknown planner kind {kind!r}; expected one of {PLANNER_KINDS}")
    gamma, eta = config.resolved(env)
    box = (env.bounds.lo, env.bounds.hi)
    trees = [Tree(env.start, bounds=box)]
    if kind != "rrt-star":
        trees.append(Tree(env.goal.center, bounds=box))
    return PlannerState(
        kind=kind,
        trees=trees,
        gamma=gamma,
        eta=eta,
        max_nodes=config.max_nodes,
        join_goal_center=config.join_goal_center,
    )


def iteration(step: Callable) -> Callable:
    """Wrap a planner step with the per-iteration bookkeeping."""

    @functools.wraps(step)
    def wrapper(state: PlannerState, env: Environment, rng: np.random.Generator) -> IterationOutcome:
        before = state.counters.total()
        outcome = step(state, env, rng)
        state.iteration += 1
        state.cost_trace.append(state.best_cost)
        state.ops_trace.append(state.counters.total() - before)
        if state.first_solution is None and state.sigma_f is not None:
            state.first_solution = FirstSolution(state.iteration, state.clock(), state.sigma_f.cost)
        return outcome

    return wrapper


def extend(from_: Config, to: Config, eta: float) -> Config:
    """Move from ``from_`` towards ``to`` by at most ``eta``."""
    if not eta > 0.0:
        raise UsageError("eta must be positive")
    d = distance(from_, to)
    if d <= eta:
        return np.array(to, dtype=np.float64)
    f = np.asarray(from_, dtype=np.float64)
    return f + (np.asarray(to, dtype=np.float64) - f) * (eta / d)


def intensity_at(tree: Tree, x: Config, r: float) -> float:
    """Tree vertices per unit volume inside the closed ball ``B(x, r)``."""
    if not r > 0.0:
        raise UsageError("radius must be positive")
    return len(tree.near(as_config(x), r)) / ball_measure(r, tree.dim)
