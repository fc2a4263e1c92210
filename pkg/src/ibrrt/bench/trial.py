"""Single benchmark trials and their records."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

from ..environment import Environment
from ..errors import UsageError
from ..planners import PlannerConfig, PlannerState, run
from ..scenarios import builtin_scenario, reference_cost

# declared per-node footprint: n coordinates + cost (float64) + parent id (int64)
BYTES_PER_COORD = 8
BYTES_PER_NODE_OVERHEAD = 16
DEFAULT_EPS_OPT = 0.05


def bytes_per_node(n: int) -> int:
    return BYTES_PER_COORD * n + BYTES_PER_NODE_OVERHEAD


@dataclass(frozen=True)
class ConvergencePolicy:
    """A run has converged once its best cost is within ``(1 + eps_opt) * reference_cost``."""

    reference_cost: float
    eps_opt: float = DEFAULT_EPS_OPT

    def __post_init__(self):
        if not (self.reference_cost > 0.0 and math.isfinite(self.reference_cost)):
            raise UsageError("reference cost must be positive and finite")
        if not (self.eps_opt > 0.0 and math.isfinite(self.eps_opt)):
            raise UsageError("eps_opt must be positive")

    @property
    def threshold(self) -> float:
        return (1.0 + self.eps_opt) * self.reference_cost

    def reached(self, cost: float) -> bool:
        return cost <= self.threshold


@dataclass(frozen=True)
class FirstSolutionRecord:
    iteration: int
    seconds: float
    cost: float


@dataclass(frozen=True)
class ConvergedRecord:
    """First iteration within the policy threshold and the best cost at that iteration."""

    iteration: int
    seconds: float
    cost: float


@dataclass(frozen=True)
class TrialRecord:
    scenario: str
    planner: str
    seed: int
    first_solution: FirstSolutionRecord | None
    converged: ConvergedRecord | None
    final_cost: float
    node_count: int
    memory_bytes_estimate: int
    op_counters: dict[str, int] = field(default_factory=dict)
    capped: bool = False
    iterations: int = 0

    def __post_init__(self):
        if self.converged is not None:
            if self.first_solution is None:
                raise UsageError("a converged trial must have a first solution")
            if self.converged.iteration < self.first_solution.iteration:
                raise UsageError("convergence cannot precede the first solution")

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        d = asdict(self)
        d["final_cost"] = None if math.isinf(self.final_cost) else self.final_cost
        if not timing:
            for key in ("first_solution", "converged"):
                if d[key] is not None:
                    d[key]["seconds"] = None
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "TrialRecord":
        fs = d.get("first_solution")
        cv = d.get("converged")
        cost = d.get("final_cost")
        return cls(
            scenario=d["scenario"],
            planner=d["planner"],
            seed=int(d["seed"]),
            first_solution=None if fs is None else FirstSolutionRecord(**fs),
            converged=None if cv is None else ConvergedRecord(**cv),
            final_cost=math.inf if cost is None else float(cost),
            node_count=int(d["node_count"]),
            memory_bytes_estimate=int(d["memory_bytes_estimate"]),
            op_counters=dict(d.get("op_counters", {})),
            capped=bool(d.get("capped", False)),
            iterations=int(d.get("iterations", 0)),
        )


def resolve_policy(env: Environment, eps_opt: float = DEFAULT_EPS_OPT, reference: float | None = None):
    """Policy from an explicit reference, else the stored one for ``env.name``; None if neither."""
    ref = reference if reference is not None else reference_cost(env.name)
    return None if ref is None else ConvergencePolicy(ref, eps_opt)


def run_trial(
    scenario: str | Environment,
    planner: str,
    seed: int,
    config: PlannerConfig | None = None,
    policy: ConvergencePolicy | None = None,
    stop_at_convergence: bool = False,
) -> tuple[TrialRecord, PlannerState]:
    """Run one planner on one scenario and summarise it.

    ``scenario`` is a built-in name or an :class:`Environment`. ``policy``
    defaults to the stored reference cost of the scenario; with no policy
    nothing ever converges. With ``stop_at_convergence`` the run ends at the
    converging iteration instead of exhausting the budget.
    """
    env = builtin_scenario(scenario) if isinstance(scenario, str) else scenario
    config = PlannerConfig() if config is None else config
    config = PlannerConfig(**{**asdict(config), "seed": seed})
    if policy is None:
        policy = resolve_policy(env)
    converged: list[ConvergedRecord] = []

    def watch(state: PlannerState, outcome) -> bool:
        if not converged and policy is not None and policy.reached(state.best_cost):
            converged.append(ConvergedRecord(state.iteration, state.clock(), state.best_cost))
            return stop_at_convergence
        return False

    state = run(planner, config, env, callback=watch)
    fs = state.first_solution
    record = TrialRecord(
        scenario=env.name,
        planner=planner,
        seed=seed,
        first_solution=None if fs is None else FirstSolutionRecord(fs.iteration, fs.seconds, fs.cost),
        converged=converged[0] if converged else None,
        final_cost=state.best_cost,
        node_count=state.node_count,
        memory_bytes_estimate=state.node_count * bytes_per_node(env.n),
        op_counters=state.counters.as_dict(),
        capped=state.capped,
        iterations=state.iteration,
    )
    return record, state
