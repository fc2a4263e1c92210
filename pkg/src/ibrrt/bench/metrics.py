"""Per-planner summary rows and the derived convergence metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import UsageError
from .trial import TrialRecord


@dataclass(frozen=True)
class SummaryRow:
    """Per (scenario, planner) summary; i/t fields are None when nothing converged."""

    scenario: str
    planner: str
    i_min: int | None
    i_max: int | None
    i_avg: float | None
    t_min: float | None
    t_max: float | None
    t_avg: float | None
    C: float | None
    fail: int
    trials: int


def aggregate(trials: Sequence[TrialRecord], reference_cost: float | None = None) -> SummaryRow:
    """Min/max/mean convergence iteration and time over the converged trials."""
    if not trials:
        raise UsageError("aggregate needs at least one trial")
    keys = {(t.scenario, t.planner) for t in trials}
    if len(keys) != 1:
        raise UsageError(f"trials mix scenario/planner pairs: {sorted(keys)}")
    scenario, planner = keys.pop()
    done = [t.converged for t in trials if t.converged is not None]
    fail = len(trials) - len(done)
    if not done:
        return SummaryRow(scenario, planner, None, None, None, None, None, None, reference_cost, fail, len(trials))
    its = [c.iteration for c in done]
    secs = [c.seconds for c in done]
    return SummaryRow(
        scenario,
        planner,
        min(its),
        max(its),
        sum(its) / len(its),
        min(secs),
        max(secs),
        sum(secs) / len(secs),
        reference_cost,
        fail,
        len(trials),
    )


def convergence_rate(c_init: float, c_star: float) -> float:
    """Relative improvement ``(c_init - c_star) / c_star`` from the first to the best solution."""
    if not (c_star > 0.0 and math.isfinite(c_star)):
        raise UsageError("c_star must be positive and finite")
    if not math.isfinite(c_init):
        raise UsageError("c_init must be finite")
    if c_init < c_star:
        raise UsageError("c_init must not be below c_star")
    return (c_init - c_star) / c_star


def trial_convergence_rate(trial: TrialRecord) -> float | None:
    """Rate from the first solution to the solution held when the trial converged.

    A trial that never converged has no optimal solution to measure against
    and yields None.
    """
    if trial.converged is None:
        return None
    return convergence_rate(trial.first_solution.cost, trial.converged.cost)


def op_count_ratio(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """Running ratio of cumulative op counts; entries with a zero denominator are dropped."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise UsageError(f"op-count series must be equal-length 1-D sequences, got {a.shape} and {b.shape}")
    ca = np.cumsum(a)
    cb = np.cumsum(b)
    ok = cb != 0.0
    return ca[ok] / cb[ok]


def plateau_stats(ratio: Sequence[float], fraction: float = 0.1) -> dict[str, float]:
    """Mean, standard deviation, median and max of the last ``fraction`` of a ratio series."""
    r = np.asarray(ratio, dtype=np.float64)
    if r.size == 0:
        raise UsageError("empty ratio series")
    tail = r[-max(1, int(round(r.size * fraction))) :]
    return {
        "mean": float(tail.mean()),
        "std": float(tail.std()),
        "median": float(np.median(tail)),
        "max": float(tail.max()),
    }
