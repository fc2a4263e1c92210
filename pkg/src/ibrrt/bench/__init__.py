"""Benchmark harness: trials, summary rows, metrics, rendering and the CLI."""

from .metrics import SummaryRow, aggregate, convergence_rate, op_count_ratio, plateau_stats, trial_convergence_rate
from .render import render_2d
from .trial import ConvergencePolicy, TrialRecord, bytes_per_node, resolve_policy, run_trial

__all__ = [
    "ConvergencePolicy",
    "SummaryRow",
    "TrialRecord",
    "aggregate",
    "bytes_per_node",
    "convergence_rate",
    "op_count_ratio",
    "plateau_stats",
    "render_2d",
    "resolve_policy",
    "run_trial",
    "trial_convergence_rate",
]
