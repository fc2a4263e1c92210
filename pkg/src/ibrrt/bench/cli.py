"""``ibrrt`` command line: run, bench, render, compare and reference."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from .. import __version__
from ..environment import RNG_NAME, Environment, environment_from_dict, environment_to_dict, load_environment
from ..errors import PlanningError, UsageError
from ..planners import PLANNER_KINDS, PlannerConfig, run
from ..scenarios import SCENARIO_NAMES, builtin_scenario, reference_cost, trial_budget
from ..tree import PathSolution
from .metrics import SummaryRow, aggregate
from .render import render_2d
from .trial import DEFAULT_EPS_OPT, TrialRecord, bytes_per_node, resolve_policy, run_trial

CSV_COLUMNS = ("scenario", "planner", "i_min", "i_max", "i_avg", "t_min", "t_max", "t_avg", "C", "fail")
TIMING_NOTE = "seconds cover the planner loop only; environment construction and I/O are excluded"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _planner_kinds(text: str) -> list[str]:
    kinds = [k.strip() for k in text.split(",") if k.strip()]
    for k in kinds:
        if k not in PLANNER_KINDS:
            raise UsageError(f"unknown planner {k!r}; expected one of {', '.join(PLANNER_KINDS)}")
    if not kinds:
        raise UsageError("no planner given")
    return kinds


def _add_env_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--env", metavar="PATH", help="environment JSON file")
    g.add_argument("--scenario", metavar="NAME", help=f"built-in scene: {', '.join(SCENARIO_NAMES)}")


def _add_planner_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iters", type=int, default=None, help="iteration budget (default: per scenario)")
    p.add_argument("--max-nodes", type=int, default=5_000_000)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--cc-step", type=float, default=None)
    p.add_argument("--eps-opt", type=float, default=DEFAULT_EPS_OPT)
    p.add_argument("--reference", type=float, default=None, help="reference cost C_ref (default: stored value)")
    p.add_argument("--stop-at-convergence", action="store_true")
    p.add_argument("--timing", choices=("on", "off"), default="on", help="'off' blanks wall times for byte-stable output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ibrrt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ibrrt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="one trial; prints its TrialRecord")
    _add_env_args(p)
    p.add_argument("--algo", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_planner_args(p)
    p.add_argument("--out", metavar="PATH", help="save the run (record, trees, path) as JSON")
    p.add_argument("--svg", metavar="PATH", help="render the final 2-D state")

    p = sub.add_parser("bench", help="seeds x planners matrix; emits CSV and a JSON trial log")
    _add_env_args(p)
    p.add_argument("--algos", default=",".join(PLANNER_KINDS[:3]))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _add_planner_args(p)
    p.add_argument("--out", metavar="PATH", help="write PATH.csv and PATH.json (default: CSV on stdout)")

    p = sub.add_parser("render", help="SVG from a run saved with 'run --out'")
    p.add_argument("run_file", metavar="RUN")
    p.add_argument("--svg", metavar="PATH", required=True)

    p = sub.add_parser("compare", help="summary table from bench JSON logs")
    p.add_argument("logs", metavar="LOG", nargs="+")

    p = sub.add_parser("reference", help="compute reference costs with long IB-RRT* runs")
    p.add_argument("--scenario", action="append", metavar="NAME", help="repeatable; default: all")
    p.add_argument("--factor", type=int, default=10, help="multiple of the trial budget")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _load_env(args) -> Environment:
    if args.env is not None:
        try:
            text = Path(args.env).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.env}: {exc.strerror}") from exc
        env = load_environment(text)
    else:
        env = builtin_scenario(args.scenario)
    if args.cc_step is not None:
        env = dataclasses.replace(env, cc_step=args.cc_step)
    return env


def _config(args, env: Environment, seed: int) -> PlannerConfig:
    iters = args.max_iters if args.max_iters is not None else trial_budget(env.name, env.n)
    return PlannerConfig(
        max_iterations=iters, max_nodes=args.max_nodes, gamma=args.gamma, eta=args.eta, seed=seed
    )


def _metadata(args, env: Environment, config: PlannerConfig, policy) -> dict:
    gamma, eta = config.resolved(env)
    return {
        "version": __version__,
        "environment": env.name,
        "dim": env.n,
        "gamma": gamma,
        "eta": eta,
        "cc_step": env.cc_step,
        "rng": RNG_NAME,
        "max_iterations": config.max_iterations,
        "max_nodes": config.max_nodes,
        "eps_opt": args.eps_opt,
        "reference_cost": None if policy is None else policy.reference_cost,
        "bytes_per_node": bytes_per_node(env.n),
        "timing": TIMING_NOTE if args.timing == "on" else "disabled",
    }


def _trial_job(job):
    env_doc, planner, seed, config, ref, eps, stop = job
    env = environment_from_dict(env_doc)
    policy = resolve_policy(env, eps, ref)
    record, _ = run_trial(env, planner, seed, config, policy, stop)
    return record


def _fmt_num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def summary_csv(rows: Sequence[SummaryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.scenario, r.planner] + [_fmt_num(getattr(r, c)) for c in CSV_COLUMNS[2:]])
    return buf.getvalue()


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _strip_time(row: SummaryRow) -> SummaryRow:
    return dataclasses.replace(row, t_min=None, t_max=None, t_avg=None)


def cmd_run(args) -> int:
    env = _load_env(args)
    planner = _planner_kinds(args.algo)
    if len(planner) != 1:
        raise UsageError("run takes exactly one --algo")
    policy = resolve_policy(env, args.eps_opt, args.reference)
    config = _config(args, env, args.seed)
    if args.svg and env.n != 2:
        raise UsageError(f"--svg needs a 2-D environment, got n={env.n}")
    record, state = run_trial(env, planner[0], args.seed, config, policy, args.stop_at_convergence)
    timing = args.timing == "on"
    print(json.dumps(record.to_dict(timing), sort_keys=True, allow_nan=False))
    if args.out:
        doc = {
            "metadata": _metadata(args, env, config, policy),
            "environment": environment_to_dict(env),
            "record": record.to_dict(timing),
            "iteration": state.iteration,
            "trees": [t.snapshot() for t in state.trees],
            "path": None if state.sigma_f is None else state.sigma_f.states.tolist(),
        }
        Path(args.out).write_text(_dumps(doc))
    if args.svg:
        Path(args.svg).write_text(
            render_2d(env, [t.snapshot() for t in state.trees], state.sigma_f, state.iteration, state.best_cost)
        )
    return 0


def cmd_bench(args) -> int:
    env = _load_env(args)
    planners = _planner_kinds(args.algos)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    policy = resolve_policy(env, args.eps_opt, args.reference)
    base = _config(args, env, args.seed_base)
    env_doc = environment_to_dict(env)
    ref = None if policy is None else policy.reference_cost
    jobs = [
        (env_doc, planner, args.seed_base + k, base, ref, args.eps_opt, args.stop_at_convergence)
        for planner in planners
        for k in range(args.trials)
    ]
    if args.workers == 1:
        records = [_trial_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(_trial_job, jobs))
    records.sort(key=lambda r: (r.scenario, PLANNER_KINDS.index(r.planner), r.seed))
    timing = args.timing == "on"
    rows = []
    for planner in planners:
        row = aggregate([r for r in records if r.planner == planner], ref)
        rows.append(row if timing else _strip_time(row))
    table = summary_csv(rows)
    log = {
        "metadata": _metadata(args, env, base, policy),
        "trials": [r.to_dict(timing) for r in records],
    }
    if args.out:
        Path(f"{args.out}.csv").write_text(table)
        Path(f"{args.out}.json").write_text(_dumps(log))
    else:
        sys.stdout.write(table)
    return 0


def cmd_render(args) -> int:
    try:
        doc = json.loads(Path(args.run_file).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.run_file}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.run_file} is not JSON: {exc}") from exc
    env = environment_from_dict(doc["environment"])
    if env.n != 2:
        raise UsageError(f"render needs a 2-D run, got n={env.n}")
    path = None
    cost = doc["record"].get("final_cost")
    if doc.get("path"):
        path = PathSolution(np.asarray(doc["path"], dtype=float), math.inf if cost is None else cost)
    trees = [[(v, xy, p, c) for v, xy, p, c in snap] for snap in doc["trees"]]
    Path(args.svg).write_text(render_2d(env, trees, path, doc.get("iteration"), cost))
    return 0


def compare_table(records: Sequence[TrialRecord], references: dict[str, float | None]) -> str:
    groups: dict[tuple[str, str], list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.scenario, r.planner), []).append(r)
    rows = [
        aggregate(v, references.get(k[0]))
        for k, v in sorted(groups.items(), key=lambda kv: (kv[0][0], PLANNER_KINDS.index(kv[0][1])))
    ]
    head = f"{'scenario':<16}{'planner':<13}{'i_min':>8}{'i_max':>8}{'i_avg':>10}{'t_avg':>9}{'C':>9}{'fail':>6}"
    lines = [head, "-" * len(head)]
    for r in rows:
        def f(v, spec):
            return "-" if v is None else format(v, spec)

        lines.append(
            f"{r.scenario:<16}{r.planner:<13}{f(r.i_min, 'd'):>8}{f(r.i_max, 'd'):>8}"
            f"{f(r.i_avg, '.1f'):>10}{f(r.t_avg, '.2f'):>9}{f(r.C, '.4f'):>9}{r.fail:>6d}"
        )
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    records: list[TrialRecord] = []
    refs: dict[str, float | None] = {}
    for name in args.logs:
        try:
            doc = json.loads(Path(name).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read {name}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"{name} is not JSON: {exc}") from exc
        for t in doc["trials"]:
            rec = TrialRecord.from_dict(t)
            records.append(rec)
            refs[rec.scenario] = doc["metadata"].get("reference_cost")
    sys.stdout.write(compare_table(records, refs))
    return 0


def cmd_reference(args) -> int:
    names = args.scenario or list(SCENARIO_NAMES)
    for name in names:
        env = builtin_scenario(name)
        iters = args.factor * trial_budget(name, env.n)
        state = run("ib-rrt-star", PlannerConfig(max_iterations=iters, seed=args.seed), env)
        stored = reference_cost(name)
        print(json.dumps({"scenario": name, "iterations": iters, "cost": state.best_cost, "stored": stored}))
    return 0


COMMANDS = {"run": cmd_run, "bench": cmd_bench, "render": cmd_render, "compare": cmd_compare, "reference": cmd_reference}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ibrrt: error: {exc}", file=sys.stderr)
        return 2
    except (PlanningError, KeyError, TypeError) as exc:
        print(f"ibrrt: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
