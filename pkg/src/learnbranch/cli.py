"""Command line entry point: train, evaluate, profile, generate, plot."""

import argparse
import logging
import os
import sys

from .dqn import DQNAgent
from .harness import (RunConfig, emit_plots, evaluate, load_instances, performance_profile,
                      read_results, table_from_results, write_profile, write_results,
                      write_timing)
from .harness.evaluate import instance_seeds
from .problems import PROBLEMS, get_problem


def _train(args):
    from .harness import train
    config = RunConfig.load(args.config)
    if args.out:
        config.output_dir = args.out
    errs = config.errors()
    if errs:
        for e in errs:
            print(f"config error: {e}", file=sys.stderr)
        return 2
    outcome = train(config)
    print(f"wrote {outcome.output_dir} ({len(outcome.curve)} evaluations)")
    return 0


def _problem_from_checkpoint(agent, fallback):
    meta = agent.meta or {}
    if "problem" not in meta:
        return fallback
    return get_problem(meta["problem"], **meta.get("params", {}))


def _evaluate(args):
    if not args.checkpoint and not args.baseline:
        print("evaluate needs --checkpoint and/or --baseline", file=sys.stderr)
        return 2
    agent = DQNAgent.load(args.checkpoint) if args.checkpoint else None
    problem = get_problem(args.problem) if args.problem else None
    if agent is not None:
        problem = _problem_from_checkpoint(agent, problem)
    if problem is None:
        suffixes = {cls.suffix: name for name, cls in PROBLEMS.items()}
        found = {suffixes[os.path.splitext(f)[1]] for f in os.listdir(args.instances)
                 if os.path.splitext(f)[1] in suffixes}
        if len(found) != 1:
            print("cannot tell the problem from the instance folder; pass --problem",
                  file=sys.stderr)
            return 2
        problem = get_problem(found.pop())
    names, instances = load_instances(problem, args.instances)
    solvers = ([agent] if agent is not None else []) + list(args.baseline or [])
    for s in args.baseline or []:
        if s not in problem.baselines:
            print(f"baseline {s!r} does not apply to {problem.name}", file=sys.stderr)
            return 2
    rows = evaluate(problem, solvers, instances, names, trials=args.trials, seed=args.seed,
                    node_limit=args.node_limit, time_limit=args.time_limit)
    os.makedirs(args.out, exist_ok=True)
    write_results(rows, os.path.join(args.out, "eval_results.csv"))
    write_timing(rows, os.path.join(args.out, "eval_timing.csv"))
    for r in rows:
        print(f"{r.instance} {r.solver}: {r.status} nodes={r.nodes_avg:g} "
              f"time/node={r.time_per_node * 1e3:.3f}ms")
    return 0


def _profile(args):
    rows = []
    for p in args.inputs:
        rows.extend(read_results(p))
    curves = performance_profile(table_from_results(rows, args.metric))
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "profile.csv")
    write_profile(curves, path)
    emit_plots([path], args.out)
    print(f"wrote {path}")
    return 0


def _generate(args):
    params = {"n": args.n}
    extra = {"p": args.p, "k": args.k, "grid": args.grid, "max_tw_width": args.max_tw_width}
    allowed = {"coloring": ("p", "k"), "tsptw": ("grid", "max_tw_width")}[args.problem]
    for key, value in extra.items():
        if value is None:
            continue
        if key not in allowed:
            print(f"--{key.replace('_', '-')} does not apply to {args.problem}", file=sys.stderr)
            return 2
        params[key] = value
    problem = get_problem(args.problem, **params)
    os.makedirs(args.out, exist_ok=True)
    for i, seed in enumerate(instance_seeds(args.seed, args.count)):
        problem.write(problem.generate(seed),
                      os.path.join(args.out, f"{args.problem}_{i:04d}{problem.suffix}"))
    print(f"wrote {args.count} instances to {args.out}")
    return 0


def _plot(args):
    for p in emit_plots(args.inputs, args.out):
        print(f"wrote {p}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="learnbranch", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train an agent from a JSON run config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override output_dir")
    p.set_defaults(func=_train)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint and/or baselines")
    p.add_argument("--checkpoint")
    p.add_argument("--instances", required=True)
    p.add_argument("--baseline", action="append", help="repeatable")
    p.add_argument("--problem", choices=sorted(PROBLEMS))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--node-limit", type=int, default=5000)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--out", default="evaluation")
    p.set_defaults(func=_evaluate)

    p = sub.add_parser("profile", help="performance profiles from eval_results CSVs")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--metric", default="nodes_avg", choices=["nodes_avg", "nodes_best",
                                                             "nodes_worst"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_profile)

    p = sub.add_parser("generate", help="write random instances")
    p.add_argument("--problem", required=True, choices=sorted(PROBLEMS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--max-tw-width", type=int)
    p.set_defaults(func=_generate)

    p = sub.add_parser("plot", help="render curve/profile CSVs as SVG")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_plot)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
