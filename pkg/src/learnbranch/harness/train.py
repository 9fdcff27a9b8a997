"""Training runs: one fresh instance per episode, periodic greedy validation."""

import dataclasses
import logging
import os
import time

import numpy as np

from ..dqn import DQNAgent
from ..env import RewardSpec, episode_run
from ..problems import get_problem
from ..search import Status
from .config import RunConfig, agent_config
from .csvio import EPISODE_COLUMNS, TRAIN_CURVE_COLUMNS, write_csv
from .evaluate import (evaluate, instance_seeds, run_learned, write_results, write_timing)
from .plots import plot_curve, plot_profile
from .profile import performance_profile, table_from_results, write_profile

log = logging.getLogger(__name__)


@dataclasses.dataclass
class TrainOutcome:
    agent: DQNAgent
    selected: DQNAgent
    curve: list
    output_dir: str
    best_episode: int | None
    eval_rows: list = dataclasses.field(default_factory=list)


def make_agent(problem, config):
    agent = DQNAgent(problem.network_spec(), agent_config(config))
    agent.meta = {"problem": problem.name, "params": problem.params}
    return agent


def validate_greedy(problem, agent, instances, node_limit=None, time_limit=None):
    """Greedy nodes-to-optimality per instance, plus the failure count."""
    nodes, fails = [], 0
    for inst in instances:
        r = run_learned(problem, agent, inst, node_limit, time_limit)
        nodes.append(r.stats.nodes_visited)
        fails += r.status is not Status.OPTIMAL
    return np.array(nodes), fails


def curve_record(episode, agent, nodes, failures):
    return {"episode": episode, "agent_steps": agent.steps, "updates": agent.learner.updates,
            "n_instances": int(nodes.size), "mean_nodes": float(nodes.mean()),
            "median_nodes": float(np.median(nodes)), "best_nodes": int(nodes.min()),
            "worst_nodes": int(nodes.max()), "failures": int(failures)}


def _curve_csv(rows):
    out = []
    for r in rows:
        rec = [r[c] for c in TRAIN_CURVE_COLUMNS]
        rec[4], rec[5] = f"{rec[4]:.4f}", f"{rec[5]:.4f}"
        out.append(rec)
    return out


def train_episode(problem, agent, instance, reward=None, node_limit=None, time_limit=None):
    """One exploring episode; transitions are pushed to the agent as they happen."""
    model = problem.build_model(instance)
    return episode_run(model, agent, problem.encoder(instance), reward, training=True,
                       variable_heuristic=problem.variable_heuristic,
                       node_limit=node_limit, time_limit=time_limit)


def train(config, write_checkpoints=True):
    """Run the protocol described by ``config`` and write the run directory.

    Layout: config.json, train_curve.csv, episodes.csv, train_timing.csv,
    train_curve.svg, checkpoints/ and, with a test set, test_instances/,
    eval_results.csv, eval_timing.csv, profile.csv, profile.svg.
    """
    if not isinstance(config, RunConfig):
        config = RunConfig.from_dict(config)
    config.validate()
    problem = get_problem(config.problem, **config.generator)
    reward = RewardSpec(**config.reward)
    out = config.output_dir
    ckpt_dir = os.path.join(out, "checkpoints")
    os.makedirs(ckpt_dir, exist_ok=True)
    config.save(os.path.join(out, "config.json"))

    agent = make_agent(problem, config)
    val_instances = [problem.generate(s) for s in
                     instance_seeds(config.seeds["validation"], config.eval_set_size)]
    train_seeds = instance_seeds(config.seeds["train"], config.episodes)

    curve, episodes, timing = [], [], []
    best_mean, best_episode = None, None
    best_path = os.path.join(ckpt_dir, "best.json")
    train_time = 0.0
    for ep, seed in enumerate(train_seeds, start=1):
        inst = problem.generate(seed)
        t0 = time.perf_counter()
        result, transitions = train_episode(problem, agent, inst, reward, config.node_limit,
                                            config.time_limit)
        train_time += time.perf_counter() - t0
        episodes.append([ep, seed, result.status.value, result.stats.nodes_visited,
                         result.stats.decisions,
                         "" if result.best_objective is None else result.best_objective,
                         f"{sum(t.reward for t in transitions):.4f}", agent.steps])
        if ep % config.eval_every:
            continue
        t0 = time.perf_counter()
        nodes, fails = validate_greedy(problem, agent, val_instances, config.node_limit,
                                       config.time_limit)
        eval_time = time.perf_counter() - t0
        row = curve_record(ep, agent, nodes, fails)
        curve.append(row)
        timing.append([ep, f"{train_time:.3f}", f"{eval_time:.3f}"])
        log.info("episode %d: validation mean nodes %.2f (%d failures)", ep,
                 row["mean_nodes"], fails)
        if write_checkpoints:
            agent.save(os.path.join(ckpt_dir, f"episode_{ep:05d}.json"))
        score = row["mean_nodes"] if fails == 0 else np.inf
        if best_mean is None or score < best_mean:
            best_mean, best_episode = score, ep
            agent.save(best_path)

    agent.save(os.path.join(ckpt_dir, "final.json"))
    if best_episode is None:
        agent.save(best_path)
    write_csv(os.path.join(out, "train_curve.csv"), TRAIN_CURVE_COLUMNS, _curve_csv(curve))
    write_csv(os.path.join(out, "episodes.csv"), EPISODE_COLUMNS, episodes)
    write_csv(os.path.join(out, "train_timing.csv"),
              ["episode", "train_seconds", "eval_seconds"], timing)
    plot_curve(curve, os.path.join(out, "train_curve.svg"))

    selected = agent
    if config.select == "best" and best_episode is not None:
        selected = DQNAgent.load(best_path)
    outcome = TrainOutcome(agent, selected, curve, out, best_episode)
    if config.test_set_size:
        outcome.eval_rows = run_test(problem, selected, config)
    return outcome


def run_test(problem, agent, config):
    """Held-out comparison of the selected agent against the baselines."""
    out = config.output_dir
    seeds = instance_seeds(config.seeds["test"], config.test_set_size)
    instances = [problem.generate(s) for s in seeds]
    names = [f"test{i:03d}" for i in range(len(instances))]
    inst_dir = os.path.join(out, "test_instances")
    os.makedirs(inst_dir, exist_ok=True)
    for name, inst in zip(names, instances):
        problem.write(inst, os.path.join(inst_dir, name + problem.suffix))
    rows = evaluate(problem, [agent, *problem.baselines], instances, names,
                    trials=config.baseline_trials, seed=config.seeds["baseline"],
                    node_limit=config.node_limit, time_limit=config.time_limit)
    write_results(rows, os.path.join(out, "eval_results.csv"))
    write_timing(rows, os.path.join(out, "eval_timing.csv"))
    table = table_from_results([
        {"solver": r.solver, "instance": r.instance, "nodes_avg": r.nodes_avg,
         "failures": r.failures} for r in rows])
    curves = performance_profile(table)
    write_profile(curves, os.path.join(out, "profile.csv"))
    plot_profile(curves, os.path.join(out, "profile.svg"))
    return rows
