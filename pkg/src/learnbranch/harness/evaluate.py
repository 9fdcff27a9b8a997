"""Evaluation of learned and hand-written heuristics on an instance set.

Node counts and objectives are deterministic and go to ``eval_results.csv``.
Wall-clock figures are not, so they are kept in ``eval_timing.csv``.
"""

import dataclasses
import os

import numpy as np

from ..dqn import DQNAgent
from ..env import episode_run
from ..search import Status, dfs_solve
from .csvio import optional_int, read_csv, write_csv

RESULT_COLUMNS = ["instance", "solver", "trials", "status", "nodes_avg", "nodes_best",
                  "nodes_worst", "objective", "failures"]
TIMING_COLUMNS = ["instance", "solver", "trials", "wall_time", "nodes_total", "time_per_node"]

LEARNED = "learned"


@dataclasses.dataclass
class EvalRow:
    instance: str
    solver: str
    trials: int
    status: str
    nodes_avg: float
    nodes_best: int
    nodes_worst: int
    objective: int | None
    failures: int
    wall_time: float
    nodes_total: int

    @property
    def failed(self):
        return self.failures > 0

    @property
    def time_per_node(self):
        return self.wall_time / max(1, self.nodes_total)

    def result_record(self):
        return [self.instance, self.solver, self.trials, self.status, f"{self.nodes_avg:.4f}",
                self.nodes_best, self.nodes_worst,
                "" if self.objective is None else self.objective, self.failures]

    def timing_record(self):
        return [self.instance, self.solver, self.trials, f"{self.wall_time:.6f}",
                self.nodes_total, f"{self.time_per_node:.9f}"]


def instance_seeds(seed, count):
    """``count`` reproducible generator seeds drawn from ``seed``."""
    return [int(s) for s in np.random.default_rng(seed).integers(0, 2**31 - 1, size=count)]


def _row(name, solver, results):
    nodes = np.array([r.stats.nodes_visited for r in results])
    fails = sum(r.status is not Status.OPTIMAL for r in results)
    if fails == 0:
        status = Status.OPTIMAL.value
    else:
        bad = next(r for r in results if r.status is not Status.OPTIMAL)
        status = bad.status.value
    objs = [r.best_objective for r in results if r.status is Status.OPTIMAL]
    return EvalRow(
        instance=name, solver=solver, trials=len(results), status=status,
        nodes_avg=float(nodes.mean()), nodes_best=int(nodes.min()), nodes_worst=int(nodes.max()),
        objective=objs[0] if objs else None, failures=int(fails),
        wall_time=float(sum(r.wall_time for r in results)), nodes_total=int(nodes.sum()))


def run_learned(problem, agent, instance, node_limit=None, time_limit=None):
    """One greedy (ε = 0) episode; the agent is left untouched."""
    model = problem.build_model(instance)
    result, _ = episode_run(model, agent.greedy(), problem.encoder(instance), training=False,
                            variable_heuristic=problem.variable_heuristic,
                            node_limit=node_limit, time_limit=time_limit)
    return result


def run_baseline(problem, name, instance, seed=None, node_limit=None, time_limit=None):
    model = problem.build_model(instance)
    return dfs_solve(model, problem.variable_heuristic, problem.baseline(name, seed),
                     node_limit=node_limit, time_limit=time_limit)


def evaluate_solver(problem, solver, instances, names=None, trials=200, seed=0,
                    node_limit=None, time_limit=None):
    """Rows for one solver over ``instances``.

    ``solver`` is a :class:`DQNAgent` or a baseline name. The random baseline
    runs ``trials`` seeded trials per instance; everything else runs once.
    Runs that stop at a limit are reported as failure rows.
    """
    names = names if names is not None else [f"inst{i:03d}" for i in range(len(instances))]
    if len(names) != len(instances):
        raise ValueError("need one name per instance")
    rows = []
    for i, (name, inst) in enumerate(zip(names, instances)):
        if isinstance(solver, DQNAgent):
            results = [run_learned(problem, solver, inst, node_limit, time_limit)]
            label = LEARNED
        elif solver == "random":
            results = [run_baseline(problem, "random", inst, _trial_seed(seed, i, t),
                                    node_limit, time_limit) for t in range(trials)]
            label = solver
        else:
            results = [run_baseline(problem, solver, inst, None, node_limit, time_limit)]
            label = solver
        rows.append(_row(name, label, results))
    return rows


def _trial_seed(seed, instance_index, trial):
    # one independent stream per (run seed, instance, trial)
    return np.random.SeedSequence([seed, instance_index, trial])


def evaluate(problem, solvers, instances, names=None, trials=200, seed=0, node_limit=None,
             time_limit=None):
    rows = []
    for s in solvers:
        rows.extend(evaluate_solver(problem, s, instances, names, trials, seed, node_limit,
                                    time_limit))
    return rows


def write_results(rows, path):
    write_csv(path, RESULT_COLUMNS, [r.result_record() for r in rows])


def write_timing(rows, path):
    write_csv(path, TIMING_COLUMNS, [r.timing_record() for r in rows])


def read_results(path):
    """Rows of an ``eval_results.csv`` as dicts with typed values."""
    return read_csv(path, RESULT_COLUMNS,
                    [str, str, int, str, float, int, int, optional_int, int])


def load_instances(problem, directory):
    """(names, instances) for every file with the problem's suffix, sorted."""
    files = sorted(f for f in os.listdir(directory) if f.endswith(problem.suffix))
    if not files:
        raise ValueError(f"no {problem.suffix} files in {directory}")
    names = [os.path.splitext(f)[0] for f in files]
    return names, [problem.read(os.path.join(directory, f)) for f in files]
