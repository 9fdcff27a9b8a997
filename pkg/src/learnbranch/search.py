"""Depth-first branch-and-bound with pluggable variable/value selection.

Branching is binary: the left child assigns ``var = value``, the right child
removes ``value`` from ``var``. Every child entered counts as one node
(the fix-point runs there), right branches included.
"""

import dataclasses
import enum
import time

import numpy as np

from .cp import ChangeEvent


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    LIMIT = "limit"


@dataclasses.dataclass
class SearchStatistics:
    nodes_visited: int = 0
    backtracks: int = 0
    solutions_found: int = 0
    decisions: int = 0
    depth: int = 0
    best_objective: int | None = None
    last_node_revisit: bool = False
    limit_reached: bool = False

    def copy(self):
        return dataclasses.replace(self)


@dataclasses.dataclass
class SearchResult:
    status: Status
    best_solution: dict | None
    best_objective: int | None
    stats: SearchStatistics
    wall_time: float
    solutions: list = dataclasses.field(default_factory=list)


class ValueHeuristic:
    """Chooses the value to branch on. Learning heuristics use the hooks."""

    def on_start(self, model, stats):
        pass

    def select(self, model, var, stats):
        raise NotImplementedError

    def on_failure(self, model, stats):
        pass

    def on_solution(self, model, stats):
        pass

    def on_terminal(self, result):
        pass

    def __call__(self, model, var, stats):
        return self.select(model, var, stats)


class MinValue(ValueHeuristic):
    def select(self, model, var, stats):
        return var.min


class RandomValue(ValueHeuristic):
    def __init__(self, seed=None):
        self.rng = np.random.default_rng(seed)

    def select(self, model, var, stats):
        vals = var.domain.values()
        return int(vals[self.rng.integers(vals.size)])


class FunctionHeuristic(ValueHeuristic):
    """Adapts a plain ``f(model, var, stats) -> value`` callable."""

    def __init__(self, fn):
        self.fn = fn

    def select(self, model, var, stats):
        return self.fn(model, var, stats)


def select_variable_min_domain(model):
    """Unbound variable with the smallest domain, lowest id on ties."""
    best = None
    for v in model.decision_variables():
        size = v.domain.size
        if size > 1 and (best is None or size < best.domain.size):
            best = v
    return best


def select_variable_in_order(model):
    """First unbound decision variable in declaration order."""
    for v in model.decision_variables():
        if v.domain.size > 1:
            return v
    return None


def branch(model, var, value):
    """The two children of a decision, left first."""
    if value not in var:
        raise ValueError(f"{value} is not in the domain of {var!r}")
    return ("assign", var, value), ("remove", var, value)


def _apply(action):
    kind, var, value = action
    if kind == "assign":
        return var.assign(value) is not ChangeEvent.EMPTY
    return var.remove(value) is not ChangeEvent.EMPTY


def _as_heuristic(h):
    if h is None:
        return MinValue()
    if isinstance(h, ValueHeuristic):
        return h
    return FunctionHeuristic(h)


def dfs_solve(model, variable_heuristic=select_variable_min_domain,
              value_heuristic=None, node_limit=None, time_limit=None):
    """Explore the binary search tree depth-first.

    With an objective, each solution ``z`` tightens the objective to
    ``z - 1`` on every later node and the search goes on until the tree is
    exhausted. Without one, the first solution ends the search. The model is
    rolled back to its pre-search state on return.
    """
    value_heuristic = _as_heuristic(value_heuristic)
    stats = SearchStatistics()
    trailer = model.trailer
    objective = model.objective
    start = time.perf_counter()
    base = trailer.save_state()
    model.schedule_all()
    value_heuristic.on_start(model, stats)

    best = None
    solutions = []
    hit_limit = False
    # (restore level, action, depth, entered by backtracking)
    stack = [(base, None, 0, False)]
    while stack:
        if node_limit is not None and stats.nodes_visited >= node_limit:
            hit_limit = True
            break
        if time_limit is not None and time.perf_counter() - start > time_limit:
            hit_limit = True
            break
        level, action, depth, revisit = stack.pop()
        trailer.restore_state(level)
        trailer.save_state()
        stats.nodes_visited += 1
        stats.depth = depth
        stats.last_node_revisit = revisit

        ok = action is None or _apply(action)
        if ok and objective is not None and stats.best_objective is not None:
            ok = objective.remove_above(stats.best_objective - 1) is not ChangeEvent.EMPTY
        ok = ok and model.fix_point()
        if not ok:
            model.clear_queue()
            stats.backtracks += 1
            value_heuristic.on_failure(model, stats)
            continue

        var = variable_heuristic(model)
        if var is None:
            var = next((v for v in model.variables if not v.is_bound()), None)
        if var is None:
            solution = model.assignment()
            if not model.check(solution):
                raise AssertionError(f"propagation accepted an invalid solution {solution}")
            best = solution
            stats.solutions_found += 1
            if objective is not None:
                z = solution[objective.id]
                if stats.best_objective is not None and z >= stats.best_objective:
                    raise AssertionError("branch-and-bound produced a non-improving solution")
                stats.best_objective = z
                solutions.append(z)
            value_heuristic.on_solution(model, stats)
            if objective is None:
                break
            continue

        value = value_heuristic.select(model, var, stats)
        stats.decisions += 1
        left, right = branch(model, var, value)
        node_level = trailer.save_state()
        stack.append((node_level, right, depth + 1, True))
        stack.append((node_level, left, depth + 1, False))

    trailer.restore_state(base)
    model.clear_queue()
    if hit_limit:
        status = Status.LIMIT
        stats.limit_reached = True
    elif best is None:
        status = Status.INFEASIBLE
    else:
        status = Status.OPTIMAL
    result = SearchResult(
        status=status,
        best_solution=best,
        best_objective=None if best is None or objective is None else best[objective.id],
        stats=stats,
        wall_time=time.perf_counter() - start,
        solutions=solutions,
    )
    value_heuristic.on_terminal(result)
    return result


def count_all_solutions(model, variable_heuristic=select_variable_min_domain):
    """Number of satisfying assignments, by exhaustive DFS."""
    if model.objective is not None:
        raise ValueError("count_all_solutions needs a model without objective")
    trailer = model.trailer
    base = trailer.save_state()
    model.schedule_all()
    count = 0
    stack = [(base, None)]
    while stack:
        level, action = stack.pop()
        trailer.restore_state(level)
        trailer.save_state()
        if not ((action is None or _apply(action)) and model.fix_point()):
            model.clear_queue()
            continue
        var = variable_heuristic(model)
        if var is None:
            var = next((v for v in model.variables if not v.is_bound()), None)
        if var is None:
            count += 1
            continue
        left, right = branch(model, var, var.min)
        node_level = trailer.save_state()
        stack.append((node_level, right))
        stack.append((node_level, left))
    trailer.restore_state(base)
    return count
