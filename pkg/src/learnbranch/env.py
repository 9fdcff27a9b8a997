"""The solver seen as an RL environment.

A state is the encoded graph at a value decision, an action is a value slot,
and everything the solver does until the next decision (propagation, failed
right branches, backtracking) is the transition. Right branches consume no
action.
"""

import dataclasses

from .dqn import Transition
from .encoding import value_of_action
from .search import ValueHeuristic, dfs_solve, select_variable_min_domain


class IllegalActionError(RuntimeError):
    """The agent chose a value outside the branching variable's domain."""


@dataclasses.dataclass
class RewardSpec:
    """``step_penalty`` gives -1 per decision.

    ``two_term`` (a configurable shaping, not a fixed standard formula)
    returns ``-w_feas * Σ unassigned-at-failure - w_obj * Δ`` where ``Δ`` is
    how far the objective's lower bound rose since the previous decision,
    divided by ``obj_scale``.
    """

    kind: str = "step_penalty"
    w_feas: float = 1.0
    w_obj: float = 0.01
    obj_scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("step_penalty", "two_term"):
            raise ValueError(f"unknown reward kind {self.kind!r}")

    def __call__(self, events):
        if self.kind == "step_penalty":
            return default_reward(events)
        return two_term_reward(events, self.w_feas, self.w_obj, self.obj_scale)


def default_reward(events):
    return -1.0


def two_term_reward(events, w_feas, w_obj, obj_scale=1.0):
    """``events``: dicts with ``kind`` in {failure, bound} and a ``value``.

    failure -> number of unassigned variables when the node failed;
    bound   -> rise of the objective lower bound.
    """
    unassigned = sum(e["value"] for e in events if e["kind"] == "failure")
    degradation = sum(e["value"] for e in events if e["kind"] == "bound") / obj_scale
    return -w_feas * unassigned - w_obj * degradation


class LearnedHeuristic(ValueHeuristic):
    """Value heuristic driven by an agent's Q-network.

    ``encoder(model, var, stats) -> Graph``. With ``training`` the agent
    explores and every completed transition goes to ``agent.observe``.
    """

    def __init__(self, agent, encoder, reward=None, training=False):
        self.agent = agent
        self.encoder = encoder
        self.reward = reward if reward is not None else RewardSpec()
        self.training = training
        self.transitions = []
        self._pending = None
        self._events = []
        self._lower = None

    def on_start(self, model, stats):
        self.transitions = []
        self._pending = None
        self._events = []
        self._model = model
        self._lower = None if model.objective is None else model.objective.min

    def _emit(self, next_state, done):
        state, action = self._pending
        t = Transition(state, action, self.reward(self._events), next_state, done)
        self.transitions.append(t)
        self._events = []
        if self.training:
            self.agent.observe(t)

    def select(self, model, var, stats):
        graph = self.encoder(model, var, stats)
        if model.objective is not None:
            low = model.objective.min
            if self._lower is not None and low > self._lower:
                self._events.append({"kind": "bound", "value": low - self._lower})
            self._lower = low
        if self._pending is not None:
            self._emit(graph, False)
        action = self.agent.act(graph, training=self.training)
        try:
            value = value_of_action(graph, action)
        except ValueError as exc:
            raise IllegalActionError(str(exc)) from exc
        if value not in var:
            raise IllegalActionError(f"value {value} not in domain of {var!r}")
        self._pending = (graph, action)
        return value

    def on_failure(self, model, stats):
        unassigned = sum(1 for v in model.decision_variables() if not v.is_bound())
        self._events.append({"kind": "failure", "value": unassigned})

    def on_terminal(self, result):
        if self._pending is not None:
            self._emit(None, True)
            self._pending = None


def episode_run(model, agent, encoder, reward_spec=None, training=False,
                variable_heuristic=select_variable_min_domain, node_limit=None,
                time_limit=None):
    """Solve ``model`` with the agent choosing values; returns (result, transitions).

    A node or time limit ends the episode like reaching optimality does
    (last transition has ``done``); ``result.stats.limit_reached`` flags it.
    """
    heuristic = LearnedHeuristic(agent, encoder, reward_spec, training)
    result = dfs_solve(model, variable_heuristic, heuristic, node_limit=node_limit,
                       time_limit=time_limit)
    return result, heuristic.transitions
