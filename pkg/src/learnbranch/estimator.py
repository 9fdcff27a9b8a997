"""scikit-learn style front end: fit a value selector, predict search effort."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .dqn import AgentConfig, DQNAgent
from .harness.evaluate import instance_seeds, run_learned
from .harness.train import train_episode
from .problems import GraphColoringInstance, TSPTWInstance, get_problem

_INSTANCE_TYPES = {"coloring": GraphColoringInstance, "tsptw": TSPTWInstance}


def check_problem_params(problem, problem_params):
    if problem not in _INSTANCE_TYPES:
        raise ValueError(f"problem must be one of {sorted(_INSTANCE_TYPES)}, got {problem!r}")
    return get_problem(problem, **(problem_params or {}))


def check_instances(X, problem):
    """Validate a collection of instances for ``problem`` and return it as a list.

    Coloring instances may have fewer vertices than the action space allows;
    TSPTW instances must have exactly ``problem.n`` cities.
    """
    if X is None or isinstance(X, (str, bytes)):
        raise TypeError("expected a sequence of problem instances")
    try:
        items = list(X)
    except TypeError:
        raise TypeError("expected a sequence of problem instances") from None
    if not items:
        raise ValueError("need at least one instance")
    cls = _INSTANCE_TYPES[problem.name]
    for i, inst in enumerate(items):
        if not isinstance(inst, cls):
            raise TypeError(f"item {i} is a {type(inst).__name__}, expected {cls.__name__}")
        if problem.name == "coloring" and inst.n_vertex > problem.n:
            raise ValueError(f"item {i} has {inst.n_vertex} vertices; the selector "
                             f"handles at most {problem.n}")
        if problem.name == "tsptw" and inst.n != problem.n:
            raise ValueError(f"item {i} has {inst.n} cities, expected {problem.n}")
    return items


class LearnedValueSelector(BaseEstimator):
    """DQN value-selection heuristic behind fit/predict.

    ``fit(X)`` trains for ``episodes`` episodes, cycling through ``X`` in a
    shuffled order; with ``X=None`` a fresh instance is generated for every
    episode. ``predict(X)`` returns the nodes the greedy policy needs to prove
    optimality on each instance.
    """

    def __init__(self, problem="coloring", problem_params=None, episodes=500,
                 agent_params=None, node_limit=5000, random_state=0):
        self.problem = problem
        self.problem_params = problem_params
        self.episodes = episodes
        self.agent_params = agent_params
        self.node_limit = node_limit
        self.random_state = random_state

    def _check_params(self):
        problem = check_problem_params(self.problem, self.problem_params)
        if not isinstance(self.episodes, (int, np.integer)) or self.episodes < 0:
            raise ValueError("episodes must be a non-negative integer")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node_limit must be positive or None")
        return problem

    def fit(self, X=None, y=None):
        problem = self._check_params()
        seed = 0 if self.random_state is None else int(self.random_state)
        config = AgentConfig.from_dict({"seed": seed, **(self.agent_params or {})})
        agent = DQNAgent(problem.network_spec(), config)
        agent.meta = {"problem": problem.name, "params": problem.params}
        if X is None:
            stream = (problem.generate(s) for s in instance_seeds(seed, self.episodes))
        else:
            items = check_instances(X, problem)
            rng = np.random.default_rng(seed)
            order = np.concatenate([rng.permutation(len(items))
                                    for _ in range(-(-self.episodes // len(items)))])
            stream = (items[i] for i in order[:self.episodes])
        nodes = []
        for inst in stream:
            result, _ = train_episode(problem, agent, inst, node_limit=self.node_limit)
            nodes.append(result.stats.nodes_visited)
        self.problem_ = problem
        self.agent_ = agent
        self.train_nodes_ = np.array(nodes, dtype=np.int64)
        self.n_episodes_ = len(nodes)
        return self

    def solve(self, X):
        """Greedy search results, one per instance."""
        check_is_fitted(self, "agent_")
        items = check_instances(X, self.problem_)
        return [run_learned(self.problem_, self.agent_, inst, self.node_limit) for inst in items]

    def predict(self, X):
        return np.array([r.stats.nodes_visited for r in self.solve(X)], dtype=np.int64)

    def score(self, X, y=None):
        """Negative mean node count (higher is better)."""
        return -float(np.mean(self.predict(X)))
