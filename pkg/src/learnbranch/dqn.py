"""Deep Q-learning: replay, n-step targets, target network, ε-greedy."""

import dataclasses
import json
import math

import numpy as np

from .nn import Adam, GraphBatch, NetworkSpec, QNetwork, backward, huber_loss
from .nn import tensor as T
from .nn.params import params_from_json, params_to_json

AGENT_CHECKPOINT_VERSION = 1


@dataclasses.dataclass
class AgentConfig:
    gamma: float = 0.9999
    lr: float = 0.0005
    batch_size: int = 32
    update_horizon: int = 25
    min_replay_history: int = 1
    update_freq: int = 10
    target_update_freq: int = 200
    buffer_capacity: int = 8000
    eps_init: float = 1.0
    eps_stable: float = 0.001
    decay_steps: int = 5000
    warmup_steps: int = 0
    double_dqn: bool = False
    seed: int = 33

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]")
        for name in ("lr", "batch_size", "update_horizon", "min_replay_history",
                     "update_freq", "target_update_freq", "buffer_capacity",
                     "decay_steps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be >= 0")
        if not 0 <= self.eps_stable <= self.eps_init <= 1:
            raise ValueError("need 0 <= eps_stable <= eps_init <= 1")

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - fields
        if unknown:
            raise ValueError(f"unknown agent settings: {sorted(unknown)}")
        return cls(**d)


@dataclasses.dataclass
class Transition:
    state: object
    action: int
    reward: float
    next_state: object
    done: bool

    @property
    def next_legal_mask(self):
        return None if self.done else self.next_state.action_mask


def epsilon(step, config):
    decay = max(0, step - config.warmup_steps) / config.decay_steps
    return config.eps_stable + (config.eps_init - config.eps_stable) * math.exp(-decay)


def masked_argmax(scores, legal_mask):
    legal_mask = np.asarray(legal_mask, dtype=bool)
    if not legal_mask.any():
        raise ValueError("no legal action")
    # np.argmax returns the first maximum: lowest index wins ties
    return int(np.argmax(np.where(legal_mask, scores, -np.inf)))


def select_action(q_scores, legal_mask, step, training, rng, config, eps=None):
    legal_mask = np.asarray(legal_mask, dtype=bool)
    if not legal_mask.any():
        raise ValueError("no legal action")
    if training:
        e = epsilon(step, config) if eps is None else eps
        if rng.random() < e:
            legal = np.flatnonzero(legal_mask)
            return int(legal[rng.integers(legal.size)])
    return masked_argmax(q_scores, legal_mask)


class ReplayBuffer:
    """Fixed-capacity ring of transitions in arrival order."""

    def __init__(self, capacity):
        self.capacity = capacity
        self._items = [None] * capacity
        self._cursor = 0
        self.size = 0

    def __len__(self):
        return self.size

    def push(self, transition):
        self._items[self._cursor] = transition
        self._cursor = (self._cursor + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def __getitem__(self, i):
        """``i``-th stored transition, oldest first."""
        if not 0 <= i < self.size:
            raise IndexError(i)
        start = (self._cursor - self.size) % self.capacity
        return self._items[(start + i) % self.capacity]

    def contents(self):
        return [self[i] for i in range(self.size)]

    def sample_indices(self, n, rng):
        if n > self.size:
            raise ValueError(f"cannot sample {n} from {self.size} transitions")
        return rng.choice(self.size, size=n, replace=False)

    def sample(self, n, rng):
        return [self[int(i)] for i in self.sample_indices(n, rng)]

    def window(self, i, horizon):
        """Transitions ``i, i+1, ...`` up to ``horizon`` long, cut after a terminal."""
        out = []
        for j in range(i, min(self.size, i + horizon)):
            t = self[j]
            out.append(t)
            if t.done:
                break
        return out


def nstep_parts(window, gamma):
    """Discounted reward sum, bootstrap discount and bootstrap transition."""
    ret = 0.0
    for k, t in enumerate(window):
        ret += gamma ** k * t.reward
    last = window[-1]
    if last.done:
        return ret, 0.0, None
    return ret, gamma ** len(window), last


def compute_nstep_target(window, bootstrap_value, gamma):
    """``Σ γ^k r_{t+k} + γ^h · max_legal Q_target(s_{t+h})``.

    ``window`` is the slice of transitions from t, already cut at the
    horizon or at the first terminal; ``bootstrap_value`` is either a number
    or a callable on the bootstrap state.
    """
    ret, disc, last = nstep_parts(window, gamma)
    if last is None:
        return ret
    value = bootstrap_value(last.next_state) if callable(bootstrap_value) else bootstrap_value
    return ret + disc * value


class DQNLearner:
    def __init__(self, spec, config, dtype=np.float32, seed=None):
        seed = config.seed if seed is None else seed
        self.spec = spec
        self.config = config
        self.online = QNetwork(spec, seed=seed, dtype=dtype)
        self.target = QNetwork(spec, seed=seed, dtype=dtype)
        self.target.copy_from(self.online)
        self.optimizer = Adam(self.online.params, lr=config.lr)
        self.updates = 0
        self.syncs = 0

    def sync_target(self):
        self.target.copy_from(self.online)
        self.syncs += 1

    def bootstrap_values(self, states):
        """max over legal actions of the target network, per state."""
        if not states:
            return np.zeros(0)
        batch = GraphBatch(states, self.online.dtype)
        with T.no_grad():
            q_target = self.target.forward(batch).data.astype(np.float64)
            if self.config.double_dqn:
                q_online = self.online.forward(batch).data
        masks = batch.masks
        if self.config.double_dqn:
            best = np.argmax(np.where(masks, q_online, -np.inf), axis=1)
            return q_target[np.arange(len(states)), best]
        return np.where(masks, q_target, -np.inf).max(axis=1)

    def targets(self, windows):
        cfg = self.config
        parts = [nstep_parts(w, cfg.gamma) for w in windows]
        boot = [p[2].next_state for p in parts if p[2] is not None]
        values = iter(self.bootstrap_values(boot))
        return np.array([ret + (disc * next(values) if last is not None else 0.0)
                         for ret, disc, last in parts])

    def update(self, batch_transitions, targets):
        """One gradient step of Huber(Q(s, a), target); returns the loss."""
        states = [t.state for t in batch_transitions]
        actions = np.array([t.action for t in batch_transitions])
        batch = GraphBatch(states, self.online.dtype)
        params = self.online.params
        params.zero_grad()
        q = self.online.forward(batch)
        chosen = T.pick(q, np.arange(len(states)), actions)
        loss = huber_loss(chosen, targets)
        backward(loss)
        self.optimizer.step()
        self.updates += 1
        if self.updates % self.config.target_update_freq == 0:
            self.sync_target()
        return float(loss.data)


class DQNAgent:
    """Acting + learning. One env step is one value decision."""

    def __init__(self, spec, config=None, dtype=np.float32):
        self.config = config if config is not None else AgentConfig()
        self.spec = spec
        self.learner = DQNLearner(spec, self.config, dtype=dtype)
        self.buffer = ReplayBuffer(self.config.buffer_capacity)
        self.rng = np.random.default_rng(self.config.seed)
        self.steps = 0
        self.losses = []
        # free-form run information stored with checkpoints (problem, params)
        self.meta = {}

    def q_values(self, state):
        return self.learner.online.scores([state])[0]

    def act(self, state, training=False):
        q = self.q_values(state)
        action = select_action(q, state.action_mask, self.steps, training, self.rng, self.config)
        if training:
            self.steps += 1
        return action

    def observe(self, transition):
        if not transition.state.action_mask[transition.action]:
            raise ValueError("transition records an illegal action")
        self.buffer.push(transition)
        cfg = self.config
        if self.steps % cfg.update_freq == 0 and len(self.buffer) >= cfg.min_replay_history:
            self.losses.append(self.update())

    def update(self):
        cfg = self.config
        n = min(cfg.batch_size, len(self.buffer))
        idx = self.buffer.sample_indices(n, self.rng)
        windows = [self.buffer.window(int(i), cfg.update_horizon) for i in idx]
        targets = self.learner.targets(windows)
        return self.learner.update([w[0] for w in windows], targets)

    def greedy(self):
        return GreedyPolicy(self)

    def save(self, path):
        obj = {
            "version": AGENT_CHECKPOINT_VERSION,
            "config": self.config.to_dict(),
            "spec": self.spec.to_dict(),
            "dtype": str(self.learner.online.dtype),
            "steps": self.steps,
            "updates": self.learner.updates,
            "online": params_to_json(self.learner.online.params.state_dict()),
            "target": params_to_json(self.learner.target.params.state_dict()),
            "meta": self.meta,
        }
        with open(path, "w") as fh:
            json.dump(obj, fh)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            obj = json.load(fh)
        if obj.get("version") != AGENT_CHECKPOINT_VERSION:
            raise ValueError(f"unsupported agent checkpoint version {obj.get('version')}")
        agent = cls(NetworkSpec.from_dict(obj["spec"]), AgentConfig.from_dict(obj["config"]),
                    dtype=np.dtype(obj["dtype"]))
        agent.learner.online.params.load_state_dict(params_from_json(obj["online"]))
        agent.learner.target.params.load_state_dict(params_from_json(obj["target"]))
        agent.steps = obj["steps"]
        agent.learner.updates = obj["updates"]
        agent.meta = obj.get("meta", {})
        return agent


class GreedyPolicy:
    """Frozen ε = 0 view of an agent."""

    def __init__(self, agent):
        self.agent = agent

    def act(self, state, training=False):
        return masked_argmax(self.agent.q_values(state), state.action_mask)
