"""Run configuration for training/evaluation runs (JSON on disk)."""

import dataclasses
import json

from ..dqn import AgentConfig
from ..env import RewardSpec
from ..problems import PROBLEMS, get_problem

DEFAULT_SEEDS = {"train": 0, "validation": 1, "test": 2, "agent": 33, "baseline": 7}


@dataclasses.dataclass
class RunConfig:
    problem: str = "coloring"
    generator: dict = dataclasses.field(default_factory=dict)
    agent: dict = dataclasses.field(default_factory=dict)
    reward: dict = dataclasses.field(default_factory=dict)
    episodes: int = 500
    eval_every: int = 30
    eval_set_size: int = 10
    test_set_size: int = 0
    baseline_trials: int = 200
    node_limit: int | None = 5000
    time_limit: float | None = None
    select: str = "best"
    seeds: dict = dataclasses.field(default_factory=dict)
    output_dir: str = "run"

    def __post_init__(self):
        self.seeds = {**DEFAULT_SEEDS, **self.seeds}

    def errors(self):
        """Every problem with the config, as a list of messages."""
        out = []
        if self.problem not in PROBLEMS:
            out.append(f"problem must be one of {sorted(PROBLEMS)}, got {self.problem!r}")
        else:
            try:
                get_problem(self.problem, **self.generator)
            except (TypeError, ValueError) as exc:
                out.append(f"generator: {exc}")
        try:
            agent_config(self)
        except (TypeError, ValueError) as exc:
            out.append(f"agent: {exc}")
        try:
            RewardSpec(**self.reward)
        except (TypeError, ValueError) as exc:
            out.append(f"reward: {exc}")
        for name in ("episodes", "test_set_size"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 0:
                out.append(f"{name} must be a non-negative integer")
        for name in ("eval_every", "eval_set_size", "baseline_trials"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) <= 0:
                out.append(f"{name} must be a positive integer")
        if self.node_limit is not None and self.node_limit <= 0:
            out.append("node_limit must be positive or null")
        if self.time_limit is not None and self.time_limit <= 0:
            out.append("time_limit must be positive or null")
        if self.select not in ("best", "final"):
            out.append("select must be 'best' or 'final'")
        unknown = set(self.seeds) - set(DEFAULT_SEEDS)
        if unknown:
            out.append(f"unknown seeds {sorted(unknown)}")
        if any(not isinstance(v, int) for v in self.seeds.values()):
            out.append("seeds must be integers")
        return out

    def validate(self):
        errs = self.errors()
        if errs:
            raise ValueError("invalid run config:\n  " + "\n  ".join(errs))
        return self

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - fields
        if unknown:
            raise ValueError(f"unknown run config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def agent_config(config):
    """AgentConfig from the overrides; the agent seed lives in ``seeds``."""
    if "seed" in config.agent:
        raise ValueError("set the agent seed through seeds.agent")
    return AgentConfig.from_dict({**config.agent, "seed": config.seeds["agent"]})
