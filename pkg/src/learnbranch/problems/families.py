"""Problem families: generator + model builder + encoder + action space."""

import os

from ..encoding import TSPTW_FEATURES, FeatureConfig, encode_tripartite, encode_tsptw
from ..nn import default_spec
from ..search import select_variable_in_order, select_variable_min_domain
from . import coloring, tsptw
from .baselines import make_baseline


class ColoringProblem:
    name = "coloring"
    suffix = ".col"
    baselines = ("min_value", "random")
    variable_heuristic = staticmethod(select_variable_min_domain)

    def __init__(self, n=10, p=0.5, k=4, head="per_node"):
        if head not in ("branching", "per_node"):
            raise ValueError(f"unknown head {head!r}")
        self.n, self.p, self.k, self.head = n, p, k, head
        # slot v <-> color v; k itself ranges over 0..n
        self.features = FeatureConfig(n_actions=n + 1)

    @property
    def params(self):
        return {"n": self.n, "p": self.p, "k": self.k, "head": self.head}

    @property
    def n_actions(self):
        return self.features.n_actions

    def generate(self, seed):
        return coloring.generate_gc(self.n, self.p, self.k, seed)

    def build_model(self, instance):
        return coloring.build_gc_model(instance)

    def encoder(self, instance):
        cfg = self.features
        return lambda model, var, stats: encode_tripartite(model, var, stats, cfg)

    def network_spec(self):
        return default_spec(self.features.n_features, self.n_actions, head=self.head)

    def baseline(self, name, seed=None):
        if name not in self.baselines:
            raise ValueError(f"baseline {name!r} does not apply to {self.name}")
        return make_baseline(name, seed)

    def brute_force(self, instance):
        return coloring.brute_force_chromatic(instance)

    def write(self, instance, path):
        coloring.write_dimacs(instance, path)

    def read(self, path):
        return coloring.read_dimacs(path)


class TSPTWProblem:
    name = "tsptw"
    suffix = ".tsptw"
    baselines = ("closest_city", "random")
    variable_heuristic = staticmethod(select_variable_in_order)

    def __init__(self, n=6, grid=100, max_tw_width=500):
        self.n, self.grid, self.max_tw_width = n, grid, max_tw_width

    @property
    def params(self):
        return {"n": self.n, "grid": self.grid, "max_tw_width": self.max_tw_width}

    @property
    def n_actions(self):
        return self.n

    def generate(self, seed):
        return tsptw.generate_tsptw(self.n, self.grid, self.max_tw_width, seed)

    def build_model(self, instance):
        return tsptw.build_tsptw_model(instance)

    def encoder(self, instance):
        return lambda model, var, stats: encode_tsptw(instance, model, var=var)

    def network_spec(self):
        return default_spec(TSPTW_FEATURES, self.n_actions, head="per_node", edge_dim=1)

    def baseline(self, name, seed=None):
        if name not in self.baselines:
            raise ValueError(f"baseline {name!r} does not apply to {self.name}")
        return make_baseline(name, seed)

    def brute_force(self, instance):
        return tsptw.brute_force_tsptw(instance)

    def write(self, instance, path):
        tsptw.write_tsptw(instance, path)

    def read(self, path):
        return tsptw.read_tsptw(path, self.grid)


PROBLEMS = {"coloring": ColoringProblem, "tsptw": TSPTWProblem}


def get_problem(name, **params):
    try:
        cls = PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
    return cls(**params)


def problem_for_path(path):
    ext = os.path.splitext(path)[1]
    for cls in PROBLEMS.values():
        if cls.suffix == ext:
            return cls
    raise ValueError(f"cannot tell the problem of {path!r} from its extension")
