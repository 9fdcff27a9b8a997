"""Hand-written value selection baselines."""

from ..search import MinValue, RandomValue, ValueHeuristic
from .tsptw import current_city


def min_value(model, var):
    return var.min


def random_value(model, var, rng):
    """Uniform over the current domain."""
    vals = var.domain.values()
    return int(vals[rng.integers(vals.size)])


class ClosestCity(ValueHeuristic):
    """Next city nearest to the current one; lowest id on ties."""

    def select(self, model, var, stats):
        here = current_city(model, var)
        dist = model.instance.dist
        return min(var.domain, key=lambda c: (dist[here, c], c))


def closest_city(model, var, instance=None):
    here = current_city(model, var)
    dist = (instance or model.instance).dist
    return min(var.domain, key=lambda c: (dist[here, c], c))


BASELINES = {
    "min_value": lambda seed=None: MinValue(),
    "random": lambda seed=None: RandomValue(seed),
    "closest_city": lambda seed=None: ClosestCity(),
}


def make_baseline(name, seed=None):
    try:
        return BASELINES[name](seed)
    except KeyError:
        raise ValueError(f"unknown baseline {name!r}; choose from {sorted(BASELINES)}") from None
