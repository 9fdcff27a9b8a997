"""Travelling salesman with time windows as a DP-style CP model."""

import dataclasses
import itertools
import math

import numpy as np

from ..cp import CPModel, DPTransition, NotEqual

# travel times are Euclidean distances times this factor, rounded
DIST_SCALE = 100
BRUTE_FORCE_MAX_N = 8


def distance_matrix(positions):
    pos = np.asarray(positions, dtype=float)
    diff = pos[:, None, :] - pos[None, :, :]
    return np.rint(np.sqrt((diff ** 2).sum(-1)) * DIST_SCALE).astype(int)


@dataclasses.dataclass
class TSPTWInstance:
    """City 0 is the depot. Windows are in scaled time units."""

    positions: list
    windows: list
    grid: int = 100
    dist: np.ndarray = dataclasses.field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.positions = [(int(x), int(y)) for x, y in self.positions]
        self.windows = [(int(a), int(b)) for a, b in self.windows]
        if len(self.positions) != len(self.windows) or not self.positions:
            raise ValueError("need one window per city and at least one city")
        for a, b in self.windows:
            if a > b:
                raise ValueError(f"empty time window [{a}, {b}]")
        if self.windows[0][0] != 0:
            raise ValueError("depot window must open at 0")
        self.dist = distance_matrix(self.positions)

    @property
    def n(self):
        return len(self.positions)

    @property
    def horizon(self):
        return max(b for _, b in self.windows)

    def route_cost(self, route):
        """Cost of an open path starting at the depot, None if a window is missed."""
        d = self.dist
        t = self.windows[route[0]][0]
        cost = 0
        for a, b in zip(route, route[1:]):
            t = max(t + d[a, b], self.windows[b][0])
            if t > self.windows[b][1]:
                return None
            cost += int(d[a, b])
        return cost


def generate_tsptw(n, grid=100, max_tw_width=100, seed=0):
    """Random instance that is feasible by construction.

    Cities are placed uniformly on the grid, a random reference tour is
    drawn, and each city's window (width up to ``max_tw_width`` grid units)
    is placed so that it contains the city's arrival time on that tour.
    """
    if n < 1:
        raise ValueError("need at least the depot")
    rng = np.random.default_rng(seed)
    positions = rng.integers(0, grid + 1, size=(n, 2))
    dist = distance_matrix(positions)
    tour = [0] + [int(c) + 1 for c in rng.permutation(n - 1)]
    windows = [None] * n
    t = 0
    for prev, c in zip(tour, tour[1:]):
        t += int(dist[prev, c])
        width = int(rng.integers(0, max_tw_width * DIST_SCALE + 1))
        a = max(0, t - int(rng.integers(0, width + 1)))
        windows[c] = (a, a + width)
    horizon = max([b for w in windows[1:] for b in w[1:]] + [t])
    windows[0] = (0, horizon)
    inst = TSPTWInstance(positions.tolist(), windows, grid)
    inst.reference_tour = tour
    return inst


def build_tsptw_model(instance):
    """Stage variables v_0..v_{n-1} (v_0 = depot) and a travel-cost objective."""
    n = instance.n
    model = CPModel()
    stages = [model.add_variable(values=[0], name="v0")]
    for i in range(1, n):
        stages.append(model.add_variable(1, n - 1, name=f"v{i}"))
    dist = instance.dist.tolist()
    ub = max(1, (n - 1) * int(instance.dist.max()))
    cost = model.add_variable(0, ub, name="cost")
    for a, b in itertools.combinations(stages[1:], 2):
        model.add_constraint(NotEqual(a, b))
    opens = [a for a, _ in instance.windows]
    closes = [b for _, b in instance.windows]
    model.add_constraint(DPTransition(stages, cost, dist, opens, closes))
    model.minimize(cost)
    model.branching_variables = stages[1:]
    model.stages = stages
    model.instance = instance
    return model


def current_city(model, var=None):
    """City the salesman stands at when ``var`` (a stage) is decided."""
    stages = model.stages
    if var is None:
        last = 0
        for v in stages:
            if not v.is_bound():
                break
            last = v.value
        return last
    i = stages.index(var)
    return stages[i - 1].value


def brute_force_tsptw(instance):
    if instance.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is capped at n <= {BRUTE_FORCE_MAX_N}")
    best = None
    for perm in itertools.permutations(range(1, instance.n)):
        c = instance.route_cost((0,) + perm)
        if c is not None and (best is None or c < best):
            best = c
    return best


def write_tsptw(instance, path):
    lines = [str(instance.n)]
    lines += [f"{x} {y} {a} {b}" for (x, y), (a, b) in zip(instance.positions, instance.windows)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_tsptw(path, grid=100):
    with open(path) as fh:
        rows = [(i, line.split()) for i, line in enumerate(fh, 1) if line.strip()]
    if not rows:
        raise ValueError(f"{path}: empty file")
    n = int(rows[0][1][0])
    if len(rows) != n + 1:
        raise ValueError(f"{path}: expected {n} city lines, found {len(rows) - 1}")
    positions, windows = [], []
    for lineno, parts in rows[1:]:
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 'x y a b'")
        x, y, a, b = (int(p) for p in parts)
        positions.append((x, y))
        windows.append((a, b))
    return TSPTWInstance(positions, windows, grid)


def normalized_distance(instance):
    return instance.dist / (instance.grid * math.sqrt(2) * DIST_SCALE)
