"""Graph coloring: instances, k-colorable generator, CP model, oracle."""

import dataclasses
import itertools

import numpy as np

from ..cp import CPModel, LessOrEqual, NotEqual

BRUTE_FORCE_MAX_N = 8


@dataclasses.dataclass
class GraphColoringInstance:
    n_vertex: int
    edges: list
    # group labels of the generator, when known; not serialized
    planted: list | None = dataclasses.field(default=None, compare=False)

    def __post_init__(self):
        seen = set()
        clean = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (1 <= u <= self.n_vertex and 1 <= v <= self.n_vertex):
                raise ValueError(f"edge ({u}, {v}) outside 1..{self.n_vertex}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            clean.append(key)
        self.edges = clean

    @property
    def n_edge(self):
        return len(self.edges)


def generate_gc(n, p, k, seed):
    """Random graph on ``n`` vertices that is ``k``-colorable by construction.

    Vertices are dealt into ``k`` groups of near-equal size and each pair
    from different groups becomes an edge with probability ``p``.
    """
    if not 0 < p <= 1:
        raise ValueError("density p must be in (0, 1]")
    if k < 2 or n < k:
        raise ValueError("need 2 <= k <= n")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    group = np.empty(n, dtype=int)
    group[order] = np.arange(n) % k
    edges = []
    for u, v in itertools.combinations(range(n), 2):
        if group[u] != group[v] and rng.random() < p:
            edges.append((u + 1, v + 1))
    return GraphColoringInstance(n, edges, planted=[int(g) + 1 for g in group])


def build_gc_model(instance):
    """x_v in 1..n for each vertex, k in 0..n, x_u != x_v per edge, x_v <= k."""
    n = instance.n_vertex
    model = CPModel()
    xs = [model.add_variable(1, n, name=f"x{i + 1}") for i in range(n)]
    k = model.add_variable(0, n, name="k")
    for u, v in instance.edges:
        model.add_constraint(NotEqual(xs[u - 1], xs[v - 1]))
    for x in xs:
        model.add_constraint(LessOrEqual(x, k))
    model.minimize(k)
    model.x = xs
    model.k = k
    model.instance = instance
    return model


def is_proper(instance, colors):
    """``colors`` maps vertex (1-based) to color, as a sequence of length n."""
    return all(colors[u - 1] != colors[v - 1] for u, v in instance.edges)


def _set_partitions(n):
    # restricted growth strings: every coloring up to a renaming of colors
    a = [0] * n
    def rec(i, used):
        if i == n:
            yield a
            return
        for c in range(used + 1):
            a[i] = c
            yield from rec(i + 1, max(used, c + 1))
    if n == 0:
        yield a
        return
    yield from rec(0, 0)


def brute_force_chromatic(instance):
    n = instance.n_vertex
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is capped at n <= {BRUTE_FORCE_MAX_N}")
    best = None
    for colors in _set_partitions(n):
        used = max(colors) + 1 if n else 0
        if (best is None or used < best) and is_proper(instance, colors):
            best = used
    return best


def write_dimacs(instance, path):
    lines = [f"p edge {instance.n_vertex} {instance.n_edge}"]
    lines += [f"e {u} {v}" for u, v in instance.edges]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dimacs(path):
    n = None
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                if len(parts) != 4 or parts[1] != "edge":
                    raise ValueError(f"{path}:{lineno}: bad header {line.strip()!r}")
                n = int(parts[2])
            elif parts[0] == "e":
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: bad edge line {line.strip()!r}")
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise ValueError(f"{path}:{lineno}: unknown line {line.strip()!r}")
    if n is None:
        raise ValueError(f"{path}: missing 'p edge' header")
    return GraphColoringInstance(n, edges)
