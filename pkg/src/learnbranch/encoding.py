"""State encodings fed to the Q-network.

The generic one is a tripartite graph over variables, values and
constraints. Node ids are ordered ``[variables | values | constraints]``;
edges only link a variable to a value in its current domain or to a
constraint in whose scope it appears.
"""

import dataclasses

import numpy as np

from .cp import N_CONSTRAINT_TYPES

N_LOCAL_FEATURES = 7
N_STAT_FEATURES = 4


@dataclasses.dataclass
class FeatureConfig:
    n_actions: int
    # action slot a denotes domain value a + action_offset
    action_offset: int = 0
    backtrack_scale: float = 10.0
    include_stats: bool = True

    @property
    def n_features(self):
        return N_LOCAL_FEATURES + (N_STAT_FEATURES if self.include_stats else 0)


@dataclasses.dataclass
class Graph:
    node_features: np.ndarray
    edges: np.ndarray
    branching_index: int
    action_mask: np.ndarray
    action_values: np.ndarray
    edge_features: np.ndarray | None = None
    action_nodes: np.ndarray | None = None
    action_edge_features: np.ndarray | None = None

    @property
    def n_nodes(self):
        return self.node_features.shape[0]

    @property
    def n_actions(self):
        return self.action_mask.size

    def directed_edges(self):
        e = self.edges
        if e.size == 0:
            z = np.zeros(0, dtype=np.int64)
            return z, z
        return np.concatenate([e[:, 0], e[:, 1]]), np.concatenate([e[:, 1], e[:, 0]])


@dataclasses.dataclass
class TripartiteGraph(Graph):
    n_var: int = 0
    n_val: int = 0
    n_con: int = 0
    values: np.ndarray | None = None
    legal_value_mask: np.ndarray | None = None


@dataclasses.dataclass
class ProblemGraph(Graph):
    pass


def value_of_action(graph, action_index):
    """Domain value denoted by an action slot; illegal slots are an error."""
    if not 0 <= action_index < graph.n_actions:
        raise ValueError(f"action {action_index} outside 0..{graph.n_actions - 1}")
    if not graph.action_mask[action_index]:
        raise ValueError(f"action {action_index} is masked out")
    return int(graph.action_values[action_index])


def stats_features(stats, n_vars, config):
    if stats is None:
        return np.zeros(N_STAT_FEATURES)
    return np.array([
        min(1.0, stats.depth / max(1, n_vars)),
        stats.backtracks / (stats.backtracks + config.backtrack_scale),
        1.0 if stats.solutions_found > 0 else 0.0,
        1.0 if stats.last_node_revisit else 0.0,
    ])


def _static_part(model):
    cache = getattr(model, "_tripartite_static", None)
    if cache is not None:
        return cache
    values = np.array(sorted({v for x in model.variables for v in x.domain.initial_values}))
    lo = int(values[0])
    lookup = np.full(int(values[-1]) - lo + 1, -1, dtype=np.int64)
    lookup[values - lo] = np.arange(values.size)
    n_var, n_val = len(model.variables), values.size
    con_edges = [(x.id, n_var + n_val + c.id) for c in model.constraints for x in c.scope]
    con_edges = np.array(con_edges, dtype=np.int64).reshape(-1, 2)
    cache = (values, lo, lookup, con_edges)
    model._tripartite_static = cache
    return cache


def encode_tripartite(model, branching_var, stats, config):
    if branching_var.is_bound():
        raise ValueError("branching variable is already bound")
    values, lo, lookup, con_edges = _static_part(model)
    variables = model.variables
    constraints = model.constraints
    n_var, n_val, n_con = len(variables), values.size, len(constraints)
    n = n_var + n_val + n_con
    k = config.n_actions

    val_edges = []
    feats = np.zeros((n, config.n_features))
    sizes = np.empty(n_var)
    for x in variables:
        dom = x.domain.values()
        sizes[x.id] = dom.size
        val_edges.append(np.stack([np.full(dom.size, x.id), n_var + lookup[dom - lo]], 1))
    val_edges = np.concatenate(val_edges) if val_edges else np.zeros((0, 2), np.int64)

    feats[:n_var, 0] = 1.0
    feats[:n_var, 3] = sizes / k
    feats[branching_var.id, 4] = 1.0
    if model.objective is not None:
        feats[model.objective.id, 5] = 1.0
    feats[:n_var, 6] = sizes == 1

    branch_dom = branching_var.domain.values()
    legal_values = np.zeros(n_val, dtype=bool)
    legal_values[lookup[branch_dom - lo]] = True
    vs = slice(n_var, n_var + n_val)
    feats[vs, 1] = 1.0
    feats[vs, 3] = values / k
    feats[vs, 4] = legal_values

    cs = slice(n_var + n_val, n)
    feats[cs, 2] = 1.0
    feats[cs, 3] = [c.arity / n_var for c in constraints]
    feats[cs, 4] = [c.type_code / N_CONSTRAINT_TYPES for c in constraints]
    feats[cs, 5] = [1.0 if c.active else 0.0 for c in constraints]

    if config.include_stats:
        feats[:, N_LOCAL_FEATURES:] = stats_features(stats, n_var, config)

    action_values = np.arange(k) + config.action_offset
    mask = np.array([branching_var.domain.__contains__(int(v)) for v in action_values])
    if not mask.any():
        raise ValueError("no domain value of the branching variable fits the action space")
    # value node per action slot; slots without a value node point at the
    # branching variable and are always masked
    rel = action_values - lo
    inside = (rel >= 0) & (rel < lookup.size)
    action_nodes = np.full(k, branching_var.id, dtype=np.int64)
    idx = lookup[rel[inside]]
    action_nodes[inside] = np.where(idx >= 0, n_var + idx, branching_var.id)
    return TripartiteGraph(
        node_features=feats,
        edges=np.concatenate([con_edges, val_edges]).astype(np.int64),
        branching_index=branching_var.id,
        action_mask=mask,
        action_values=action_values,
        action_nodes=action_nodes,
        n_var=n_var, n_val=n_val, n_con=n_con,
        values=values,
        legal_value_mask=legal_values,
    )


TSPTW_FEATURES = 6


def _tsptw_static(instance):
    cache = getattr(instance, "_graph_static", None)
    if cache is None:
        n = instance.n
        iu, ju = np.triu_indices(n, 1)
        edges = np.stack([iu, ju], 1).astype(np.int64)
        from .problems.tsptw import normalized_distance
        nd = normalized_distance(instance)
        base = np.zeros((n, TSPTW_FEATURES))
        base[:, 0:2] = np.asarray(instance.positions) / instance.grid
        base[:, 2:4] = np.asarray(instance.windows) / max(1, instance.horizon)
        cache = ((edges, nd[iu, ju][:, None], nd), base)
        instance._graph_static = cache
    return cache


def encode_tsptw(instance, model, config=None, var=None):
    """Complete graph over cities with positions, windows and route flags.

    The mask marks the cities still allowed at the stage being decided.
    """
    (edges, edge_feats, nd), base = _tsptw_static(instance)
    n = instance.n
    feats = base.copy()
    for v in model.stages:
        if v is var or not v.is_bound():
            break
        feats[v.value, 4] = 1.0
    from .problems.tsptw import current_city
    here = current_city(model, var)
    feats[here, 5] = 1.0
    if var is None:
        var = next((v for v in model.stages if not v.is_bound()), None)
    mask = np.zeros(n, dtype=bool)
    if var is not None:
        for c in var.domain:
            mask[c] = True
    return ProblemGraph(
        node_features=feats,
        edges=edges,
        edge_features=edge_feats,
        branching_index=here,
        action_mask=mask,
        action_values=np.arange(n),
        action_nodes=np.arange(n),
        action_edge_features=nd[here][:, None],
    )
