"""Dense, structure2vec-style and graph-attention layers, plus the Q-network."""

import dataclasses

import numpy as np

from . import tensor as T
from .params import ParameterStore, glorot_init

ACTIVATIONS = {
    "identity": T.identity,
    "relu": T.relu,
    "elu": T.elu,
    "leaky_relu": T.leaky_relu,
}


@dataclasses.dataclass
class DenseSpec:
    n_in: int
    n_out: int
    activation: str = "relu"


@dataclasses.dataclass
class GraphLayerSpec:
    kind: str  # "gat" or "s2v"
    n_in: int
    n_out: int
    heads: int = 1
    concat: bool = True

    @property
    def width(self):
        if self.kind == "gat" and self.concat:
            return self.n_out * self.heads
        return self.n_out


@dataclasses.dataclass
class NetworkSpec:
    """Graph chain, then a dense chain over node embeddings, then scores.

    ``head="branching"`` scores all K actions from the branching node's
    embedding. ``head="per_node"`` scores each action from the embedding of
    its own node, the branching node's embedding and the edge features
    between them; the output layer then has width 1.
    """

    n_features: int
    n_actions: int
    graph_chain: list
    node_chain: list
    output_layer: DenseSpec
    head: str = "branching"
    edge_dim: int = 0

    def __post_init__(self):
        self.graph_chain = [g if isinstance(g, GraphLayerSpec) else GraphLayerSpec(**g)
                            for g in self.graph_chain]
        self.node_chain = [d if isinstance(d, DenseSpec) else DenseSpec(**d)
                           for d in self.node_chain]
        if not isinstance(self.output_layer, DenseSpec):
            self.output_layer = DenseSpec(**self.output_layer)
        self.validate()

    @property
    def embedding_width(self):
        if self.graph_chain:
            return self.graph_chain[-1].width
        return self.n_features

    def validate(self):
        width = self.n_features
        for i, g in enumerate(self.graph_chain):
            if g.kind not in ("gat", "s2v"):
                raise ValueError(f"unknown graph layer kind {g.kind!r}")
            if (g.kind == "gat" or i > 0) and g.n_in != width:
                raise ValueError(f"graph layer expects {g.n_in} inputs, gets {width}")
            width = g.width
        if self.head == "per_node":
            width = 2 * width + self.edge_dim
        elif self.head != "branching":
            raise ValueError(f"unknown head {self.head!r}")
        for d in self.node_chain + [self.output_layer]:
            if d.n_in != width:
                raise ValueError(f"dense layer expects {d.n_in} inputs, gets {width}")
            width = d.n_out
        want = 1 if self.head == "per_node" else self.n_actions
        if width != want:
            raise ValueError(f"output width {width} != {want}")

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def default_spec(n_features, n_actions, head="branching", edge_dim=0):
    """Four attention layers (2/3/3/2 heads) and four dense 20x20 layers."""
    graph = [
        GraphLayerSpec("gat", n_features, 10, heads=2, concat=True),
        GraphLayerSpec("gat", 20, 10, heads=3, concat=True),
        GraphLayerSpec("gat", 30, 10, heads=3, concat=True),
        GraphLayerSpec("gat", 30, 20, heads=2, concat=False),
    ]
    first = 20 if head == "branching" else 2 * 20 + edge_dim
    dense = [DenseSpec(first, 20)] + [DenseSpec(20, 20) for _ in range(3)]
    out = DenseSpec(20, n_actions if head == "branching" else 1, "identity")
    return NetworkSpec(n_features, n_actions, graph, dense, out, head=head, edge_dim=edge_dim)


def dense_forward(x, W, b, activation="identity"):
    return ACTIVATIONS[activation](T.add(T.matmul(x, W), b))


def s2v_layer_forward(f, mu, adjacency, theta1, theta2, theta3=None, theta4=None,
                      h=None):
    """One aggregation step ``relu(f θ1 + Σ_u μ_u θ2 + Σ_u relu(h_vu θ4) θ3)``.

    Parameters are stored input-major (``θ1`` is k×p). ``adjacency`` is a
    pair ``(src, dst)`` of :class:`Segments`-compatible index arrays over
    directed edges; messages flow from ``src`` to ``dst``. Without edge
    features the θ3/θ4 term is dropped.
    """
    src, dst = adjacency
    if f.shape[1] != theta1.shape[0] or mu.shape[1] != theta2.shape[0]:
        raise ValueError("s2v parameter shapes do not match the inputs")
    if theta1.shape[1] != theta2.shape[1]:
        raise ValueError("θ1 and θ2 must share the output width")
    out = T.matmul(f, theta1)
    neigh = T.segment_sum(T.gather(mu, src), dst)
    out = T.add(out, T.matmul(neigh, theta2))
    if h is not None and theta3 is not None:
        edge = T.relu(T.matmul(h, theta4))
        out = T.add(out, T.matmul(T.segment_sum(edge, dst), theta3))
    return T.relu(out)


def gat_layer_forward(x, adjacency, W, a_src, a_dst, bias, heads, concat=True,
                      activation="elu", edge_feats=None, a_edge=None, slope=0.2):
    """Multi-head graph attention with self-loops already in ``adjacency``.

    ``e_ij = LeakyReLU(a_dst·W h_i + a_src·W h_j [+ a_edge·h_ij])`` and the
    softmax runs over the in-neighbourhood of ``i``.
    """
    src, dst = adjacency
    n = x.shape[0]
    if x.shape[1] != W.shape[0] or W.shape[1] % heads:
        raise ValueError("GAT weight shape does not match the input width")
    width = W.shape[1] // heads
    z = T.reshape(T.matmul(x, W), (n, heads, width))
    s_src = T.sum_axis(T.mul(z, a_src), 2)
    s_dst = T.sum_axis(T.mul(z, a_dst), 2)
    logits = T.add(T.gather(s_dst, dst), T.gather(s_src, src))
    if edge_feats is not None and a_edge is not None:
        logits = T.add(logits, T.matmul(edge_feats, a_edge))
    logits = T.leaky_relu(logits, slope)
    # shift by the per-segment max; softmax is invariant to it
    shift = dst.max(logits.data)[dst.seg]
    ex = T.exp(T.add(logits, -shift))
    denom = T.gather(T.segment_sum(ex, dst), dst)
    alpha = T.div(ex, denom)
    msg = T.mul(T.gather(z, src), T.reshape(alpha, alpha.shape + (1,)))
    agg = T.segment_sum(msg, dst)
    if concat:
        out = T.reshape(agg, (n, heads * width))
    else:
        out = T.mean_axis(agg, 1)
    return ACTIVATIONS[activation](T.add(out, bias))


def mask_scores(scores, legal_mask):
    """Illegal entries become -inf; raises if nothing is legal."""
    mask = np.asarray(legal_mask, dtype=bool)
    scores = np.asarray(scores)
    if mask.shape != scores.shape[-1:] and mask.shape != scores.shape:
        raise ValueError("mask and scores differ in length")
    if not mask.any(axis=-1).all():
        raise ValueError("no legal action")
    return np.where(mask, scores, -np.inf)


def huber_loss(pred, target, delta=1.0):
    """Mean Huber loss of a prediction tensor against a constant target."""
    target = np.asarray(target, dtype=pred.dtype)
    err = pred.data - target
    small = np.abs(err) <= delta
    value = np.where(small, 0.5 * err ** 2, delta * (np.abs(err) - 0.5 * delta))
    n = err.size
    slope = np.where(small, err, delta * np.sign(err)) / n
    return T._make(np.asarray(value.mean(), pred.dtype), (pred,),
                   lambda g: (g * slope.astype(pred.dtype),))


class GraphBatch:
    """Disjoint union of graphs, ready for the graph layers."""

    def __init__(self, graphs, dtype=np.float32):
        feats, srcs, dsts, efeats = [], [], [], []
        branch, action_nodes, action_edges, masks = [], [], [], []
        offset = 0
        for g in graphs:
            n = g.node_features.shape[0]
            feats.append(g.node_features)
            s, d = g.directed_edges()
            srcs.append(s + offset)
            dsts.append(d + offset)
            if g.edge_features is not None:
                ef = g.edge_features
                efeats.append(np.concatenate([ef, ef], axis=0))
            branch.append(g.branching_index + offset)
            if g.action_nodes is not None:
                action_nodes.append(np.asarray(g.action_nodes) + offset)
                if g.action_edge_features is not None:
                    action_edges.append(g.action_edge_features)
            masks.append(g.action_mask)
            offset += n
        self.n_nodes = offset
        self.n_graphs = len(graphs)
        self.features = np.concatenate(feats).astype(dtype)
        loops = np.arange(offset)
        src = np.concatenate(srcs) if srcs else np.zeros(0, int)
        dst = np.concatenate(dsts) if dsts else np.zeros(0, int)
        self.src = T.Segments(src, offset, dtype)
        self.dst = T.Segments(dst, offset, dtype)
        self.src_loop = T.Segments(np.concatenate([src, loops]), offset, dtype)
        self.dst_loop = T.Segments(np.concatenate([dst, loops]), offset, dtype)
        if efeats and len(efeats) == len(graphs):
            ef = np.concatenate(efeats).astype(dtype)
            self.edge_features = ef
            self.edge_features_loop = np.concatenate(
                [ef, np.zeros((offset, ef.shape[1]), dtype)])
        else:
            self.edge_features = None
            self.edge_features_loop = None
        self.branching = np.asarray(branch)
        if action_nodes and len(action_nodes) == len(graphs):
            self.action_nodes = np.stack(action_nodes)
            self.action_edge_features = (
                np.stack(action_edges).astype(dtype) if len(action_edges) == len(graphs) else None)
        else:
            self.action_nodes = None
            self.action_edge_features = None
        self.masks = np.stack(masks)


class QNetwork:
    """Graph network mapping a batch of states to K action scores each."""

    def __init__(self, spec, seed=0, dtype=np.float32):
        self.spec = spec
        self.dtype = np.dtype(dtype)
        self.params = ParameterStore()
        rng = np.random.default_rng(seed)
        def init(name, shape):
            self.params.add(name, glorot_init(shape, int(rng.integers(2 ** 31)), self.dtype))
        def zeros(name, shape):
            self.params.add(name, np.zeros(shape, self.dtype))
        for i, g in enumerate(spec.graph_chain):
            p = f"graph{i}."
            if g.kind == "gat":
                init(p + "W", (g.n_in, g.n_out * g.heads))
                init(p + "a_src", (g.heads, g.n_out))
                init(p + "a_dst", (g.heads, g.n_out))
                if spec.edge_dim:
                    init(p + "a_edge", (spec.edge_dim, g.heads))
                zeros(p + "bias", (g.width,))
            else:
                init(p + "theta1", (spec.n_features, g.n_out))
                init(p + "theta2", (g.n_in, g.n_out))
                if spec.edge_dim:
                    init(p + "theta3", (g.n_out, g.n_out))
                    init(p + "theta4", (spec.edge_dim, g.n_out))
        for i, d in enumerate(spec.node_chain):
            init(f"dense{i}.W", (d.n_in, d.n_out))
            zeros(f"dense{i}.b", (d.n_out,))
        out = spec.output_layer
        init("output.W", (out.n_in, out.n_out))
        zeros("output.b", (out.n_out,))

    def embed(self, batch):
        P = self.params
        spec = self.spec
        f = T.Tensor(batch.features)
        h = f
        for i, g in enumerate(spec.graph_chain):
            p = f"graph{i}."
            if g.kind == "gat":
                h = gat_layer_forward(
                    h, (batch.src_loop, batch.dst_loop), P[p + "W"], P[p + "a_src"],
                    P[p + "a_dst"], P[p + "bias"], g.heads, g.concat,
                    edge_feats=(T.Tensor(batch.edge_features_loop)
                                if batch.edge_features_loop is not None else None),
                    a_edge=P.get(p + "a_edge"))
            else:
                mu = h if i > 0 else T.Tensor(np.zeros((batch.n_nodes, g.n_in), self.dtype))
                h = s2v_layer_forward(
                    f, mu, (batch.src, batch.dst), P[p + "theta1"], P[p + "theta2"],
                    P.get(p + "theta3"), P.get(p + "theta4"),
                    T.Tensor(batch.edge_features) if batch.edge_features is not None else None)
        return h

    def forward(self, batch):
        """Raw (unmasked) scores, shape (n_graphs, K)."""
        P = self.params
        spec = self.spec
        h = self.embed(batch)
        if spec.head == "branching":
            x = T.take(h, batch.branching)
        else:
            b, k = batch.action_nodes.shape
            cand = T.take(h, batch.action_nodes.reshape(-1))
            here = T.take(h, np.repeat(batch.branching, k))
            parts = [cand, here]
            if spec.edge_dim:
                parts.append(T.Tensor(batch.action_edge_features.reshape(b * k, -1)))
            x = T.concat(parts, axis=1)
        for i, d in enumerate(spec.node_chain):
            x = dense_forward(x, P[f"dense{i}.W"], P[f"dense{i}.b"], d.activation)
        x = dense_forward(x, P["output.W"], P["output.b"], spec.output_layer.activation)
        if spec.head == "per_node":
            x = T.reshape(x, (batch.n_graphs, spec.n_actions))
        return x

    def scores(self, graphs):
        """Scores as a numpy array, without recording a tape."""
        with T.no_grad():
            return self.forward(GraphBatch(graphs, self.dtype)).data

    def copy_from(self, other):
        self.params.copy_from(other.params)
