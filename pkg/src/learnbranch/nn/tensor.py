"""A small reverse-mode autodiff tape over numpy arrays.

Each op returns a :class:`Tensor` that remembers its parents and a closure
pushing its output gradient back to them. ``backward`` walks the graph in
reverse topological order and *accumulates* into ``.grad``; call
``zero_grad`` on parameters between updates.
"""

import contextlib

import numpy as np
import scipy.sparse as sp

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    global _grad_enabled
    prev, _grad_enabled = _grad_enabled, False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad=False, name=None, dtype=None):
        self.data = np.asarray(data, dtype=dtype)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = ()
        self._backward = None
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def numpy(self):
        return self.data

    def zero_grad(self):
        self.grad = None

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = np.array(g, dtype=self.data.dtype, copy=True)
        else:
            self.grad += g

    def backward(self, grad=None):
        backward(self, grad)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, neg(as_tensor(other, self.dtype)))

    def __mul__(self, other):
        return mul(self, other)

    def __truediv__(self, other):
        return div(self, other)

    def __matmul__(self, other):
        return matmul(self, other)


def as_tensor(x, dtype=None):
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=dtype))


def _make(data, parents, backward_fn):
    out = Tensor(data)
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward_fn
    return out


def backward(loss, grad=None):
    order = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen or not node.requires_grad:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))
    grads = {id(loss): np.ones_like(loss.data) if grad is None else np.asarray(grad, loss.dtype)}
    for node in reversed(order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node._backward is None:
            node._accumulate(g)
            continue
        for parent, pg in zip(node._parents, node._backward(g)):
            if pg is None or not parent.requires_grad:
                continue
            if id(parent) in grads:
                grads[id(parent)] = grads[id(parent)] + pg
            else:
                grads[id(parent)] = pg


def _unbroadcast(g, shape):
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def add(a, b):
    a, b = as_tensor(a), as_tensor(b, a.dtype if isinstance(a, Tensor) else None)
    sa, sb = a.shape, b.shape
    return _make(a.data + b.data, (a, b),
                 lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def neg(a):
    return _make(-a.data, (a,), lambda g: (-g,))


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    av, bv = a.data, b.data
    return _make(av * bv, (a, b),
                 lambda g: (_unbroadcast(g * bv, av.shape), _unbroadcast(g * av, bv.shape)))


def div(a, b):
    a, b = as_tensor(a), as_tensor(b)
    av, bv = a.data, b.data
    out = av / bv
    return _make(out, (a, b),
                 lambda g: (_unbroadcast(g / bv, av.shape),
                            _unbroadcast(-g * out / bv, bv.shape)))


def matmul(a, b):
    av, bv = a.data, b.data
    return _make(av @ bv, (a, b), lambda g: (g @ bv.T, av.T @ g))


def exp(a):
    out = np.exp(a.data)
    return _make(out, (a,), lambda g: (g * out,))


def relu(a):
    pos = a.data > 0
    return _make(np.where(pos, a.data, 0).astype(a.dtype), (a,), lambda g: (g * pos,))


def leaky_relu(a, slope=0.2):
    pos = a.data > 0
    scale = np.where(pos, 1, slope).astype(a.dtype)
    return _make(a.data * scale, (a,), lambda g: (g * scale,))


def elu(a, alpha=1.0):
    pos = a.data > 0
    ex = np.exp(np.minimum(a.data, 0))
    out = np.where(pos, a.data, alpha * (ex - 1)).astype(a.dtype)
    slope = np.where(pos, 1, alpha * ex).astype(a.dtype)
    return _make(out, (a,), lambda g: (g * slope,))


def identity(a):
    return a


def reshape(a, shape):
    old = a.shape
    return _make(a.data.reshape(shape), (a,), lambda g: (g.reshape(old),))


def total(a):
    """Sum of all entries, a 0-d tensor."""
    shape = a.shape
    return _make(np.asarray(a.data.sum(), a.dtype), (a,),
                 lambda g: (np.broadcast_to(g, shape).astype(a.dtype),))


def sum_axis(a, axis):
    shape = a.shape
    return _make(a.data.sum(axis=axis), (a,),
                 lambda g: (np.broadcast_to(np.expand_dims(g, axis), shape).copy(),))


def mean_axis(a, axis):
    n = a.shape[axis]
    shape = a.shape
    return _make(a.data.mean(axis=axis), (a,),
                 lambda g: (np.broadcast_to(np.expand_dims(g / n, axis), shape).copy(),))


def concat(tensors, axis=-1):
    sizes = [t.shape[axis] for t in tensors]
    cuts = np.cumsum(sizes)[:-1]
    return _make(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors),
                 lambda g: tuple(np.split(g, cuts, axis=axis)))


def take(a, index):
    """Rows ``a[index]``; the gradient scatters back with repeats summed."""
    index = np.asarray(index)
    n = a.shape[0]
    def bw(g):
        out = np.zeros((n,) + g.shape[1:], dtype=g.dtype)
        np.add.at(out, index, g)
        return (out,)
    return _make(a.data[index], (a,), bw)


def pick(a, rows, cols):
    """Entries ``a[rows[i], cols[i]]`` of a matrix."""
    shape = a.shape
    def bw(g):
        out = np.zeros(shape, dtype=g.dtype)
        np.add.at(out, (rows, cols), g)
        return (out,)
    return _make(a.data[rows, cols], (a,), bw)


def where(mask, a, fill):
    """Entries of ``a`` where ``mask`` holds, the constant ``fill`` elsewhere."""
    mask = np.asarray(mask, dtype=bool)
    return _make(np.where(mask, a.data, fill).astype(a.dtype), (a,), lambda g: (g * mask,))


class Segments:
    """Index array ``seg`` of length E grouping rows into ``n`` segments.

    Caches the sparse incidence matrix so ``segment_sum`` and the matching
    gather are both a sparse product.
    """

    def __init__(self, seg, n, dtype=np.float64):
        self.seg = np.asarray(seg, dtype=np.int64)
        self.n = n
        e = self.seg.size
        self.matrix = sp.csr_matrix(
            (np.ones(e, dtype=dtype), (self.seg, np.arange(e))), shape=(n, e))
        self._order = None

    def sum(self, x):
        """Per-segment sum of rows of a numpy array."""
        if x.ndim == 1:
            return self.matrix @ x
        flat = x.reshape(x.shape[0], int(np.prod(x.shape[1:])))
        return np.asarray(self.matrix @ flat).reshape((self.n,) + x.shape[1:])

    def max(self, x):
        if self._order is None:
            self._order = np.argsort(self.seg, kind="stable")
            sorted_seg = self.seg[self._order]
            self._present, self._starts = np.unique(sorted_seg, return_index=True)
        out = np.full((self.n,) + x.shape[1:], -np.inf, dtype=x.dtype)
        if self.seg.size:
            out[self._present] = np.maximum.reduceat(x[self._order], self._starts, axis=0)
        return out


def segment_sum(a, segments):
    seg = segments.seg
    return _make(segments.sum(a.data), (a,), lambda g: (g[seg],))


def gather(a, segments):
    """Rows ``a[seg]``; the gradient is a segment sum."""
    return _make(a.data[segments.seg], (a,), lambda g: (segments.sum(g),))
