"""Parameter storage, Glorot init, Adam, and checkpoint files."""

import json

import numpy as np

from .tensor import Tensor

CHECKPOINT_VERSION = 1


def glorot_init(shape, seed, dtype=np.float32):
    """Uniform in ±sqrt(6 / (fan_in + fan_out)); fans are the first and last dims."""
    fan_in, fan_out = shape[0], shape[-1]
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    rng = np.random.default_rng(seed)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class ParameterStore:
    """Ordered name -> trainable tensor map."""

    def __init__(self):
        self._params = {}

    def add(self, name, value):
        t = Tensor(np.array(value), requires_grad=True, name=name)
        self._params[name] = t
        return t

    def __getitem__(self, name):
        return self._params[name]

    def get(self, name, default=None):
        return self._params.get(name, default)

    def __contains__(self, name):
        return name in self._params

    def __iter__(self):
        return iter(self._params.items())

    def __len__(self):
        return len(self._params)

    def names(self):
        return list(self._params)

    def zero_grad(self):
        for t in self._params.values():
            t.grad = None

    def copy_from(self, other):
        for name, t in other:
            self._params[name].data = t.data.copy()

    def state_dict(self):
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_state_dict(self, state):
        missing = set(self._params) ^ set(state)
        if missing:
            raise ValueError(f"parameter names differ: {sorted(missing)}")
        for name, value in state.items():
            value = np.asarray(value, dtype=self._params[name].dtype)
            if value.shape != self._params[name].shape:
                raise ValueError(f"shape mismatch for {name}")
            self._params[name].data = value.copy()


class Adam:
    """Bias-corrected Adam with one step counter for the whole store."""

    def __init__(self, params, lr=0.0005, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = {n: np.zeros_like(p.data) for n, p in params}
        self.v = {n: np.zeros_like(p.data) for n, p in params}

    def step(self):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1 - b1 ** self.t
        c2 = 1 - b2 ** self.t
        for name, p in self.params:
            g = p.grad
            if g is None:
                continue
            m = self.m[name]
            v = self.v[name]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            step = self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
            p.data = (p.data - step).astype(p.data.dtype)


def params_to_json(state):
    return {name: {"shape": list(a.shape), "dtype": str(a.dtype),
                   "data": [float(x) for x in a.reshape(-1)]}
            for name, a in state.items()}


def params_from_json(obj):
    return {name: np.asarray(e["data"], dtype=e["dtype"]).reshape(e["shape"])
            for name, e in obj.items()}


def save_parameters(params, path):
    with open(path, "w") as fh:
        json.dump({"version": CHECKPOINT_VERSION,
                   "parameters": params_to_json(params.state_dict())}, fh)


def load_parameters(params, path):
    with open(path) as fh:
        obj = json.load(fh)
    if obj.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {obj.get('version')}")
    params.load_state_dict(params_from_json(obj["parameters"]))
