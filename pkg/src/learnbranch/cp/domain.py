"""Sparse-set integer domains and the variables that own them."""

import enum

import numpy as np

from .trail import StateInt


class ChangeEvent(enum.Enum):
    UNCHANGED = 0
    CHANGED = 1
    BOUND = 2
    EMPTY = 3


class Domain:
    """Sparse set over ``[lo, hi]`` with trailed size, min and max.

    Only the three counters are trailed. Swaps inside the value array never
    need undoing: restoring ``size`` brings the removed suffix back.
    """

    def __init__(self, trailer, values):
        values = np.unique(np.asarray(list(values), dtype=np.int64))
        if values.size == 0:
            raise ValueError("a domain needs at least one value")
        self._offset = int(values[0])
        span = int(values[-1]) - self._offset + 1
        present = values - self._offset
        absent = np.setdiff1d(np.arange(span), present, assume_unique=True)
        self._vals = np.concatenate([present, absent]).astype(np.int64)
        self._pos = np.empty(span, dtype=np.int64)
        self._pos[self._vals] = np.arange(span)
        self._size = StateInt(trailer, int(values.size))
        self._min = StateInt(trailer, int(values[0]))
        self._max = StateInt(trailer, int(values[-1]))
        self.initial_values = tuple(int(v) for v in values)

    @property
    def size(self):
        return self._size._value

    @property
    def min(self):
        return self._min._value

    @property
    def max(self):
        return self._max._value

    def is_empty(self):
        return self._size._value == 0

    def is_bound(self):
        return self._size._value == 1

    def __len__(self):
        return self._size._value

    def __contains__(self, v):
        i = v - self._offset
        if i < 0 or i >= self._pos.size:
            return False
        return self._pos[i] < self._size._value

    def values(self):
        """Current values in ascending order."""
        return np.sort(self._vals[:self._size._value]) + self._offset

    def __iter__(self):
        return iter(int(v) for v in self.values())

    def _empty(self):
        self._size.set(0)
        return ChangeEvent.EMPTY

    def _event(self):
        size = self._size._value
        if size == 0:
            return ChangeEvent.EMPTY
        if size == 1:
            return ChangeEvent.BOUND
        return ChangeEvent.CHANGED

    def remove(self, v):
        if v not in self:
            return ChangeEvent.UNCHANGED
        size = self._size._value
        if size == 1:
            return self._empty()
        i = v - self._offset
        p = self._pos[i]
        last = self._vals[size - 1]
        self._vals[p] = last
        self._pos[last] = p
        self._vals[size - 1] = i
        self._pos[i] = size - 1
        self._size.set(size - 1)
        if v == self._min._value or v == self._max._value:
            live = self._vals[:size - 1]
            if v == self._min._value:
                self._min.set(int(live.min()) + self._offset)
            if v == self._max._value:
                self._max.set(int(live.max()) + self._offset)
        return self._event()

    def assign(self, v):
        if v not in self:
            if self._size._value == 0:
                return ChangeEvent.UNCHANGED
            return self._empty()
        if self._size._value == 1:
            return ChangeEvent.UNCHANGED
        i = v - self._offset
        p = self._pos[i]
        first = self._vals[0]
        self._vals[p] = first
        self._pos[first] = p
        self._vals[0] = i
        self._pos[i] = 0
        self._size.set(1)
        self._min.set(v)
        self._max.set(v)
        return ChangeEvent.BOUND

    def _keep(self, keep_mask):
        size = self._size._value
        live = self._vals[:size]
        kept = live[keep_mask]
        if kept.size == 0:
            return self._empty()
        if kept.size == size:
            return ChangeEvent.UNCHANGED
        gone = live[~keep_mask]
        self._vals[:kept.size] = kept
        self._vals[kept.size:size] = gone
        self._pos[self._vals[:size]] = np.arange(size)
        self._size.set(int(kept.size))
        self._min.set(int(kept.min()) + self._offset)
        self._max.set(int(kept.max()) + self._offset)
        return self._event()

    def remove_above(self, v):
        if self._size._value == 0 or v >= self._max._value:
            return ChangeEvent.UNCHANGED
        if v < self._min._value:
            return self._empty()
        return self._keep(self._vals[:self._size._value] <= v - self._offset)

    def remove_below(self, v):
        if self._size._value == 0 or v <= self._min._value:
            return ChangeEvent.UNCHANGED
        if v > self._max._value:
            return self._empty()
        return self._keep(self._vals[:self._size._value] >= v - self._offset)

    def __repr__(self):
        return "{" + ",".join(str(v) for v in self.values()) + "}"


class IntVar:
    """Integer decision variable owned by a :class:`CPModel`.

    Every mutating call reports non-trivial change events to the model, which
    schedules the constraints watching this variable.
    """

    def __init__(self, model, id, values, name=None):
        self.model = model
        self.id = id
        self.name = name if name is not None else f"x{id}"
        self.domain = Domain(model.trailer, values)
        self.watchers = []

    @property
    def size(self):
        return self.domain.size

    @property
    def min(self):
        return self.domain.min

    @property
    def max(self):
        return self.domain.max

    def is_bound(self):
        return self.domain.size == 1

    @property
    def value(self):
        if self.domain.size != 1:
            raise ValueError(f"{self.name} is not bound: {self.domain!r}")
        return self.domain.min

    def __contains__(self, v):
        return v in self.domain

    def _notify(self, event):
        if event is not ChangeEvent.UNCHANGED:
            self.model._schedule_watchers(self)
        return event

    def remove(self, v):
        return self._notify(self.domain.remove(v))

    def assign(self, v):
        return self._notify(self.domain.assign(v))

    def remove_above(self, v):
        return self._notify(self.domain.remove_above(v))

    def remove_below(self, v):
        return self._notify(self.domain.remove_below(v))

    def __repr__(self):
        return f"{self.name}∈{self.domain!r}"
