"""Reversible state: a trail of old cell values plus save points."""


class Trailer:
    """Undo log shared by every reversible cell of one solver.

    ``save_state`` pushes a save point and returns its level id; the ids are
    the nesting depth, so the first save on a fresh trailer is level 0.
    ``restore_state(level)`` rolls every trailed cell back to its value at
    the time that level was saved and releases it together with all deeper
    levels.
    """

    def __init__(self):
        self._trail = []
        self._levels = []

    @property
    def depth(self):
        return len(self._levels)

    def push(self, cell, old_value):
        self._trail.append((cell, old_value))

    def save_state(self):
        self._levels.append(len(self._trail))
        return len(self._levels) - 1

    def restore_state(self, level):
        if not 0 <= level < len(self._levels):
            raise ValueError(
                f"unknown save point {level} (open levels: {len(self._levels)})")
        mark = self._levels[level]
        trail = self._trail
        while len(trail) > mark:
            cell, old = trail.pop()
            cell._value = old
        del self._levels[level:]


class StateInt:
    """An integer cell whose writes are recorded on a trailer."""

    __slots__ = ("_trailer", "_value")

    def __init__(self, trailer, value):
        self._trailer = trailer
        self._value = value

    @property
    def value(self):
        return self._value

    def set(self, value):
        if value != self._value:
            self._trailer.push(self, self._value)
            self._value = value

    def __repr__(self):
        return f"StateInt({self._value})"


class StateBool(StateInt):
    __slots__ = ()

    def __bool__(self):
        return bool(self._value)
