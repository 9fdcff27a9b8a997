"""The CP model: variables, constraints, optional objective, fix-point."""

from collections import deque

from .domain import IntVar
from .trail import Trailer


class CPModel:
    def __init__(self, trailer=None):
        self.trailer = trailer if trailer is not None else Trailer()
        self.variables = []
        self.constraints = []
        self.objective = None
        # variables the search may branch on; None means all of them
        self.branching_variables = None
        self._queue = deque()
        self._queued = []
        self._current = None

    def add_variable(self, lo=None, hi=None, name=None, values=None):
        """Create ``IntVar`` over ``[lo, hi]`` (or over explicit ``values``)."""
        if values is None:
            values = range(lo, hi + 1)
        var = IntVar(self, len(self.variables), values, name)
        self.variables.append(var)
        return var

    def add_constraint(self, constraint):
        constraint.id = len(self.constraints)
        self.constraints.append(constraint)
        self._queued.append(False)
        for var in constraint.scope:
            if constraint not in var.watchers:
                var.watchers.append(constraint)
        self._enqueue(constraint)
        return constraint

    def minimize(self, var):
        if var.model is not self:
            raise ValueError("objective must be a variable of this model")
        self.objective = var

    def decision_variables(self):
        if self.branching_variables is None:
            return self.variables
        return self.branching_variables

    def _enqueue(self, c):
        if not self._queued[c.id] and c.active:
            self._queued[c.id] = True
            self._queue.append(c)

    def _schedule_watchers(self, var):
        for c in var.watchers:
            if c is not self._current:
                self._enqueue(c)

    def schedule_all(self):
        for c in self.constraints:
            self._enqueue(c)

    def clear_queue(self):
        for c in self._queue:
            self._queued[c.id] = False
        self._queue.clear()

    @property
    def queue_length(self):
        return len(self._queue)

    def fix_point(self):
        """Propagate queued constraints to quiescence. False on failure."""
        queue = self._queue
        while queue:
            c = queue.popleft()
            self._queued[c.id] = False
            if not c.active:
                continue
            self._current = c
            try:
                ok = c.propagate()
            finally:
                self._current = None
            if not ok:
                self.clear_queue()
                return False
        return True

    def is_solved(self):
        return all(v.is_bound() for v in self.variables)

    def assignment(self):
        return {v.id: v.value for v in self.variables}

    def check(self, assignment):
        """Direct re-check of every constraint, without propagation."""
        return all(c.is_satisfied(assignment) for c in self.constraints)

    def __repr__(self):
        return (f"CPModel({len(self.variables)} vars, "
                f"{len(self.constraints)} constraints)")
