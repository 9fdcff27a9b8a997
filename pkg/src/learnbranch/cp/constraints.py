"""Propagators. Each returns False as soon as a domain is wiped out."""

from .domain import ChangeEvent
from .trail import StateBool

EMPTY = ChangeEvent.EMPTY


class Constraint:
    """Base propagator over a fixed scope of variables."""

    type_code = 0

    def __init__(self, scope):
        self.scope = list(scope)
        self.model = scope[0].model
        self.active = StateBool(self.model.trailer, True)
        self.id = None

    @property
    def arity(self):
        return len(self.scope)

    def deactivate(self):
        self.active.set(False)

    def propagate(self):
        raise NotImplementedError

    def is_satisfied(self, assignment):
        """Check the constraint on a full ``{var id: value}`` assignment."""
        raise NotImplementedError

    def __repr__(self):
        names = ", ".join(v.name for v in self.scope)
        return f"{type(self).__name__}({names})"


class NotEqual(Constraint):
    """x != y, fired once one side is bound."""

    type_code = 0

    def __init__(self, x, y):
        super().__init__([x, y])
        self.x, self.y = x, y

    def propagate(self):
        x, y = self.x, self.y
        if x.is_bound():
            self.deactivate()
            return y.remove(x.value) is not EMPTY
        if y.is_bound():
            self.deactivate()
            return x.remove(y.value) is not EMPTY
        return True

    def is_satisfied(self, assignment):
        return assignment[self.x.id] != assignment[self.y.id]


class LessOrEqual(Constraint):
    """x <= y with bound consistency."""

    type_code = 1

    def __init__(self, x, y):
        super().__init__([x, y])
        self.x, self.y = x, y

    def propagate(self):
        x, y = self.x, self.y
        if x.remove_above(y.max) is EMPTY:
            return False
        if y.remove_below(x.min) is EMPTY:
            return False
        if x.max <= y.min:
            self.deactivate()
        return True

    def is_satisfied(self, assignment):
        return assignment[self.x.id] <= assignment[self.y.id]


class DPTransition(Constraint):
    """Route-prefix propagator for a travelling salesman with time windows.

    ``stages[i]`` holds the city visited at position ``i`` (``stages[0]`` is
    the depot). Walking the bound prefix replays the state transition
    ``t' = max(t + d(last, c), open[c])`` and the running cost. Another city
    ``c`` for the first unbound stage is pruned when

    * its window closes before the salesman can get there,
    * some still unvisited city can no longer be reached in time from ``c``
      (earliest arrival uses shortest-path travel times, so waiting and
      non-metric rounding cannot break it), or
    * the cost of going to ``c`` plus a lower bound on the rest exceeds the
      objective's upper bound. The bound charges every remaining city its
      cheapest incoming edge.

    The objective is the travel distance of the open path (no return leg).
    """

    type_code = 2

    def __init__(self, stages, cost, dist, opens, closes):
        super().__init__(list(stages) + [cost])
        self.stages = list(stages)
        self.cost = cost
        self.dist = [list(map(int, row)) for row in dist]
        self.opens = list(opens)
        self.closes = list(closes)
        n = len(self.dist)
        sp = [row[:] for row in self.dist]
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if sp[i][k] + sp[k][j] < sp[i][j]:
                        sp[i][j] = sp[i][k] + sp[k][j]
        self.shortest = sp

    def _walk(self):
        """Replay the bound prefix: (next position, last city, time, cost, visited)."""
        stages, dist, opens, closes = self.stages, self.dist, self.opens, self.closes
        last = stages[0].value
        t = opens[last]
        cost = 0
        visited = {last}
        i = 1
        while i < len(stages) and stages[i].is_bound():
            c = stages[i].value
            t = max(t + dist[last][c], opens[c])
            if t > closes[c]:
                return None
            cost += dist[last][c]
            last = c
            visited.add(c)
            i += 1
        return i, last, t, cost, visited

    def _entry_bound(self, pending, sources):
        dist = self.dist
        total = 0
        for u in pending:
            total += min((dist[w][u] for w in sources if w != u), default=0)
        return total

    def propagate(self):
        stages, dist, opens, closes, sp = (
            self.stages, self.dist, self.opens, self.closes, self.shortest)
        if not stages[0].is_bound():
            return True
        while True:
            walked = self._walk()
            if walked is None:
                return False
            i, last, t, cost, visited = walked
            if i == len(stages):
                if self.cost.remove_below(cost) is EMPTY:
                    return False
                return self.cost.remove_above(cost) is not EMPTY
            pending = [c for c in range(len(dist)) if c not in visited]
            for u in pending:
                if t + sp[last][u] > closes[u]:
                    return False
            if self.cost.remove_below(
                    cost + self._entry_bound(pending, pending + [last])) is EMPTY:
                return False
            nxt = stages[i]
            limit = self.cost.max
            for c in nxt.domain:
                d = dist[last][c]
                arrive = max(t + d, opens[c])
                rest = [u for u in pending if u != c]
                prune = arrive > closes[c]
                if not prune:
                    prune = any(arrive + sp[c][u] > closes[u] for u in rest)
                if not prune:
                    prune = cost + d + self._entry_bound(rest, rest + [c]) > limit
                if prune and nxt.remove(c) is EMPTY:
                    return False
            if not nxt.is_bound():
                return True

    def is_satisfied(self, assignment):
        route = [assignment[v.id] for v in self.stages]
        if len(set(route)) != len(route):
            return False
        t = self.opens[route[0]]
        cost = 0
        for a, b in zip(route, route[1:]):
            t = max(t + self.dist[a][b], self.opens[b])
            if t > self.closes[b]:
                return False
            cost += self.dist[a][b]
        return assignment[self.cost.id] == cost

    def __repr__(self):
        return f"DPTransition(n={len(self.stages)})"


N_CONSTRAINT_TYPES = 3
