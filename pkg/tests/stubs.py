"""Small deterministic updaters for exercising the stepping machinery."""
from __future__ import annotations

from dynalgo.core import OpKind, SteppableUpdater


class CostStub(SteppableUpdater):
    """Keeps an edge set; every update costs ``cost`` unit steps.

    ``costs`` optionally overrides the cost per edge.

    The edge is applied on the last step, so a half-finished update is not
    visible yet.
    """

    def __init__(self, n: int, cost: int = 1, seed: int = 0, costs=None):
        super().__init__(n)
        self.cost = cost
        self.costs = costs or {}
        self.seed = seed
        self.items: set = set()
        self.log: list = []

    def _process(self, op):
        for _ in range(self.costs.get(op.edge, self.cost)):
            yield 1
        if op.kind is OpKind.INSERT:
            self.items.add(op.edge)
        else:
            self.items.discard(op.edge)
        self.log.append(op)

    def _state_items(self):
        yield sorted(self.items)
        yield list(self.log)
