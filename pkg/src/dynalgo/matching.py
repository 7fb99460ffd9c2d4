"""Fully dynamic maximal matching with a randomized level hierarchy.

Every vertex sits at a level in ``[-1, top]`` with ``top = floor(log4 n)``.
Free vertices live at level -1 and matched pairs share a level.  Each edge is
owned by its higher-level endpoint (ties go to the larger id).  For a vertex
``v`` the owned neighbours are kept in ``owned[v]`` and the remaining
neighbours, bucketed by their level, in ``others[v][level]``.

``phi[v][j]`` counts the neighbours of ``v`` below level ``j`` for every
``j > level(v)``; when it reaches ``4**j`` the vertex is lifted to level
``j``.  On top of that deterministic rule, a vertex whose counter at a higher
level increases rises with probability ``p_rise(j)`` and a vertex that loses
an equal-level neighbour, or gains a lower one, resets its matched edge with
probability ``p_reset(level)``.  These coins keep an oblivious adversary from
steering the structure into repeatedly deleting expensive matched edges.

All work is expressed as cost-announcing generators (see
:class:`~dynalgo.core.SteppableUpdater`), one unit per dictionary, set or
queue operation.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .core import (Edge, OpKind, RandomSource, SteppableUpdater, UpdateOp,
                   bernoulli, canonical, ceil_log2, floor_log4)


@dataclass(frozen=True)
class MatchingConfig:
    n: int
    C: int = 4
    original: bool = False  # disable the random rises and resets

    @property
    def log_n(self) -> int:
        return max(1, ceil_log2(self.n))

    @property
    def top(self) -> int:
        return floor_log4(self.n)

    def p_rise(self, i: int) -> float:
        if self.original:
            return 0.0
        return min(self.C * self.log_n / 4 ** i, 1.0)

    def p_reset(self, i: int) -> float:
        if self.original:
            return 0.0
        return 4.0 ** -(i + 3)

    def settle_threshold(self, i: int) -> float:
        """Minimum number of lower neighbours for a free vertex to stay at ``i``."""
        if self.original:
            return 4 ** i
        return 4 ** i / (32 * self.C * self.log_n)


class DynamicMatching(SteppableUpdater):
    """Maximal matching under edge insertions and deletions.

    :param n: number of vertices.
    :param seed: seed of the coin stream.
    :param C: constant in the rise probability.
    :param original: turn off the random rises and resets.
    """

    def __init__(self, n: int, seed: int = 0, C: int = 4, original: bool = False):
        super().__init__(n)
        self.config = MatchingConfig(n, C, original)
        self.rng = RandomSource(seed, "matching")
        top = self.config.top
        self.top = top
        cfg = self.config
        # per-level tables, indexed by level
        self._p_rise = [cfg.p_rise(i) for i in range(top + 1)]
        self._p_reset = [cfg.p_reset(i) for i in range(top + 1)]
        self._cap = [4 ** i for i in range(top + 1)]
        self.level = [-1] * n
        self.owned: list[set[int]] = [set() for _ in range(n)]
        # others[v][k + 1]: non-owned neighbours of v at level k >= -1
        self.others: list[list[set[int]]] = [
            [set() for _ in range(top + 2)] for _ in range(n)]
        self.phi = [[0] * (top + 1) for _ in range(n)]
        self.mate: list[int | None] = [None] * n
        self.size = 0
        self.queue: deque[int] = deque()
        self.in_queue: set[int] = set()

    # -- queries --------------------------------------------------------------
    def is_matched(self, v: int) -> bool:
        return self.mate[v] is not None

    def mate_of(self, v: int) -> int | None:
        return self.mate[v]

    def matching_size(self) -> int:
        return self.size

    def iterate_matching(self) -> Iterator[Edge]:
        for v, w in enumerate(self.mate):
            if w is not None and v < w:
                yield Edge(v, w)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.owned[u] or u in self.owned[v]

    def edges(self) -> Iterator[Edge]:
        for v, nbrs in enumerate(self.owned):
            for w in nbrs:
                yield canonical(v, w)

    def neighbours(self, v: int) -> list[int]:
        out = list(self.owned[v])
        for bucket in self.others[v]:
            out.extend(bucket)
        return out

    def _state_items(self) -> Iterable:
        yield self.level
        yield [sorted(s) for s in self.owned]
        yield [[sorted(s) for s in row] for row in self.others]
        yield self.phi
        yield self.mate
        yield list(self.queue)
        yield self.rng.getstate()

    # -- helpers ----------------------------------------------------------------
    def _owner(self, u: int, v: int) -> tuple[int, int]:
        lu, lv = self.level[u], self.level[v]
        if lu > lv or (lu == lv and u > v):
            return u, v
        return v, u

    def _enqueue(self, v: int) -> Iterator[int]:
        yield 1
        if v not in self.in_queue:
            self.in_queue.add(v)
            self.queue.append(v)

    def _unmatch(self, v: int) -> Iterator[int]:
        w = self.mate[v]
        yield 2
        self.mate[v] = None
        self.mate[w] = None
        self.size -= 1
        return w

    def _match(self, v: int, w: int) -> Iterator[int]:
        yield 2
        self.mate[v] = w
        self.mate[w] = v
        self.size += 1

    # -- updates ----------------------------------------------------------------
    def _process(self, op: UpdateOp) -> Iterator[int]:
        u, v = op.edge
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge {tuple(op.edge)} out of range")
        if op.kind is OpKind.INSERT:
            if self.has_edge(u, v):
                raise ValueError(f"duplicate insert of {tuple(op.edge)}")
            return self._insert(u, v)
        if not self.has_edge(u, v):
            raise ValueError(f"delete of absent edge {tuple(op.edge)}")
        return self._delete(u, v)

    def insert_edge(self, u: int, v: int) -> int:
        return self.apply(UpdateOp.insert(u, v))

    def delete_edge(self, u: int, v: int) -> int:
        return self.apply(UpdateOp.delete(u, v))

    def _insert(self, u: int, v: int) -> Iterator[int]:
        o, x = self._owner(u, v)
        yield 2
        self.owned[o].add(x)
        self.others[x][self.level[o] + 1].add(o)
        lo = max(self.level[u], self.level[v]) + 1
        if lo <= self.top:
            phi_u, phi_v = self.phi[u], self.phi[v]
            for j in range(lo, self.top + 1):
                yield 2
                phi_u[j] += 1
                phi_v[j] += 1
            events = [(w, j) for w in (u, v) for j in range(lo, self.top + 1)]
            for w, j in events:
                yield from self._after_increment(w, j)
        lu, lv = self.level[u], self.level[v]
        if lu != lv:
            hi = u if lu > lv else v
            yield 1
            if bernoulli(self.rng, self._p_reset[self.level[hi]]):
                yield from self._reset_matching(hi)
        if self.queue:
            yield from self._process_queue()

    def _delete(self, u: int, v: int) -> Iterator[int]:
        o, x = self._owner(u, v)
        yield 2
        self.owned[o].discard(x)
        self.others[x][self.level[o] + 1].discard(o)
        lo = max(self.level[u], self.level[v]) + 1
        if lo <= self.top:
            phi_u, phi_v = self.phi[u], self.phi[v]
            for j in range(lo, self.top + 1):
                yield 2
                phi_u[j] -= 1
                phi_v[j] -= 1
        if self.mate[u] == v:
            yield from self._unmatch(u)
            yield from self._enqueue(u)
            yield from self._enqueue(v)
            yield from self._process_queue()

    # -- procedures ---------------------------------------------------------------
    def _after_increment(self, v: int, i: int) -> Iterator[int]:
        """Coin and threshold checks that follow ``phi[v][i] += 1``."""
        if self.level[v] >= i:
            return
        yield 1
        if bernoulli(self.rng, self._p_rise[i]):
            yield from self._rise(v, self.level[v], i)
            return
        if self.phi[v][i] >= self._cap[i]:
            target = i
            row = self.phi[v]
            for j in range(self.top, i, -1):
                yield 1
                if row[j] >= self._cap[j]:
                    target = j
                    break
            yield from self._rise(v, self.level[v], target)

    def _reset_matching(self, v: int) -> Iterator[int]:
        if self.level[v] < 0 or self.mate[v] is None:
            return
        w = yield from self._unmatch(v)
        yield from self._enqueue(v)
        yield from self._enqueue(w)

    def _process_queue(self) -> Iterator[int]:
        while self.queue:
            yield 2
            v = self.queue.popleft()
            self.in_queue.discard(v)
            yield from self._fix_free_vertex(v)

    def _fix_free_vertex(self, v: int) -> Iterator[int]:
        i = self.level[v]
        if i < 0 or self.mate[v] is not None:
            return
        below = yield from self._below(v, i)
        if len(below) >= self.config.settle_threshold(i):
            yield from self._settle(v, i, below)
        else:
            yield from self._fall(v, i, below)

    def _below(self, v: int, i: int) -> Iterator[int]:
        level = self.level
        out = []
        for w in self.owned[v]:
            yield 1
            if level[w] < i:
                out.append(w)
        return out

    def _settle(self, v: int, i: int, below: list[int]) -> Iterator[int]:
        yield 1
        w = below[self.rng.randrange(len(below))]
        yield from self._move_up(w, self.level[w], i)
        x = self.mate[w]
        if x is not None:
            yield from self._unmatch(w)
            yield from self._enqueue(x)
        yield from self._match(v, w)

    def _fall(self, v: int, i: int, below: list[int]) -> Iterator[int]:
        level = self.level
        equal = [w for w in self.owned[v] if level[w] == i]
        equal.extend(self.others[v][i + 1])
        yield max(1, len(equal))
        yield from self._move_down(v, i)
        for w in below:
            yield 1
            self.phi[w][i] += 1
            yield from self._after_increment(w, i)
        p = self.config.p_reset(i)
        for w in equal:
            yield 1
            if bernoulli(self.rng, p):
                yield from self._reset_matching(w)
        yield from self._enqueue(v)

    def _rise(self, v: int, i: int, j: int) -> Iterator[int]:
        yield from self._move_up(v, i, j)
        w = self.mate[v]
        if w is not None:
            yield from self._unmatch(v)
            yield from self._enqueue(w)
        yield from self._enqueue(v)

    # -- level changes ------------------------------------------------------------
    # others[v][k + 1] holds the non-owned neighbours of v at level k.

    def _move_down(self, v: int, i: int) -> Iterator[int]:
        """Move ``v`` from level ``i`` to ``i - 1`` and fix ownership."""
        level, owned, others = self.level, self.owned, self.others
        nv = i - 1
        mine = owned[v]
        for w in list(mine):
            yield 3
            lw = level[w]
            others[w][i + 1].discard(v)
            if lw == i or (lw == nv and w > v):
                # w now outranks v and takes the edge
                mine.discard(w)
                owned[w].add(v)
                others[v][lw + 1].add(w)
            else:
                others[w][nv + 1].add(v)
        yield 1
        level[v] = nv
        self.phi[v][i] = len(mine) + len(others[v][nv + 1])

    def _move_up(self, v: int, i: int, j: int) -> Iterator[int]:
        """Move ``v`` from level ``i`` to a higher level ``j``."""
        level, owned, others, phi = self.level, self.owned, self.others, self.phi
        mine = owned[v]
        for w in mine:
            yield 2
            others[w][i + 1].discard(v)
            others[w][j + 1].add(v)
        for k in range(i, j + 1):
            bucket = others[v][k + 1]
            if not bucket:
                continue
            for w in list(bucket):
                if k < j or v > w:
                    yield 3
                    bucket.discard(w)
                    owned[w].discard(v)
                    mine.add(w)
                    others[w][j + 1].add(v)
        for w in mine:
            lw = level[w]
            row = phi[w]
            for k in range(max(i, lw) + 1, j + 1):
                yield 1
                row[k] -= 1
        yield 1
        level[v] = j
        row = phi[v]
        for k in range(0, j + 1):
            row[k] = 0
