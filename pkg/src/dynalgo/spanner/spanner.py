"""Fully dynamic (2k-1)-spanner built from a k-level clustering hierarchy.

Level 0 holds the input graph with every vertex as its own cluster.  At each
level a random subset of the cluster centers stays sampled.  A vertex next to
a sampled cluster hooks onto one of its edges into such a cluster, chosen
uniformly at random, and joins that cluster on the next level.  Vertices with
no sampled neighbour drop out and instead keep one edge to every neighbouring
cluster in the spanner.  Edges between two non-sampled vertices only reach
the next level if both endpoint filters pass them; for each cluster whose
edges a filter withholds, the spanner keeps one compensating edge.

Updates travel upwards as batches.  Each level applies its batch, records
which registrations, vertices, compensating edges and next-level edges may
have changed, recomputes exactly those, and hands the resulting edge and
vertex changes to the level above.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

from ..core import (Edge, OpKind, RandomSource, SteppableUpdater, UpdateOp,
                    canonical, ceil_log2)
from ..oracles import stretch_check
from .filter import FilterState, filter_params, make_filter

DEL, VTX, ADD = 0, 1, 2


@dataclass(frozen=True)
class SpannerParams:
    """Parameters of the hierarchy and the filters.

    ``ell_scale`` multiplies the filter prefix length; values below one make
    filtering kick in at small ``n``.
    """

    n: int
    k: int
    a: float = 2.0
    eps: float = 0.25
    gamma: float = 80.0
    ell_scale: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        # k = 2 is always allowed so that tiny graphs still get a 3-spanner
        if self.k < 2 or (self.k > 2 and 2 ** self.k > self.n):
            raise ValueError(f"k={self.k} outside [2, max(2, log2 n)]")
        if not (self.a > 1 and 0 < self.eps <= 0.25 and self.ell_scale > 0):
            raise ValueError("need a > 1, 0 < eps <= 1/4, ell_scale > 0")

    @property
    def p(self) -> float:
        return self.n ** (-1.0 / self.k)

    @property
    def lam(self) -> int:
        return filter_params(self.n, self.k, self.a, self.eps, self.gamma)[0]

    @property
    def ell_filter(self) -> float:
        return filter_params(self.n, self.k, self.a, self.eps, self.gamma)[1]

    @property
    def ell(self) -> float:
        """Prefix length actually used by the filters."""
        return self.ell_filter * self.ell_scale

    @property
    def max_bucket(self) -> int:
        return ceil_log2(self.n)


def size_shape(n: int, k: int) -> float:
    """``n**(1 + 1/k) * log2(n)**6 * log2(log2(n))``, the growth of the spanner size."""
    lg = math.log2(n)
    return n ** (1 + 1 / k) * lg ** 6 * max(1.0, math.log2(lg))


class IndexedSet:
    """Set with O(1) uniform sampling."""

    __slots__ = ("items", "pos")

    def __init__(self):
        self.items: list[int] = []
        self.pos: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, x) -> bool:
        return x in self.pos

    def __iter__(self):
        return iter(self.items)

    def add(self, x: int) -> None:
        self.pos[x] = len(self.items)
        self.items.append(x)

    def remove(self, x: int) -> None:
        i = self.pos.pop(x)
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def choice(self, rng: RandomSource) -> int:
        return self.items[rng.randrange(len(self.items))]


def sample_hierarchy(n: int, k: int, seed: int) -> list[set[int]]:
    """``S_0 = V``, each ``S_i`` keeps members of ``S_{i-1}`` w.p. ``n**(-1/k)``; ``S_k`` is empty."""
    rng = RandomSource(seed, "sampling")
    p = n ** (-1.0 / k)
    levels = [set(range(n))]
    for _ in range(1, k):
        levels.append({v for v in sorted(levels[-1]) if rng.random() < p})
    levels.append(set())
    return levels


class Level:
    """State of one level of the hierarchy."""

    def __init__(self, i: int, top: bool, sampled: set[int]):
        self.i = i
        self.top = top                      # last level: nothing is sampled
        self.sampled = sampled              # centers whose clusters are sampled
        self.center: dict[int, int] = {}    # V_i -> cluster center
        self.adj: dict[int, set[int]] = {}  # E_i
        self.nbr: dict[int, dict[int, set[int]]] = {}  # u -> cluster -> neighbours
        self.reg: dict[tuple[int, int], int] = {}      # (u, w) -> cluster of w as registered
        self.rset: dict[int, IndexedSet] = {}          # neighbours in sampled clusters
        self.hook: dict[int, int] = {}
        self.up: dict[int, int] = {}        # u -> its cluster center one level up
        self.filters: dict[int, FilterState] = {}
        self.contrib: dict[tuple[int, int], Edge] = {}
        self.up_edges: set[Edge] = set()    # E_{i+1}

    def is_sampled(self, u: int) -> bool:
        return self.center[u] in self.sampled


class Spanner(SteppableUpdater):
    """Dynamic (2k-1)-spanner.

    :param n: number of vertices.
    :param k: stretch parameter, ``2 <= k <= log2 n``.
    :param seed: seed for sampling, hooks and filter coins.
    :param ell_scale: multiplier of the filter prefix length.
    """

    def __init__(self, n: int, k: int = 2, seed: int = 0, ell_scale: float = 1.0,
                 a: float = 2.0, eps: float = 0.25, gamma: float = 80.0):
        super().__init__(n)
        self.params = SpannerParams(n, k, a, eps, gamma, ell_scale)
        self.k = k
        self.samples = sample_hierarchy(n, k, seed)
        self.rng = RandomSource(seed, "spanner")
        self.lam = self.params.lam
        self.ell = self.params.ell
        self.levels = [Level(i, i == k - 1, self.samples[i + 1]) for i in range(k)]
        lvl0 = self.levels[0]
        for v in range(n):
            lvl0.center[v] = v
            lvl0.adj[v] = set()
        self.H: Counter = Counter()
        self.filter_changes = 0   # total flips of filtered-through sets

    # -- queries ----------------------------------------------------------------
    def spanner_edges(self) -> set[Edge]:
        return set(self.H)

    def spanner_size(self) -> int:
        return len(self.H)

    def edges(self) -> Iterator[Edge]:
        for u, nb in self.levels[0].adj.items():
            for w in nb:
                if u < w:
                    yield Edge(u, w)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.levels[0].adj[u]

    def verify_stretch(self, sample_size: int | None = None, seed: int = 0):
        """Check that sampled edges have a short path in the spanner.

        Returns ``(ok, worst)`` where ``worst`` is the largest distance found.
        """
        edges = sorted(self.edges())
        if sample_size is not None and sample_size < len(edges):
            rng = RandomSource(seed, "verify")
            edges = [edges[i] for i in sorted(
                rng.sample(range(len(edges)), sample_size))]
        return stretch_check(edges, self.H, 2 * self.k - 1)

    def cluster_of(self, i: int, u: int) -> int | None:
        return self.levels[i].center.get(u)

    def hook_of(self, i: int, u: int) -> int | None:
        return self.levels[i].hook.get(u)

    def _state_items(self) -> Iterable:
        for lv in self.levels:
            yield sorted(lv.center.items())
            yield sorted((u, sorted(ws)) for u, ws in lv.adj.items())
            yield sorted(lv.reg.items())
            yield sorted(lv.hook.items())
            yield sorted(lv.up.items())
            yield sorted(lv.contrib.items())
            yield sorted(lv.up_edges)
            for u in sorted(lv.filters):
                f = lv.filters[u]
                yield u, sorted(f.bucket_of.items()), sorted(f.passed), sorted(f.inactive)
        yield sorted(self.H.items())
        yield self.rng.getstate()

    # -- updates ----------------------------------------------------------------
    def insert_edge(self, u: int, v: int) -> int:
        return self.apply(UpdateOp.insert(u, v))

    def delete_edge(self, u: int, v: int) -> int:
        return self.apply(UpdateOp.delete(u, v))

    def _process(self, op: UpdateOp) -> Iterator[int]:
        e = op.edge
        if not (0 <= e.lo < self.n and 0 <= e.hi < self.n):
            raise ValueError(f"edge {tuple(e)} out of range")
        present = self.has_edge(*e)
        if op.kind is OpKind.INSERT and present:
            raise ValueError(f"duplicate insert of {tuple(e)}")
        if op.kind is OpKind.DELETE and not present:
            raise ValueError(f"delete of absent edge {tuple(e)}")
        return self._propagate([(ADD if op.kind is OpKind.INSERT else DEL, e)])

    def _propagate(self, batch: list) -> Iterator[int]:
        for lv in self.levels:
            if not batch:
                break
            batch = yield from self._run_level(lv, batch)

    # -- one level --------------------------------------------------------------
    def _run_level(self, lv: Level, batch: list) -> Iterator[int]:
        dirty_pairs: set[tuple[int, int]] = set()
        dirty_vertices: set[int] = set()
        dirty_contrib: set[tuple[int, int]] = set()
        dirty_edges: set[Edge] = set()
        self._hook_before: dict[int, int | None] = {}

        # 1. apply the incoming changes
        for item in batch:
            kind = item[0]
            yield 2
            if kind == DEL:
                a, b = item[1]
                lv.adj[a].discard(b)
                lv.adj[b].discard(a)
                dirty_pairs.add((a, b))
                dirty_pairs.add((b, a))
                dirty_edges.add(item[1])
            elif kind == ADD:
                a, b = item[1]
                lv.adj[a].add(b)
                lv.adj[b].add(a)
                dirty_pairs.add((a, b))
                dirty_pairs.add((b, a))
                dirty_edges.add(item[1])
            else:
                _, u, c = item
                dirty_vertices.add(u)
                if c is None:
                    lv.center.pop(u, None)
                    nb = lv.adj.pop(u, None)
                    assert not nb, "vertex left a level with edges attached"
                    continue
                lv.center[u] = c
                nb = lv.adj.setdefault(u, set())
                for w in nb:
                    yield 2
                    dirty_pairs.add((w, u))
                    dirty_edges.add(canonical(u, w))

        # 2. registrations of (vertex, neighbour) pairs
        for u, w in sorted(dirty_pairs):
            yield self.ordered_cost
            yield from self._refresh_pair(lv, u, w, dirty_vertices, dirty_contrib,
                                          dirty_edges)

        # 3. hooks and the cluster one level up
        next_vertices = []
        for u in sorted(dirty_vertices):
            yield self.ordered_cost
            change = yield from self._refresh_vertex(lv, u, dirty_contrib, dirty_edges)
            if change is not None:
                next_vertices.append(change)

        # 4. compensating edges
        for u, c in sorted(dirty_contrib):
            yield self.ordered_cost
            self._refresh_contrib(lv, u, c)

        # 5. membership of the next level's edge set
        if lv.top:
            return []
        dels, adds = [], []
        for e in sorted(dirty_edges):
            yield self.ordered_cost
            inside = self._promoted(lv, e)
            if inside and e not in lv.up_edges:
                lv.up_edges.add(e)
                adds.append((ADD, e))
            elif not inside and e in lv.up_edges:
                lv.up_edges.discard(e)
                dels.append((DEL, e))
        return dels + next_vertices + adds

    def _filter(self, lv: Level, u: int) -> FilterState:
        f = lv.filters.get(u)
        if f is None:
            f = lv.filters[u] = make_filter(self.lam, self.ell, self.rng, self.ordered_cost)
        return f

    def _refresh_pair(self, lv: Level, u: int, w: int, dirty_vertices, dirty_contrib,
                      dirty_edges) -> Iterator[int]:
        key = (u, w)
        old = lv.reg.get(key)
        new = lv.center[w] if (u in lv.adj and w in lv.adj[u]) else None
        if old == new:
            return
        sampled = lv.sampled
        if old is not None and new is not None and old in sampled and new in sampled:
            # w switched between sampled clusters: only the bucketing changes
            yield 2
            self._nbr_remove(lv, u, old, w)
            lv.nbr.setdefault(u, {}).setdefault(new, set()).add(w)
            lv.reg[key] = new
            dirty_vertices.add(u)
            dirty_contrib.add((u, old))
            dirty_contrib.add((u, new))
            return
        e = canonical(u, w)
        if old is not None:
            yield 2
            self._nbr_remove(lv, u, old, w)
            del lv.reg[key]
            dirty_contrib.add((u, old))
            if old in sampled:
                lv.rset[u].remove(w)
                if not lv.rset[u]:
                    del lv.rset[u]
                dirty_vertices.add(u)
            else:
                f = lv.filters[u]
                yield from f.delete(old, e)
                self._collect(lv, u, f, dirty_contrib, dirty_edges)
                if not len(f):
                    del lv.filters[u]
        if new is not None:
            yield 2
            lv.nbr.setdefault(u, {}).setdefault(new, set()).add(w)
            lv.reg[key] = new
            dirty_contrib.add((u, new))
            if new in sampled:
                rs = lv.rset.get(u)
                if rs is None:
                    rs = lv.rset[u] = IndexedSet()
                rs.add(w)
                dirty_vertices.add(u)
                h = lv.hook.get(u)
                if h is not None and h in rs and h != w:
                    # reservoir step keeps the hook uniform over the grown set
                    yield 1
                    if self.rng.randrange(len(rs)) == 0:
                        self._set_hook(lv, u, w)
            else:
                f = self._filter(lv, u)
                yield from f.insert(new, e)
                self._collect(lv, u, f, dirty_contrib, dirty_edges)

    def _collect(self, lv: Level, u: int, f: FilterState, dirty_contrib, dirty_edges):
        for e in f.flipped_edges:
            dirty_edges.add(e)
        for c in f.flipped_clusters:
            dirty_contrib.add((u, c))
        self.filter_changes += len(f.flipped_edges)
        f.flipped_edges.clear()
        f.flipped_clusters.clear()

    @staticmethod
    def _nbr_remove(lv: Level, u: int, c: int, w: int) -> None:
        bucket = lv.nbr[u][c]
        bucket.discard(w)
        if not bucket:
            del lv.nbr[u][c]
            if not lv.nbr[u]:
                del lv.nbr[u]

    def _set_hook(self, lv: Level, u: int, w: int | None) -> None:
        if u not in self._hook_before:
            self._hook_before[u] = lv.hook.get(u)
        if w is None:
            lv.hook.pop(u, None)
        else:
            lv.hook[u] = w

    def _refresh_vertex(self, lv: Level, u: int, dirty_contrib, dirty_edges) -> Iterator[int]:
        hook = None
        if u not in lv.center:
            up = None
        elif lv.is_sampled(u):
            up = lv.center[u]
        else:
            rs = lv.rset.get(u)
            if not rs:
                up = None
            else:
                hook = lv.hook.get(u)
                if hook is None or hook not in rs:
                    yield 1
                    hook = rs.choice(self.rng)
                up = lv.center[hook]
        if lv.hook.get(u) != hook:
            self._set_hook(lv, u, hook)
        before = self._hook_before.pop(u, lv.hook.get(u))
        if before != hook:
            yield 2
            if before is not None:
                self._h_remove(canonical(u, before))
            if hook is not None:
                self.H[canonical(u, hook)] += 1
        old_up = lv.up.get(u)
        if old_up == up:
            return None
        yield 2
        if up is None:
            del lv.up[u]
        else:
            lv.up[u] = up
        for w in lv.adj.get(u, ()):
            yield 1
            dirty_edges.add(canonical(u, w))
        if (old_up is None) != (up is None):
            for c in lv.nbr.get(u, ()):
                yield 1
                dirty_contrib.add((u, c))
        if lv.top:
            return None
        return (VTX, u, up)

    def _refresh_contrib(self, lv: Level, u: int, c: int) -> None:
        key = (u, c)
        ws = lv.nbr.get(u, {}).get(c)
        want = False
        if ws and c not in lv.sampled and u in lv.center:
            if u not in lv.up:
                want = True
            else:
                f = lv.filters.get(u)
                want = f is not None and c in f.inactive
        old = lv.contrib.get(key)
        if want:
            if old is not None and (old.lo if old.hi == u else old.hi) in ws:
                return
            new = canonical(u, min(ws))
            if old is not None:
                self._h_remove(old)
            lv.contrib[key] = new
            self.H[new] += 1
        elif old is not None:
            del lv.contrib[key]
            self._h_remove(old)

    def _h_remove(self, e: Edge) -> None:
        c = self.H[e] - 1
        if c:
            self.H[e] = c
        else:
            del self.H[e]

    def _promoted(self, lv: Level, e: Edge) -> bool:
        a, b = e
        adj_a = lv.adj.get(a)
        if adj_a is None or b not in adj_a:
            return False
        ua, ub = lv.up.get(a), lv.up.get(b)
        if ua is None or ub is None or ua == ub:
            return False
        if lv.is_sampled(a) or lv.is_sampled(b):
            return True
        fa, fb = lv.filters.get(a), lv.filters.get(b)
        return (fa is not None and e in fa.passed) and (fb is not None and e in fb.passed)
