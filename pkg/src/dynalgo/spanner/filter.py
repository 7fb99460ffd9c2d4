"""Per-vertex edge filter.

For a vertex ``u`` the filter sees the edges from ``u`` into each neighbouring
non-sampled cluster.  Clusters are grouped into buckets by roughly how many
edges they send to ``u``: bucket ``j`` holds clusters with about ``2**j``
edges, and the special bucket ``NEG`` holds clusters with none.  Within a
bucket the cluster-edge pairs are kept in a sorted tree.  Only the pairs past
a fixed-length prefix of that tree are *filtered through* (passed on to the
next level), and the first few clusters of each bucket are marked *inactive*
so that the spanner can add one compensating edge for each of them.

A cluster changes bucket only after its edge count drifted by a factor two,
and then only with a probability that makes an oblivious adversary unlikely
to hit the expensive move.  Forced moves keep counts within a factor
``lam`` of the bucket scale.
"""
from __future__ import annotations

import math
from typing import Iterator

from sortedcontainers import SortedList

from ..core import RandomSource, bernoulli, ceil_log2, floor_log2

NEG = -1
"""Bucket index for clusters with no edges."""


def bucket_scale(j: int) -> int:
    return 0 if j == NEG else 1 << j


class FilterState:
    """Filter for one vertex.

    :param pair_prefix: function ``j -> number of leading pairs of T_j that
        are withheld``.
    :param cluster_prefix: number of leading clusters of each bucket that are
        inactive.
    :param lam: slack factor, a power of two.
    :param rng: coin source.
    :param cost: unit price of one sorted-tree operation.
    """

    def __init__(self, pair_prefix, cluster_prefix: int, lam: int,
                 rng: RandomSource, cost: int = 1, ell: float = 0.0):
        self.ell = ell  # nominal prefix length, for checks
        self.pair_prefix = pair_prefix
        self.cluster_prefix = cluster_prefix
        self.lam = lam
        self.rng = rng
        self.cost = cost
        self.bucket_of: dict[int, int] = {}
        self.edges_of: dict[int, set] = {}
        self.buckets: dict[int, SortedList] = {}
        self.trees: dict[int, SortedList] = {}
        self.passed: set = set()      # the filtered-through edges
        self.inactive: set[int] = set()
        # flips since the caller last cleared them
        self.flipped_edges: list = []
        self.flipped_clusters: list[int] = []
        self.changes = 0

    # -- queries ------------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.edges_of)

    def size(self, c: int) -> int:
        s = self.edges_of.get(c)
        return len(s) if s else 0

    def bucket(self, c: int) -> int:
        return self.bucket_of.get(c, NEG)

    def is_passed(self, e) -> bool:
        return e in self.passed

    # -- tree maintenance -------------------------------------------------------
    def _flip_edge(self, e, add: bool) -> None:
        if add:
            self.passed.add(e)
        else:
            self.passed.remove(e)
        self.flipped_edges.append(e)
        self.changes += 1

    def _flip_cluster(self, c: int, add: bool) -> None:
        if add:
            self.inactive.add(c)
        else:
            self.inactive.remove(c)
        self.flipped_clusters.append(c)

    def _add_pair(self, j: int, c: int, e) -> None:
        tree = self.trees.get(j)
        if tree is None:
            tree = self.trees[j] = SortedList()
        pair = (c, e)
        idx = tree.bisect_left(pair)
        tree.add(pair)
        cut = self.pair_prefix(j)
        if idx < cut:
            if len(tree) > cut:
                self._flip_edge(tree[cut][1], True)
        else:
            self._flip_edge(e, True)

    def _remove_pair(self, j: int, c: int, e) -> None:
        tree = self.trees[j]
        pair = (c, e)
        idx = tree.bisect_left(pair)
        del tree[idx]
        cut = self.pair_prefix(j)
        if idx < cut:
            if len(tree) >= cut:
                self._flip_edge(tree[cut - 1][1], False)
        else:
            self._flip_edge(e, False)
        if not tree:
            del self.trees[j]

    def _add_cluster(self, j: int, c: int) -> None:
        b = self.buckets.get(j)
        if b is None:
            b = self.buckets[j] = SortedList()
        idx = b.bisect_left(c)
        b.add(c)
        cut = self.cluster_prefix
        if idx < cut:
            self._flip_cluster(c, True)
            if len(b) > cut:
                self._flip_cluster(b[cut], False)

    def _remove_cluster(self, j: int, c: int) -> None:
        b = self.buckets[j]
        idx = b.bisect_left(c)
        del b[idx]
        cut = self.cluster_prefix
        if idx < cut:
            self._flip_cluster(c, False)
            if len(b) >= cut:
                self._flip_cluster(b[cut - 1], True)
        if not b:
            del self.buckets[j]

    def _move(self, c: int, j: int, target: int) -> Iterator[int]:
        edges = self.edges_of[c]
        cost = self.cost
        if j != NEG:
            for e in edges:
                yield cost
                self._remove_pair(j, c, e)
            yield cost
            self._remove_cluster(j, c)
        self.bucket_of[c] = target
        if target != NEG:
            yield cost
            self._add_cluster(target, c)
            for e in edges:
                yield cost
                self._add_pair(target, c, e)

    # -- updates --------------------------------------------------------------------
    def insert(self, c: int, e) -> Iterator[int]:
        """Add edge ``e`` into cluster ``c``."""
        edges = self.edges_of.get(c)
        if edges is None:
            edges = self.edges_of[c] = set()
            self.bucket_of[c] = NEG
        if e in edges:
            raise ValueError(f"edge {e} already in cluster {c}")
        yield 1
        edges.add(e)
        j = self.bucket_of[c]
        if j != NEG:
            yield self.cost
            self._add_pair(j, c, e)
        size = len(edges)
        alpha = bucket_scale(j)
        if size >= 2 * alpha:
            forced = size >= self.lam * alpha
            yield 1
            if forced or bernoulli(self.rng, min(1.0, 1.0 / alpha) if alpha else 1.0):
                yield from self._move(c, j, ceil_log2(size))

    def delete(self, c: int, e) -> Iterator[int]:
        """Remove edge ``e`` from cluster ``c``."""
        edges = self.edges_of[c]
        if e not in edges:
            raise ValueError(f"edge {e} not in cluster {c}")
        j = self.bucket_of[c]
        yield self.cost
        self._remove_pair(j, c, e)
        edges.remove(e)
        size = len(edges)
        alpha = bucket_scale(j)
        if 2 * size <= alpha:
            if size == 0:
                p = 1.0
            else:
                t = (alpha // size).bit_length() - 1
                p = min(2.0 ** (2 * t + 1) / alpha, 1.0)
            forced = size * self.lam <= alpha
            yield 1
            if forced or bernoulli(self.rng, p):
                yield from self._move(c, j, NEG if size == 0 else floor_log2(size))
        if not edges and self.bucket_of[c] == NEG:
            del self.edges_of[c]
            del self.bucket_of[c]


def filter_params(n: int, k: int, a: float = 2.0, eps: float = 0.25,
                  gamma: float = 80.0) -> tuple[int, float]:
    """Slack ``lam`` and prefix length ``ell`` of the filter for ``n`` and ``k``."""
    lam = 1 << ceil_log2(4 + math.log(n))
    ell = 4 * gamma * a * lam ** 2 * eps ** -3 * n ** (1 / k) * math.log(n) * math.log(lam)
    return lam, ell


def make_filter(lam: int, ell: float, rng: RandomSource, cost: int = 1) -> FilterState:
    """Filter whose withheld prefixes are derived from ``ell``.

    Bucket ``j`` withholds its first ``ceil(ell * lam * 2**j)`` pairs and marks
    its first ``1 + ceil(lam**2 * ell)`` clusters inactive.
    """
    cache: dict[int, int] = {}

    def pair_prefix(j: int) -> int:
        v = cache.get(j)
        if v is None:
            v = cache[j] = math.ceil(ell * lam * (1 << j))
        return v

    return FilterState(pair_prefix, 1 + math.ceil(lam * lam * ell), lam, rng, cost, ell)
