"""Brute-force correctness checks used by tests and the harness."""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable

from .core import Edge, canonical


def verify_matching(edges: Iterable[Edge], matching: Iterable[Edge]) -> bool:
    """True iff ``matching`` is a maximal matching of the graph ``edges``."""
    return not matching_problems(edges, matching)


def matching_problems(edges: Iterable[Edge], matching: Iterable[Edge]) -> list[str]:
    edges = set(edges)
    covered: set[int] = set()
    out = []
    for e in matching:
        e = canonical(*e)
        if e not in edges:
            out.append(f"matched edge {tuple(e)} is not in the graph")
        for x in e:
            if x in covered:
                out.append(f"vertex {x} matched twice")
            covered.add(x)
    for u, v in edges:
        if u not in covered and v not in covered:
            out.append(f"edge {(u, v)} has two free endpoints")
    return out


def matching_violations(m, edges: Iterable[Edge] | None = None) -> list[str]:
    """Full scan of a :class:`~dynalgo.matching.DynamicMatching` state.

    Checks edge ownership, the level tables, the counters and their
    thresholds, the matching/level correspondence, and maximality.  Every
    entry of a level table is checked against the owner's set and level, and
    the entry count must equal the edge count, so together the tables are
    exactly the non-owned side of every edge.
    """
    n, top = m.n, m.top
    level, owned, others, phi, mate = m.level, m.owned, m.others, m.phi, m.mate
    errs: list[str] = []
    owned_total = 0
    table_total = 0
    zeros = [0] * (top + 1)
    thresholds = [4 ** j for j in range(top + 1)]
    for v in range(n):
        lv = level[v]
        w = mate[v]
        mine = owned[v]
        row = phi[v]
        tabs = others[v]
        if not mine and lv == -1 and w is None and not any(tabs):
            if row != zeros:
                errs.append(f"counters of isolated vertex {v} are not zero")
            continue
        owned_total += len(mine)
        for x in mine:
            lx = level[x]
            if lv < lx or (lv == lx and v < x):
                errs.append(f"edge {(v, x)} owned by {v} against the level rule")
            if v in owned[x]:
                errs.append(f"edge {(v, x)} owned twice")
        sizes = list(map(len, tabs))
        count = sum(sizes)
        table_total += count
        if count:
            for k, t in enumerate(tabs):
                for x in t:
                    if level[x] != k - 1 or v not in owned[x]:
                        errs.append(f"stale entry {x} in level table {k - 1} of {v}")
            if any(sizes[:lv + 1]):
                errs.append(f"vertex {v} lists non-owned neighbours below its level")
        if lv >= 0 and w is None:
            errs.append(f"vertex {v} at level {lv} is free")
        if lv < 0 and w is not None:
            errs.append(f"vertex {v} at level -1 is matched")
        if w is not None:
            if mate[w] != v:
                errs.append(f"mate of {v} is not symmetric")
            if level[w] != lv:
                errs.append(f"matched pair {v},{w} on different levels")
            if w not in mine and v not in owned[w]:
                errs.append(f"matched pair {v},{w} is not an edge")
        if not mine and not count:
            if row != zeros:
                errs.append(f"counters of isolated vertex {v} are not zero")
            continue
        # phi[v][j] = |owned| + sum of tables at levels lv..j-1 for j > lv
        below = len(mine)
        for j in range(top + 1):
            if j > lv:
                if j - 1 >= lv:
                    below += sizes[j]
                if row[j] != below:
                    errs.append(f"phi[{v}][{j}] = {row[j]}, expected {below}")
                elif below >= thresholds[j]:
                    errs.append(f"phi[{v}][{j}] = {below} reached its threshold")
            elif row[j]:
                errs.append(f"phi[{v}][{j}] = {row[j]}, expected 0")
        if w is None:
            for x in mine:
                if mate[x] is None:
                    errs.append(f"edge {(v, x)} has two free endpoints")
    if table_total != owned_total:
        errs.append(f"{table_total} table entries for {owned_total} edges")
    if edges is not None:
        edges = edges if isinstance(edges, (set, frozenset)) else set(edges)
        if len(edges) != owned_total or not all(m.has_edge(a, b) for a, b in edges):
            errs.append("edge set differs from the input graph")
    if m.queue:
        errs.append("free-vertex queue not empty")
    return errs


def _ball(adj, src: int, radius: int) -> dict[int, int]:
    dist = {src: 0}
    frontier = [src]
    for d in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for y in adj.get(x, ()):
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        if not nxt:
            break
        frontier = nxt
    return dist


def stretch_check(edges: Iterable[Edge], spanner: Iterable[Edge], bound: int):
    """Check that every edge ``(u, v)`` has a ``u``-``v`` path of length at most
    ``bound`` in ``spanner``.

    Returns ``(ok, worst)``; ``worst`` is the largest distance found, or
    ``None`` for an edge with no short enough path.
    """
    hset = set(spanner)
    adj: dict[int, list[int]] = defaultdict(list)
    for a, b in hset:
        adj[a].append(b)
        adj[b].append(a)
    inner = (bound + 1) // 2
    outer = bound - inner
    balls_in: dict[int, dict[int, int]] = {}
    balls_out: dict[int, dict[int, int]] = {}
    worst = 0
    ok = True
    for e in edges:
        e = canonical(*e)
        if e in hset:
            worst = max(worst, 1)
            continue
        u, v = e
        bu = balls_in.get(u)
        if bu is None:
            bu = balls_in[u] = _ball(adj, u, inner)
        bv = balls_out.get(v)
        if bv is None:
            bv = balls_out[v] = _ball(adj, v, outer)
        if len(bu) > len(bv):
            best = min((d + bu[x] for x, d in bv.items() if x in bu), default=None)
        else:
            best = min((d + bv[x] for x, d in bu.items() if x in bv), default=None)
        if best is None or best > bound:
            ok = False
            worst = None
            continue
        if worst is not None:
            worst = max(worst, best)
    return ok, worst


def spanner_violations(sp, edges: Iterable[Edge] | None = None) -> list[str]:
    """Full scan of a :class:`~dynalgo.spanner.Spanner`: stretch, subset of
    the graph, and filter invariants at every level."""
    errs: list[str] = []
    graph = set(sp.edges()) if edges is None else set(edges)
    H = sp.spanner_edges()
    if not H <= graph:
        errs.append("spanner holds edges that are not in the graph")
    ok, worst = stretch_check(graph, H, 2 * sp.k - 1)
    if not ok:
        errs.append("stretch bound violated")
    for lv in sp.levels:
        for u, f in lv.filters.items():
            errs.extend(f"level {lv.i} vertex {u}: {m}" for m in filter_violations(f))
            for c, es in f.edges_of.items():
                nb = lv.nbr.get(u, {}).get(c, set())
                if {canonical(u, w) for w in nb} != es:
                    errs.append(f"filter of {u} at level {lv.i} out of sync for {c}")
    return errs


def filter_violations(f) -> list[str]:
    """Check the bucket bounds, prefix rules and the empty bucket of a filter."""
    from .spanner.filter import NEG, bucket_scale
    errs: list[str] = []
    lam = f.lam
    members: dict[int, list[int]] = defaultdict(list)
    for c, j in f.bucket_of.items():
        s = len(f.edges_of[c])
        if j == NEG:
            if s:
                errs.append(f"cluster {c} with {s} edges in the empty bucket")
            continue
        a = bucket_scale(j)
        if not (a <= lam * s and s <= lam * a):
            errs.append(f"cluster {c} with {s} edges in bucket {j}")
        members[j].append(c)
    passed = set()
    inactive = set()
    for j in set(members) | set(f.buckets) | set(f.trees):
        clusters = sorted(members.get(j, []))
        if list(f.buckets.get(j, [])) != clusters:
            errs.append(f"bucket {j} out of sync")
        pairs = sorted((c, e) for c in clusters for e in f.edges_of[c])
        if list(f.trees.get(j, [])) != pairs:
            errs.append(f"edge tree {j} out of sync")
        cut = f.pair_prefix(j)
        passed.update(e for _, e in pairs[cut:])
        inactive.update(clusters[:f.cluster_prefix])
        # every passed edge lives in a bucket with many clusters
        if len(pairs) > cut and len(clusters) < f.ell:
            errs.append(f"bucket {j} passes edges with only {len(clusters)} clusters")
    if passed != f.passed:
        errs.append("filtered-through set does not match the prefix rule")
    if inactive != f.inactive:
        errs.append("inactive set does not match the prefix rule")
    for c, es in f.edges_of.items():
        if any(e not in f.passed for e in es) and c not in f.inactive:
            errs.append(f"cluster {c} has withheld edges but is active")
    return errs
