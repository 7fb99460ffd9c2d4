"""Update streams: generators, file format and replay validation.

A workload file starts with ``n <N>`` followed by one operation per line,
``i <u> <v>`` for an insertion and ``d <u> <v>`` for a deletion.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

from ..core import Edge, GraphEdges, OpKind, RandomSource, UpdateOp, canonical, ceil_log2


@dataclass
class Workload:
    n: int
    ops: list[UpdateOp]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.ops)

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"n {self.n}\n")
        for op in self.ops:
            out.write(f"{op.kind.value} {op.edge.lo} {op.edge.hi}\n")
        return out.getvalue()

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text(), newline="\n")

    @classmethod
    def from_text(cls, text: str) -> "Workload":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty workload")
        head = lines[0].split()
        if len(head) != 2 or head[0] != "n":
            raise ValueError("workload must start with 'n <N>'")
        n = int(head[1])
        ops = []
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3 or parts[0] not in ("i", "d"):
                raise ValueError(f"line {lineno}: expected 'i u v' or 'd u v'")
            u, v = int(parts[1]), int(parts[2])
            ops.append(UpdateOp(OpKind(parts[0]), canonical(u, v)))
        return cls(n, ops)

    @classmethod
    def load(cls, path: str | Path) -> "Workload":
        return cls.from_text(Path(path).read_text())


def validate(w: Workload) -> None:
    """Raise ``ValueError`` unless the workload replays cleanly from empty."""
    g = GraphEdges(w.n)
    for t, op in enumerate(w.ops):
        try:
            g.apply(op)
        except ValueError as exc:
            raise ValueError(f"update {t}: {exc}") from None


def final_edges(w: Workload) -> set[Edge]:
    g = GraphEdges(w.n)
    for op in w.ops:
        g.apply(op)
    return g.edges


class _EdgePool:
    """Present edges with O(1) uniform removal."""

    def __init__(self):
        self.items: list[Edge] = []
        self.pos: dict[Edge, int] = {}

    def __len__(self):
        return len(self.items)

    def __contains__(self, e):
        return e in self.pos

    def add(self, e: Edge) -> None:
        self.pos[e] = len(self.items)
        self.items.append(e)

    def pop_at(self, i: int) -> Edge:
        e = self.items[i]
        last = self.items.pop()
        del self.pos[e]
        if last != e:
            self.items[i] = last
            self.pos[last] = i
        return e


def gen_uniform(n: int, steps: int, insert_bias: float = 0.5, seed: int = 0) -> Workload:
    """Random inserts (probability ``insert_bias``) and deletes of uniform edges."""
    if n < 2 or steps < 1 or not 0 < insert_bias <= 1:
        raise ValueError("need n >= 2, steps >= 1, 0 < insert_bias <= 1")
    rng = RandomSource(seed, "gen/uniform")
    full = n * (n - 1) // 2
    pool = _EdgePool()
    ops = []
    for _ in range(steps):
        insert = rng.random() < insert_bias
        if insert and len(pool) == full:
            insert = False
        if not insert and not len(pool):
            insert = True
        if insert:
            while True:
                u, v = rng.randrange(n), rng.randrange(n)
                if u == v:
                    continue
                e = canonical(u, v)
                if e not in pool:
                    break
            pool.add(e)
            ops.append(UpdateOp(OpKind.INSERT, e))
        else:
            e = pool.pop_at(rng.randrange(len(pool)))
            ops.append(UpdateOp(OpKind.DELETE, e))
    return Workload(n, ops, {"gen": "uniform", "seed": seed, "bias": insert_bias})


def adversary_layout(i: int) -> dict:
    """Vertex roles of the x/y cycle at level ``i``.

    ``v = 0`` and its partner ``v' = 1``; ``x`` and ``y`` are two groups of
    ``4**i - 1`` vertices each.  ``n = 2 * 4**i`` so that the top level is
    ``i``.
    """
    m = 4 ** i - 1
    xs = list(range(2, 2 + m))
    ys = list(range(2 + m, 2 + 2 * m))
    return {"v": 0, "partner": 1, "xs": xs, "ys": ys, "n": 2 * 4 ** i}


def gen_matching_adversary(i: int, rounds: int, seed: int = 0,
                           final_delete: bool = False) -> Workload:
    """Cycle that keeps a high-level vertex busy with fresh low neighbours.

    Start with ``v`` adjacent to ``v'`` and to every ``x``.  Each round inserts
    an edge from ``v`` to every ``y``, deletes the edges to the ``x``, inserts
    them again and deletes the edges to the ``y``.  The edge ``(v, v')`` is
    never deleted unless ``final_delete`` is set, in which case it is deleted
    once at the very end.  The seed only shuffles the order inside each phase.
    """
    if i < 1 or rounds < 1:
        raise ValueError("need i >= 1 and rounds >= 1")
    lay = adversary_layout(i)
    v, partner, xs, ys = lay["v"], lay["partner"], lay["xs"], lay["ys"]
    rng = RandomSource(seed, "gen/adversary")
    ops = [UpdateOp.insert(v, partner)]

    # ops are immutable, so each one is built once and reused every round
    made = {(kind, x): UpdateOp(kind, canonical(v, x))
            for kind in OpKind for x in xs + ys}

    def phase(kind: OpKind, group: list[int]) -> None:
        order = list(group)
        rng.shuffle(order)
        ops.extend([made[kind, x] for x in order])

    phase(OpKind.INSERT, xs)
    for _ in range(rounds):
        phase(OpKind.INSERT, ys)
        phase(OpKind.DELETE, xs)
        phase(OpKind.INSERT, xs)
        phase(OpKind.DELETE, ys)
    if final_delete:
        ops.append(UpdateOp.delete(v, partner))
    return Workload(lay["n"], ops, {"gen": "adversary", "seed": seed, "level": i,
                                    "rounds": rounds})


def skew_layout(n: int, k: int) -> dict:
    """Vertex roles of the skewed configuration around ``u = 0``.

    One heavy group (a hub plus members attached to it, every member adjacent
    to ``u``) and ``ceil(n**(1/k) * log2 n)`` singletons with one edge to
    ``u`` each.
    """
    singles = int(-(-(n ** (1.0 / k)) * max(1, ceil_log2(n)) // 1))
    heavy = n - 2 - singles
    if heavy < 2:
        raise ValueError(f"n={n} too small for the skewed layout at k={k}")
    hub = 1
    members = list(range(2, 2 + heavy))
    singletons = list(range(2 + heavy, n))
    return {"u": 0, "hub": hub, "members": members, "singletons": singletons}


def gen_spanner_skew(n: int, k: int, seed: int = 0, churn_rounds: int = 4) -> Workload:
    """Heavy neighbouring group plus many single-edge neighbours, then churn.

    The churn repeatedly deletes a random half of the edges from ``u`` into
    the heavy group and inserts them back.
    """
    lay = skew_layout(n, k)
    u, hub, members, singles = lay["u"], lay["hub"], lay["members"], lay["singletons"]
    rng = RandomSource(seed, "gen/skew")
    ops = []
    build = [canonical(hub, x) for x in members]
    build += [canonical(u, x) for x in members]
    build += [canonical(u, s) for s in singles]
    rng.shuffle(build)
    ops.extend(UpdateOp(OpKind.INSERT, e) for e in build)
    for _ in range(churn_rounds):
        chosen = rng.sample(members, len(members) // 2)
        ops.extend(UpdateOp.delete(u, x) for x in chosen)
        rng.shuffle(chosen)
        ops.extend(UpdateOp.insert(u, x) for x in chosen)
    return Workload(n, ops, {"gen": "skew", "seed": seed, "k": k})


def gen_planted(n: int, steps: int, seed: int = 0, every: int = 50) -> Workload:
    """Uniform churn on a dense background with periodic expensive deletions.

    Every ``every`` steps the stream deletes all edges of one star built
    earlier, so that a matched high-level vertex loses its matched edge.
    """
    rng = RandomSource(seed, "gen/planted")
    base = gen_uniform(n, steps, 0.5, seed)
    present: set[Edge] = set()
    ops: list[UpdateOp] = []
    star_size = min(n - 1, 4 ** max(1, (ceil_log2(n) // 2) - 1))
    for t, op in enumerate(base.ops):
        if t % every == 0:
            center = rng.randrange(n)
            others = [x for x in range(n) if x != center]
            rng.shuffle(others)
            star = [canonical(center, x) for x in others[:star_size]]
            for e in star:
                if e not in present:
                    present.add(e)
                    ops.append(UpdateOp(OpKind.INSERT, e))
            for e in star:
                present.discard(e)
                ops.append(UpdateOp(OpKind.DELETE, e))
        e = op.edge
        if op.kind is OpKind.INSERT and e not in present:
            present.add(e)
            ops.append(op)
        elif op.kind is OpKind.DELETE and e in present:
            present.discard(e)
            ops.append(op)
    return Workload(n, ops, {"gen": "planted", "seed": seed})
