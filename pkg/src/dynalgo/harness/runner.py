"""Replay a workload through an algorithm, meter it and verify it."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import Edge, GraphEdges, SteppableUpdater, derive_seed
from ..deamortizer import (ReductionState, apply_update, new_phases, new_reduction,
                           phase_apply)
from ..matching import DynamicMatching
from ..oracles import matching_problems, matching_violations, stretch_check
from ..spanner import Spanner
from .workloads import Workload


@dataclass
class RunConfig:
    algo: str = "matching"
    n: int = 64
    k: int = 2
    seed: int = 0
    wrap: bool = False
    copies_c: int = 1
    alpha: float | None = None
    ell: int | None = None
    phase_len: int | None = None   # rotate instances instead of a fixed horizon
    verify: str = "sample:64"
    ell_scale: float = 1.0
    C: int = 4
    original: bool = False
    pilot: int = 1000

    def __post_init__(self):
        if self.algo not in ("matching", "spanner"):
            raise ValueError(f"unknown algorithm {self.algo!r}")
        parse_verify(self.verify)


def parse_verify(mode: str) -> tuple[str, int]:
    """``none``, ``every``, ``final`` or ``sample:K`` (every K-th update)."""
    if mode in ("none", "every", "final"):
        return mode, 1
    if mode.startswith("sample:"):
        k = int(mode.split(":", 1)[1])
        if k < 1:
            raise ValueError("sample interval must be positive")
        return "sample", k
    raise ValueError(f"unknown verification mode {mode!r}")


def make_factory(cfg: RunConfig, n: int) -> Callable[[int], SteppableUpdater]:
    if cfg.algo == "matching":
        return lambda s: DynamicMatching(n, seed=s, C=cfg.C, original=cfg.original)
    return lambda s: Spanner(n, cfg.k, seed=s, ell_scale=cfg.ell_scale)


def calibrate_alpha(workload: Workload, factory, pilot: int = 1000, seed: int = 0) -> int:
    """Four times the median per-update cost over a pilot prefix, unwrapped."""
    algo = factory(derive_seed(seed, "pilot"))
    costs = [algo.apply(op) for op in workload.ops[:pilot]]
    if not costs:
        return 1
    return max(1, math.ceil(4 * float(np.median(costs))))


def summarize(units) -> dict:
    a = np.asarray(units, dtype=float)
    if a.size == 0:
        return {"p50": 0, "p90": 0, "p99": 0, "max": 0, "mean": 0.0}
    q = np.percentile(a, [50, 90, 99], method="inverted_cdf")
    return {"p50": int(q[0]), "p90": int(q[1]), "p99": int(q[2]),
            "max": int(a.max()), "mean": round(float(a.mean()), 6)}


def check_instance(algo: SteppableUpdater, edges: set[Edge]) -> list[str]:
    if isinstance(algo, DynamicMatching):
        probs = matching_problems(edges, algo.iterate_matching())
        return probs + matching_violations(algo, edges)
    H = algo.spanner_edges()
    probs = []
    if not H <= edges:
        probs.append("spanner holds edges outside the graph")
    ok, _ = stretch_check(edges, H, 2 * algo.k - 1)
    if not ok:
        probs.append("stretch bound violated")
    return probs


@dataclass
class RunResult:
    report: dict
    units: list[int]
    flush_units: list[int]
    instance: SteppableUpdater
    state: object
    edges: set[Edge]

    def to_json(self) -> str:
        return json.dumps(self.report, sort_keys=True, indent=2)


def run(workload: Workload, cfg: RunConfig) -> RunResult:
    n = workload.n
    factory = make_factory(cfg, n)
    mode, every = parse_verify(cfg.verify)
    graph = GraphEdges(n)
    state = None
    if cfg.wrap:
        alpha = cfg.alpha or calibrate_alpha(workload, factory, cfg.pilot, cfg.seed)
        if cfg.phase_len:
            state = new_phases(factory, n, alpha, cfg.copies_c, cfg.seed, cfg.phase_len)
        else:
            ell = cfg.ell or max(2, len(workload))
            state = new_reduction(factory, n, alpha, ell, cfg.copies_c, cfg.seed)
    else:
        single = factory(derive_seed(cfg.seed, "copy/0"))

    units: list[int] = []
    flush_units: list[int] = []
    checked = failed = 0
    first_failure = None
    total = len(workload.ops)
    for t, op in enumerate(workload.ops):
        graph.apply(op)
        if state is None:
            units.append(single.apply(op))
            flush_units.append(0)
        elif cfg.phase_len:
            rep = phase_apply(state, op)
            units.append(rep.units)
            flush_units.append(rep.flush_units)
        else:
            rep = apply_update(state, op)
            units.append(rep.units)
            flush_units.append(rep.flush_units)
        last = t == total - 1
        due = (mode == "every" or (mode == "sample" and (t + 1) % every == 0)
               or (mode in ("final", "sample") and last))
        if due:
            target = _pointed(state, single if state is None else None)
            probs = check_instance(target, graph.edges)
            if cfg.algo == "spanner" and state is not None:
                probs += _union_problems(state, graph.edges, cfg.k)
            checked += 1
            if probs:
                failed += 1
                if first_failure is None:
                    first_failure = {"update": t, "digest": target.state_digest(),
                                     "problems": probs[:10]}

    final = _pointed(state, single if state is None else None)
    report = {"algo": cfg.algo, "n": n, "seed": cfg.seed, "wrapped": cfg.wrap,
              "units": summarize(units),
              "units_no_flush": summarize([u - f for u, f in zip(units, flush_units)]),
              "flush_count": _flushes(state),
              "verify": {"mode": cfg.verify, "checked": checked, "failed": failed}}
    if first_failure is not None:
        report["verify"]["first_failure"] = first_failure
    if cfg.algo == "spanner":
        report["k"] = cfg.k
        report["spanner_size"] = final.spanner_size()
    if state is not None:
        red = state.active if cfg.phase_len else state
        report["q"] = red.q
        report["r"] = red.r
    return RunResult(report, units, flush_units, final, state, set(graph.edges))


def _reduction(state) -> ReductionState:
    return state if isinstance(state, ReductionState) else state.active


def _pointed(state, single):
    if state is None:
        return single
    return _reduction(state).pointed()


def _flushes(state) -> int:
    if state is None:
        return 0
    if isinstance(state, ReductionState):
        return state.flush_count
    return state.flush_total


def union_spanner(state, edges: set[Edge]) -> set[Edge]:
    """Union of every copy's spanner, restricted to the current graph.

    Lagging copies may still hold edges that were deleted since; those are
    dropped.
    """
    out: set[Edge] = set()
    for cp in _reduction(state).copies:
        out |= cp.algo.spanner_edges()
    return out & edges


def _union_problems(state, edges: set[Edge], k: int) -> list[str]:
    ok, _ = stretch_check(edges, union_spanner(state, edges), 2 * k - 1)
    return [] if ok else ["stretch bound violated by the union of copies"]


def state_dump(result: RunResult, cfg: RunConfig) -> dict:
    """Serializable snapshot for offline verification."""
    inst = result.instance
    dump = {"algo": cfg.algo, "n": inst.n, "edges": sorted(map(list, result.edges))}
    if cfg.algo == "matching":
        dump["matching"] = sorted(map(list, inst.iterate_matching()))
    else:
        dump["k"] = cfg.k
        dump["spanner"] = sorted(map(list, inst.spanner_edges()))
    return dump


def verify_dump(dump: dict) -> list[str]:
    edges = {Edge(*sorted(e)) for e in dump["edges"]}
    if dump["algo"] == "matching":
        return matching_problems(edges, [Edge(*sorted(e)) for e in dump["matching"]])
    H = {Edge(*sorted(e)) for e in dump["spanner"]}
    probs = []
    if not H <= edges:
        probs.append("spanner holds edges outside the graph")
    ok, _ = stretch_check(edges, H, 2 * int(dump["k"]) - 1)
    if not ok:
        probs.append("stretch bound violated")
    return probs
