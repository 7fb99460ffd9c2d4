"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (lines are written straight to the terminal) or directly with
``python tests/test_acceptance.py``.
"""
import math
import statistics
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dynalgo.core import GraphEdges, RandomSource, canonical, ceil_log2, drive
from dynalgo.counter import CounterDist, adversarial_counter_dist, simulate_counter
from dynalgo.deamortizer import apply_update, flush, new_reduction
from dynalgo.harness.runner import RunConfig, _reduction, run
from dynalgo.harness.workloads import gen_matching_adversary, gen_uniform
from dynalgo.matching import DynamicMatching
from dynalgo.oracles import stretch_check, verify_matching
from dynalgo.spanner import Spanner, SpannerParams, size_shape
from dynalgo.spanner.filter import make_filter
from test_spanner import SIZE_CONST

LINES = []


def report(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    LINES.append(line)
    return line


@pytest.fixture
def emit(capsys):
    def _emit(name, ok, detail):
        line = report(name, ok, detail)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return _emit


# -- maximal matching under uniform streams ---------------------------------------

def maximality(sizes=(16, 64, 256), seeds=20, steps=10**4, limit=120.0):
    parts, ok = [], True
    for n in sizes:
        t0 = time.perf_counter()
        failed = checked = 0
        for s in range(seeds):
            w = gen_uniform(n, steps, 0.5, seed=s)
            v = run(w, RunConfig(algo="matching", n=n, seed=s, verify="every")).report["verify"]
            failed += v["failed"]
            checked += v["checked"]
        dt = time.perf_counter() - t0
        ok &= failed == 0 and checked == seeds * steps and dt < limit
        parts.append(f"n={n} {failed}/{checked} failed in {dt:.0f}s")
    return ok, "; ".join(parts)


# -- spanner stretch after every update ---------------------------------------------

def stretch(configs=((64, 2), (128, 2), (128, 3)), seeds=10, steps=2000):
    parts, ok = [], True
    for n, k in configs:
        # the default filter keeps nearly every edge at this size; a short
        # prefix makes the spanner much sparser, so both are exercised
        for label, target in (("default", None), ("thinned", 0.03)):
            failures = 0
            for s in range(seeds):
                scale = 1.0 if target is None else target / SpannerParams(n, k).ell_filter
                sp = Spanner(n, k, seed=s, ell_scale=scale)
                g = GraphEdges(n)
                for op in gen_uniform(n, steps, 0.8, seed=s).ops:
                    g.apply(op)
                    sp.apply(op)
                    H = sp.spanner_edges()
                    good, _ = stretch_check(g.edges, H, 2 * k - 1)
                    failures += not (good and H <= g.edges)
            ok &= failures == 0
            parts.append(f"({n},{k},{label}) {failures} failures")
    return ok, "; ".join(parts)


# -- spanner size against the frozen bound ------------------------------------------

def spanner_size(n=1024, k=2, seed=0):
    m_target = round(n ** 1.5)
    rng = RandomSource(seed, "densify")
    sp = Spanner(n, k, seed=seed)
    present = set()
    while len(present) < m_target:
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v or canonical(u, v) in present:
            continue
        e = canonical(u, v)
        present.add(e)
        sp.insert_edge(u, v)
    bound = SIZE_CONST * size_shape(n, k)
    size = sp.spanner_size()
    good, worst = sp.verify_stretch(sample_size=200, seed=seed)
    ok = size <= bound and good
    return ok, (f"|E|={len(present)} |H|={size} bound={bound:.3g} "
                f"ratio to shape {size / size_shape(n, k):.3g}; sampled stretch {worst}")


# -- counter with the logarithmic budget ---------------------------------------------

def counter_budget(alphas=(1, 4), ells=(2 ** 10, 2 ** 14), trials=10**4, limit=30.0):
    t0 = time.perf_counter()
    worst, where = 1.0, None
    for alpha in alphas:
        for ell in ells:
            r = 4 * alpha * ceil_log2(ell)
            for dist in (CounterDist("const", alpha), CounterDist("geom", alpha),
                         adversarial_counter_dist(alpha, r, ell)):
                p = simulate_counter(dist, alpha, ell, trials, seed=1, r=r).min_prob_zero
                if p < worst:
                    worst, where = p, (dist.kind, alpha, ell)
    dt = time.perf_counter() - t0
    return worst >= 0.47 and dt < limit, f"min Pr[C_t=0]={worst:.4f} at {where}, {dt:.1f}s"


# -- counter without the logarithmic factor -------------------------------------------

def counter_needs_log(alphas=(1, 4), ells=(2 ** 10, 2 ** 14), trials=10**4):
    parts, ok = [], True
    for alpha in alphas:
        for ell in ells:
            r_short = 4 * alpha
            r_long = 4 * alpha * ceil_log2(ell)
            short = simulate_counter(adversarial_counter_dist(alpha, r_short, ell), alpha,
                                     ell, trials, seed=2, r=r_short).final_prob_zero
            long = simulate_counter(adversarial_counter_dist(alpha, r_long, ell), alpha,
                                    ell, trials, seed=2, r=r_long).final_prob_zero
            ok &= short < 0.5 and long >= 0.47
            parts.append(f"a={alpha} l=2^{ceil_log2(ell)} {short:.3f}/{long:.3f}")
    return ok, "without/with log " + "; ".join(parts)


# -- filter induced changes per update -----------------------------------------------

def filter_cell(alpha, ops, seed, clusters=64, lam=4, ell=1.0):
    """Clusters start at ``alpha`` edges; sizes then random-walk within [0, 4 alpha]."""
    rng = RandomSource(seed, "induced")
    f = make_filter(lam, ell, RandomSource(seed, "coins"))
    edges = {c: [] for c in range(clusters)}
    nxt = 0
    for c in range(clusters):
        for _ in range(alpha):
            drive(f.insert(c, nxt))
            edges[c].append(nxt)
            nxt += 1
    ins, dels = [], []
    while len(ins) < ops or len(dels) < ops:
        c = rng.randrange(clusters)
        es = edges[c]
        grow = (rng.random() < 0.5 or not es) and len(es) < 4 * alpha
        before = f.changes
        if grow:
            if len(ins) >= ops:
                continue
            drive(f.insert(c, nxt))
            es.append(nxt)
            nxt += 1
            ins.append(f.changes - before)
        else:
            if len(dels) >= ops:
                continue
            i = rng.randrange(len(es))
            es[i], es[-1] = es[-1], es[i]
            drive(f.delete(c, es.pop()))
            dels.append(f.changes - before)
    return ins, dels


def induced_changes(alphas=(4, 16, 64), ops=10**5, limit=60.0):
    t0 = time.perf_counter()
    parts, ok = [], True
    for alpha in alphas:
        for kind, xs in zip(("ins", "del"), filter_cell(alpha, ops, seed=alpha)):
            mean = statistics.fmean(xs)
            se = statistics.pstdev(xs) / math.sqrt(len(xs))
            ok &= mean <= 16 + 3 * se
            parts.append(f"a={alpha} {kind} {mean:.2f}")
    dt = time.perf_counter() - t0
    return ok and dt < limit, "; ".join(parts) + f"; {dt:.1f}s"


# -- deamortized matching per-update budget ------------------------------------------

def deamortizer_contract(n=256, steps=10**4, seeds=20):
    over = flushed_runs = failed = 0
    worst = 0.0
    for s in range(seeds):
        w = gen_uniform(n, steps, 0.6, seed=s)
        res = run(w, RunConfig(algo="matching", n=n, seed=s, wrap=True, verify="sample:100"))
        red = _reduction(res.state)
        # each copy may overshoot its budget by less than one elementary op
        cap = red.q * red.r + red.q * max(cp.algo.meter.largest for cp in red.copies)
        for u, f in zip(res.units, res.flush_units):
            if f == 0:
                over += u > cap
                worst = max(worst, u / cap)
        flushed_runs += res.report["flush_count"] > 0
        failed += res.report["verify"]["failed"]
    ok = over == 0 and flushed_runs <= 0.05 * seeds and failed == 0
    return ok, (f"{over} updates over cap (worst {worst:.3f} of cap), "
                f"{flushed_runs}/{seeds} runs flushed, {failed} failed checks")


# -- adversarial cycle on both matching variants -------------------------------------

def adversarial_cycle(level=4, rounds=200, seeds=200, limit=300.0, C=4):
    t0 = time.perf_counter()
    hits = {True: 0, False: 0}
    broken = 0
    n = None
    for s in range(seeds):
        w = gen_matching_adversary(level, rounds, seed=s, final_delete=True)
        n = w.n
        for original in (True, False):
            m = DynamicMatching(n, seed=s, C=C, original=original)
            for op in w.ops[:-1]:
                m.apply(op)
            hits[original] += m.mate_of(0) == 1
            m.apply(w.ops[-1])
            broken += not verify_matching(m.edges(), m.iterate_matching())
    dt = time.perf_counter() - t0
    freq_orig, freq_mod = hits[True] / seeds, hits[False] / seeds
    bound = 10 * 32 * C * ceil_log2(n) ** 2 / 4 ** level
    ok = freq_orig >= 0.9 and freq_mod <= bound and broken == 0 and dt < limit
    return ok, (f"unmodified {freq_orig:.3f} (need >= 0.9), modified {freq_mod:.3f} "
                f"(bound {bound:.3g}), {dt:.0f}s")


# -- suspension transparency -----------------------------------------------------------

def split_budget(red, rng):
    """Give every copy the per-update budget in random pieces."""
    for cp in red.copies:
        left = red.r
        while left > 0:
            piece = min(left, 1 + rng.randrange(max(1, int(red.r))))
            cp.algo.run_steps(piece)
            left -= piece


def suspension(trials=10**3, n=16, steps=40):
    rng = RandomSource(7, "splits")
    mismatches = 0
    for t in range(trials):
        algo = "matching" if t % 2 == 0 else "spanner"
        if algo == "matching":
            factory = lambda s: DynamicMatching(n, seed=s)  # noqa: E731
        else:
            factory = lambda s: Spanner(n, 2, seed=s, ell_scale=0.05)  # noqa: E731
        w = gen_uniform(n, steps, 0.7, seed=t)
        plain = new_reduction(factory, n, 1, steps, seed=t)
        split = new_reduction(factory, n, 1, steps, seed=t)
        for op in w.ops:
            apply_update(plain, op)
            for cp in split.copies:
                cp.algo.enqueue(op)
            split_budget(split, rng)
        flush(plain)
        flush(split)
        for a, b in zip(plain.copies, split.copies):
            ref = factory(a.seed)
            for op in w.ops:
                ref.apply(op)
            digests = {a.algo.state_digest(), b.algo.state_digest(), ref.state_digest()}
            mismatches += len(digests) != 1
    return mismatches == 0, f"{mismatches} mismatches over {trials} split schedules"


CRITERIA = [
    ("maximal matching on uniform streams", maximality),
    ("spanner stretch after every update", stretch),
    ("spanner size within frozen bound", spanner_size),
    ("counter empties with logarithmic budget", counter_budget),
    ("counter fails without logarithmic factor", counter_needs_log),
    ("filter induced changes per update", induced_changes),
    ("deamortized matching per-update budget", deamortizer_contract),
    ("adversarial cycle on both matching variants", adversarial_cycle),
    ("suspension transparency under random splits", suspension),
]


@pytest.mark.parametrize("name,fn", CRITERIA, ids=[name.replace(" ", "_") for name, _ in CRITERIA])
def test_criterion(name, fn, emit):
    ok, detail = fn()
    emit(name, ok, detail)


if __name__ == "__main__":
    failures = 0
    for name, fn in CRITERIA:
        ok, detail = fn()
        print(report(name, ok, detail), flush=True)
        failures += not ok
    sys.exit(1 if failures else 0)
