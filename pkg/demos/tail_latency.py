"""Per-update cost tails with and without the deamortizer.

A planted workload repeatedly builds a star around a vertex, matches it high
in the level hierarchy and then deletes the matched edge.  The unwrapped
matching pays for those deletions in single expensive updates; the wrapped
version spreads the same work over a budget of ``r`` units per copy.

    python demos/tail_latency.py [n] [steps]
"""
import sys

from dynalgo.harness.runner import RunConfig, run
from dynalgo.harness.workloads import gen_planted


def main(n=1024, steps=3000):
    w = gen_planted(n, steps, seed=1, every=50)
    print(f"{len(w)} updates on n={n}")
    for wrap in (False, True):
        rep = run(w, RunConfig(algo="matching", n=n, seed=1, wrap=wrap,
                               verify="final")).report
        u = rep["units"]
        label = "wrapped  " if wrap else "unwrapped"
        extra = f"  q={rep['q']} r={rep['r']} flushes={rep['flush_count']}" if wrap else ""
        print(f"{label} p50={u['p50']:5d} p99={u['p99']:5d} max={u['max']:6d} "
              f"max/p50={u['max'] / max(1, u['p50']):6.1f}{extra}")


if __name__ == "__main__":
    main(*map(int, sys.argv[1:3]))
