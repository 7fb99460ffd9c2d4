"""Spanner size against graph size as the filter prefix shrinks.

With the default prefix length every edge of a small graph passes straight
through, so the spanner is the whole graph.  Shorter prefixes let the filter
withhold edges towards clusters that are already well connected.  The stretch
bound holds either way.

    python demos/spanner_thinning.py
"""
from dynalgo.harness.workloads import gen_uniform
from dynalgo.spanner import Spanner, SpannerParams


def main(n=64, k=2, steps=1500):
    w = gen_uniform(n, steps, 0.8, seed=0)
    full = SpannerParams(n, k).ell_filter
    for target in (full, 1.0, 0.1, 0.02):
        sp = Spanner(n, k, seed=0, ell_scale=target / full)
        for op in w.ops:
            sp.apply(op)
        ok, worst = sp.verify_stretch()
        m = sum(1 for _ in sp.edges())
        print(f"prefix length {target:8.2f}: |H|={sp.spanner_size():4d} of |E|={m}, "
              f"stretch ok={ok} worst={worst}")


if __name__ == "__main__":
    main()
