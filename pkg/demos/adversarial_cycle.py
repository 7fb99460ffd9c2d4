"""Why the matching needs random rises and resets.

The cycle keeps a vertex ``v`` matched to ``v'`` high in the hierarchy while
its low neighbours come and go.  Without the random moves ``v`` almost always
ends up matched to ``v'`` again when the matched edge is finally deleted, so an
adversary that knows the workload can force the expensive case.  With them
the matched edge is a fresh random choice much more often.  The contrast
needs a high enough level: at level 2 the modified variant actually returns
to ``v'`` more often than the original one.

    python demos/adversarial_cycle.py [level] [rounds] [seeds]
"""
import sys

from dynalgo.harness.workloads import gen_matching_adversary
from dynalgo.matching import DynamicMatching


def frequency(level, rounds, seeds, original):
    hits = 0
    for s in range(seeds):
        w = gen_matching_adversary(level, rounds, seed=s)
        m = DynamicMatching(w.n, seed=s, original=original)
        for op in w.ops:
            m.apply(op)
        hits += m.mate_of(0) == 1
    return hits / seeds


def main(level=4, rounds=50, seeds=20):
    for original in (True, False):
        name = "without random moves" if original else "with random moves   "
        print(f"{name}: Pr[mate(v) = v'] = "
              f"{frequency(level, rounds, seeds, original):.3f}")


if __name__ == "__main__":
    main(*map(int, sys.argv[1:4]))
