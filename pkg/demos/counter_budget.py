"""How much budget a drained queue needs per step.

Each step adds a random amount of work with mean ``alpha`` and removes ``r``.
Against a heavy-tailed law whose spikes grow towards the end of the horizon,
a budget of ``4 alpha`` leaves the queue non-empty most of the time; a budget
with a logarithmic factor in the horizon keeps it empty with probability above
one half.

    python demos/counter_budget.py
"""
from dynalgo.core import ceil_log2
from dynalgo.counter import adversarial_counter_dist, simulate_counter


def main(alpha=1, trials=10**4):
    for ell in (2 ** 10, 2 ** 14):
        for r in (4 * alpha, 4 * alpha * ceil_log2(ell)):
            res = simulate_counter(adversarial_counter_dist(alpha, r, ell), alpha, ell,
                                   trials, seed=0, r=r)
            print(f"ell=2^{ceil_log2(ell):<2d} r={r:4d}  Pr[empty at end]="
                  f"{res.final_prob_zero:.3f}  min over time={res.min_prob_zero:.3f}")


if __name__ == "__main__":
    main()
