"""Simulation of the dynamic counter ``C_t = max(X_t + C_{t-1} - r, 0)``.

The counter models the backlog of one buffered copy: ``X_t`` is the work that
update ``t`` brings and ``r`` is the work the copy may do per update.  The
copy is caught up exactly when the counter is zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ceil_log2, derive_seed


@dataclass
class CounterProcess:
    r: float
    alpha: float = 1.0
    ell: int = 1
    C: float = 0.0


def counter_step(c: CounterProcess, x: float) -> CounterProcess:
    if x < 0:
        raise ValueError("work increments are non-negative")
    c.C = max(x + c.C - c.r, 0)
    return c


@dataclass(frozen=True)
class CounterDist:
    """Distribution of the per-step increment ``X_t``.

    ``kind`` is one of ``const``, ``geom`` or ``adversarial``.  The adversarial
    law puts mass ``alpha / (2 r (ell + 1 - t))`` on the value
    ``2 r (ell + 1 - t)`` and the rest on zero, so a single late spike is
    exactly as costly as the budget left until the horizon.
    """

    kind: str
    alpha: float
    r: float = 0.0
    ell: int = 0

    def __post_init__(self):
        if self.kind not in ("const", "geom", "adversarial"):
            raise ValueError(f"unknown distribution {self.kind!r}")
        if self.alpha < 0:
            raise ValueError("mean must be non-negative")
        if self.kind == "adversarial":
            if self.alpha < 1 or self.r < 1 or self.ell < 1:
                raise ValueError("adversarial law needs alpha, r, ell >= 1")
            # the spike probability is largest at t = ell
            if self.alpha / (2 * self.r) > 1:
                raise ValueError("spike probability exceeds 1; r too small")

    def spike(self, t: int) -> tuple[float, float]:
        """Value and probability of the adversarial spike at step ``t``."""
        value = 2 * self.r * (self.ell + 1 - t)
        return value, self.alpha / value

    def mean(self, t: int) -> float:
        if self.kind == "adversarial":
            value, prob = self.spike(t)
            return value * prob
        return float(self.alpha)

    def sample(self, rng: np.random.Generator, t: int, size: int) -> np.ndarray:
        if self.kind == "const":
            return np.full(size, float(self.alpha))
        if self.kind == "geom":
            # support {0, 1, ...} with mean alpha
            return rng.geometric(1.0 / (self.alpha + 1.0), size=size) - 1.0
        value, prob = self.spike(t)
        return np.where(rng.random(size) < prob, value, 0.0)


def adversarial_counter_dist(alpha: float, r: float, ell: int) -> CounterDist:
    return CounterDist("adversarial", alpha, r, ell)


def default_budget(alpha: float, ell: int) -> int:
    return int(4 * alpha * max(1, ceil_log2(ell)))


@dataclass
class CounterResult:
    r: float
    trace: np.ndarray  # trace[t-1] = fraction of trials with C_t == 0

    @property
    def final_prob_zero(self) -> float:
        return float(self.trace[-1])

    @property
    def min_prob_zero(self) -> float:
        return float(self.trace.min())

    def to_json(self) -> dict:
        return {"r": self.r, "trace": [float(x) for x in self.trace],
                "final_prob_zero": self.final_prob_zero}


def simulate_counter(dist: CounterDist, alpha: float, ell: int, trials: int,
                     seed: int = 0, r: float | None = None) -> CounterResult:
    """Run ``trials`` independent counters for ``ell`` steps.

    ``r`` defaults to ``4 * alpha * ceil(log2 ell)``.
    """
    if not isinstance(dist, CounterDist):
        raise ValueError("dist must be a CounterDist")
    if ell < 1 or trials < 1:
        raise ValueError("ell and trials must be positive")
    if dist.kind != "adversarial" and dist.alpha > alpha:
        raise ValueError("distribution mean exceeds alpha")
    if r is None:
        r = default_budget(alpha, ell)
    rng = np.random.default_rng(derive_seed(seed, f"counter/{dist.kind}"))
    c = np.zeros(trials)
    trace = np.empty(ell)
    for t in range(1, ell + 1):
        c += dist.sample(rng, t, trials)
        c -= r
        np.maximum(c, 0.0, out=c)
        trace[t - 1] = np.count_nonzero(c == 0.0) / trials
    return CounterResult(r=r, trace=trace)
