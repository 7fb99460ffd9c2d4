"""Worst-case deamortization of randomized dynamic algorithms.

:class:`ReductionState` runs ``q`` independent copies of an algorithm whose
per-update cost is bounded in expectation.  Every update is appended to each
copy's buffer and each copy may then work for ``r`` units.  Queries go to the
first copy whose buffer is empty; if every copy lags behind, all buffers are
drained at once (a flush).

:class:`PhaseState` removes the need to know the stream length in advance by
rebuilding a fresh reduction in the background and swapping it in at the end
of every phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from sortedcontainers import SortedList

from .core import (Edge, OpKind, Status, SteppableUpdater,
                   UpdateOp, ceil_log2, derive_seed)

Factory = Callable[[int], SteppableUpdater]
"""Builds a fresh, empty algorithm instance from a 64-bit seed."""


@dataclass
class CopyState:
    algo: SteppableUpdater
    seed: int
    status: Status = Status.FIXED

    @property
    def buffer_len(self) -> int:
        return self.algo.buffer_len


@dataclass
class UpdateReport:
    units: int
    flushed: bool = False
    flush_units: int = 0


def copy_count(n: int, c: int) -> int:
    return max(1, c * ceil_log2(n))


def step_budget(alpha: float, ell: int) -> int:
    return int(math.ceil(4 * alpha * max(1, ceil_log2(ell))))


@dataclass
class ReductionState:
    copies: list[CopyState]
    r: int
    flush_count: int = 0
    updates: int = 0

    @property
    def q(self) -> int:
        return len(self.copies)

    @property
    def pointer(self) -> int:
        for i, cp in enumerate(self.copies):
            if cp.status is Status.FIXED:
                return i
        raise RuntimeError("no fixed copy; a flush was missed")

    def pointed(self) -> SteppableUpdater:
        return self.copies[self.pointer].algo

    @property
    def units(self) -> int:
        return sum(cp.algo.meter.units for cp in self.copies)


def new_reduction(factory: Factory, n: int, alpha: float, ell: int, c: int = 1,
                  seed: int = 0) -> ReductionState:
    """Create ``q = c * ceil(log2 n)`` copies with budget ``4 alpha ceil(log2 ell)``."""
    if n < 2 or alpha < 1 or ell < 2 or c < 1:
        raise ValueError("need n >= 2, alpha >= 1, ell >= 2, c >= 1")
    copies = []
    for i in range(copy_count(n, c)):
        s = derive_seed(seed, f"copy/{i}")
        copies.append(CopyState(factory(s), s))
    return ReductionState(copies, step_budget(alpha, ell))


def flush(s: ReductionState) -> int:
    """Drain every buffer; returns the units spent."""
    spent = 0
    for cp in s.copies:
        spent += cp.algo.drain()
        cp.status = Status.FIXED
    s.flush_count += 1
    return spent


def advance(s: ReductionState, budget: float) -> int:
    """Let each copy work for ``budget`` units and refresh statuses."""
    spent = 0
    for cp in s.copies:
        before = cp.algo.meter.units
        cp.status = cp.algo.run_steps(budget)
        spent += cp.algo.meter.units - before
    return spent


def apply_update(s: ReductionState, op: UpdateOp) -> UpdateReport:
    for cp in s.copies:
        cp.algo.enqueue(op)
    units = advance(s, s.r)
    s.updates += 1
    if all(cp.status is Status.BROKEN for cp in s.copies):
        extra = flush(s)
        return UpdateReport(units + extra, True, extra)
    return UpdateReport(units)


def pointer_query(s: ReductionState) -> int:
    return s.pointer


# -- phase rotation ------------------------------------------------------------

@dataclass
class PhaseReport:
    units: int
    flushed: bool
    flush_units: int
    inactive_replays: int
    item_ops: int


@dataclass
class PhaseState:
    """Active/inactive pair of reductions rotated every ``phase_len`` updates.

    Within a phase the inactive side works through four quarters: copy the
    frozen item list into a snapshot, rebuild from the snapshot, then replay
    the updates recorded during the first and second halves at two per
    incoming update.  ``rebuild_rate`` is the per-copy construction budget in
    units per update; by default it is sized so that a rebuild whose inserts
    cost ``alpha`` on average finishes within its quarter with a 4x margin.
    """

    factory: Factory
    n: int
    alpha: float
    c: int
    seed: int
    phase_len: int
    active: ReductionState
    inactive: ReductionState | None = None
    position: int = 0
    phase_index: int = 0
    recorded: list[UpdateOp] = field(default_factory=list)
    items: SortedList = field(default_factory=SortedList)
    snapshot: list[Edge] = field(default_factory=list)
    replayed: int = 0
    snap_per: int = 1
    rebuild_rate: int | None = None
    current_rate: int = 0
    rebuild_overflow: int = 0  # units spent finishing rebuilds at quarter end
    retired_flushes: int = 0

    @property
    def flush_total(self) -> int:
        live = self.active.flush_count
        if self.inactive is not None:
            live += self.inactive.flush_count
        return self.retired_flushes + live

    @property
    def ordered_cost(self) -> int:
        return max(1, ceil_log2(self.n))

    def pointed(self) -> SteppableUpdater:
        return self.active.pointed()


def default_phase_len(n: int) -> int:
    return max(4096, n * n)


def new_phases(factory: Factory, n: int, alpha: float, c: int = 1, seed: int = 0,
               phase_len: int | None = None,
               rebuild_rate: int | None = None) -> PhaseState:
    if phase_len is None:
        phase_len = default_phase_len(n)
    if phase_len < 4 or phase_len % 4:
        raise ValueError("phase length must be a positive multiple of 4")
    ell = 2 * phase_len
    active = new_reduction(factory, n, alpha, ell, c, derive_seed(seed, "phase/0"))
    return PhaseState(factory, n, alpha, c, seed, phase_len, active,
                      rebuild_rate=rebuild_rate)


def _quarter(p: PhaseState) -> int:
    return (4 * p.position) // p.phase_len


def phase_apply(p: PhaseState, op: UpdateOp) -> PhaseReport:
    quarter_len = p.phase_len // 4
    half = p.phase_len // 2
    rep = apply_update(p.active, op)
    units = rep.units
    replays = 0
    item_ops = 0
    p.recorded.append(op)
    q = _quarter(p)
    at = p.position - q * quarter_len  # offset within the quarter

    if q == 0:
        # copy the frozen item list into the snapshot
        if at == 0:
            p.snap_per = max(1, -(-len(p.items) // quarter_len))
            p.snapshot = []
        per = p.snap_per
        start = len(p.snapshot)
        take = p.items[start:start + per]
        p.snapshot.extend(take)
        units += len(take)
        if at == quarter_len - 1 and len(p.snapshot) < len(p.items):
            rest = p.items[len(p.snapshot):]
            p.snapshot.extend(rest)
            units += len(rest)
    elif q == 1:
        if at == 0:
            ell = 2 * p.phase_len
            p.inactive = new_reduction(
                p.factory, p.n, p.alpha, ell, p.c,
                derive_seed(p.seed, f"phase/{p.phase_index + 1}"))
            for cp in p.inactive.copies:
                for e in p.snapshot:
                    cp.algo.enqueue(UpdateOp(OpKind.INSERT, e))
            p.current_rate = p.rebuild_rate or max(
                p.active.r, -(-4 * int(p.alpha) * len(p.snapshot) // quarter_len))
            p.snapshot = []
        units += advance(p.inactive, p.current_rate)
        if at == quarter_len - 1:
            extra = flush_quiet(p.inactive)
            p.rebuild_overflow += extra
            units += extra
    else:
        # quarters 3 and 4 replay the first and second half of the log
        if at == 0:
            p.replayed = 0 if q == 2 else half
        limit = half if q == 2 else len(p.recorded)
        for _ in range(2):
            if p.replayed >= limit:
                break
            r_op = p.recorded[p.replayed]
            p.replayed += 1
            units += _record_item(p, r_op)
            item_ops += 1
            r_rep = apply_update(p.inactive, r_op)
            units += r_rep.units
            replays += 1
        if q == 3 and at == quarter_len - 1:
            # the last update of the phase is replayed here as well
            while p.replayed < len(p.recorded):
                r_op = p.recorded[p.replayed]
                p.replayed += 1
                units += _record_item(p, r_op)
                item_ops += 1
                units += apply_update(p.inactive, r_op).units
                replays += 1

    p.position += 1
    if p.position == p.phase_len:
        p.retired_flushes += p.active.flush_count
        p.active, p.inactive = p.inactive, None
        p.position = 0
        p.phase_index += 1
        p.recorded = []
    return PhaseReport(units, rep.flushed, rep.flush_units, replays, item_ops)


def flush_quiet(s: ReductionState) -> int:
    """Drain every copy without counting a flush event."""
    spent = 0
    for cp in s.copies:
        spent += cp.algo.drain()
        cp.status = Status.FIXED
    return spent


def _record_item(p: PhaseState, op: UpdateOp) -> int:
    if op.kind is OpKind.INSERT:
        p.items.add(op.edge)
    else:
        p.items.remove(op.edge)
    return p.ordered_cost


def phase_items(p: PhaseState) -> Iterable[Edge]:
    return iter(p.items)
