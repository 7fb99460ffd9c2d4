"""Shared substrate: edges, update operations, seeded randomness, work metering
and the resumable-update contract used by every wrapped algorithm.

Resumable updates are written as generator functions.  A generator announces
the cost of its next elementary operation by yielding an integer and performs
that operation when it is resumed.  The driver in :meth:`SteppableUpdater.run_steps`
charges the announced cost before resuming, so every mutation is paid for
before it happens and a suspended update is simply a paused generator.
"""
from __future__ import annotations

import enum
import hashlib
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple


def ceil_log2(x: int | float) -> int:
    """Smallest integer ``t >= 0`` with ``2**t >= x`` (0 for ``x <= 1``)."""
    if x <= 1:
        return 0
    if isinstance(x, int):
        return (x - 1).bit_length()
    return math.ceil(math.log2(x))


def floor_log2(x: int) -> int:
    if x < 1:
        raise ValueError("floor_log2 needs x >= 1")
    return x.bit_length() - 1


def floor_log4(x: int) -> int:
    return floor_log2(x) // 2


class Edge(NamedTuple):
    lo: int
    hi: int


def canonical(u: int, v: int) -> Edge:
    """Return the edge ``{u, v}`` with its endpoints in increasing order."""
    if u == v:
        raise ValueError(f"self-loop ({u}, {v}) is not an edge")
    return Edge(u, v) if u < v else Edge(v, u)


class OpKind(enum.Enum):
    INSERT = "i"
    DELETE = "d"


class UpdateOp(NamedTuple):
    kind: OpKind
    edge: Edge

    @classmethod
    def insert(cls, u: int, v: int) -> "UpdateOp":
        return cls(OpKind.INSERT, canonical(u, v))

    @classmethod
    def delete(cls, u: int, v: int) -> "UpdateOp":
        return cls(OpKind.DELETE, canonical(u, v))


def derive_seed(seed: int, label: str) -> int:
    """Hash ``(seed, label)`` into a 64-bit integer."""
    digest = hashlib.sha256(f"{int(seed)}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


class RandomSource:
    """Seeded random stream identified by ``(seed, label)``.

    Two sources with the same seed and label yield the same draws; different
    labels give independent streams.
    """

    def __init__(self, seed: int, label: str = ""):
        self.seed = int(seed)
        self.label = label
        self._rng = random.Random(derive_seed(self.seed, label))

    def child(self, label: str) -> "RandomSource":
        return RandomSource(self.seed, f"{self.label}/{label}")

    def random(self) -> float:
        return self._rng.random()

    def randrange(self, n: int) -> int:
        return self._rng.randrange(n)

    def choice(self, seq):
        return seq[self._rng.randrange(len(seq))]

    def sample(self, population, k: int) -> list:
        return self._rng.sample(population, k)

    def shuffle(self, seq: list) -> None:
        self._rng.shuffle(seq)

    def getstate(self):
        return self._rng.getstate()

    def setstate(self, state) -> None:
        self._rng.setstate(state)


def bernoulli(src: RandomSource, p: float) -> bool:
    """Biased coin that is heads with probability ``p``.

    ``p == 0`` and ``p == 1`` are decided without consuming a draw.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p == 0.0:
        return False
    if p == 1.0:
        return True
    return src.random() < p


@dataclass
class WorkMeter:
    """Monotone counter of charged work units."""

    units: int = 0
    largest: int = 0  # largest single charge seen

    def charge(self, k: int) -> None:
        if k < 1:
            raise ValueError("charges are at least one unit")
        self.units += k
        if k > self.largest:
            self.largest = k

    def reset(self) -> None:
        self.units = 0


def charge(meter: WorkMeter, k: int) -> WorkMeter:
    meter.charge(k)
    return meter


class Status(enum.Enum):
    FIXED = "fixed"
    BROKEN = "broken"


class SteppableUpdater:
    """Base class for algorithms that process updates in bounded slices.

    Subclasses implement :meth:`_process`, a generator for one update, and
    :meth:`_state_items` for hashing.  ``ordered_cost`` is the unit price of an
    ordered-map operation (``ceil(log2 n)``).
    """

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("need at least two vertices")
        self.n = n
        self.ordered_cost = max(1, ceil_log2(n))
        self.pending: deque[UpdateOp] = deque()
        self.meter = WorkMeter()
        self._active: Iterator[int] | None = None
        self._announced: int | None = None

    # -- contract -----------------------------------------------------------
    def _process(self, op: UpdateOp) -> Iterator[int]:
        raise NotImplementedError

    def _state_items(self) -> Iterable:
        raise NotImplementedError

    def enqueue(self, op: UpdateOp) -> None:
        self.pending.append(op)

    @property
    def buffer_len(self) -> int:
        return len(self.pending)

    @property
    def is_fixed(self) -> bool:
        return not self.pending

    def run_steps(self, budget: float) -> Status:
        """Run pending work worth about ``budget`` units, oldest update first.

        The cost of an elementary operation is charged before the operation
        runs, so the budget can be overshot by less than one operation.
        """
        spent = 0
        meter = self.meter
        while True:
            if self._active is None:
                if not self.pending:
                    return Status.FIXED
                try:
                    self._active = self._process(self.pending[0])
                except Exception:
                    self.pending.popleft()
                    raise
            if self._announced is None:
                try:
                    self._announced = next(self._active)
                except StopIteration:
                    self._active = None
                    self.pending.popleft()
                    continue
                except Exception:
                    # a rejected update is dropped so the queue stays usable
                    self._active = None
                    self.pending.popleft()
                    raise
            if spent >= budget:
                return Status.BROKEN
            meter.charge(self._announced)
            spent += self._announced
            self._announced = None

    def drain(self) -> int:
        """Finish all pending work and return the units it cost.

        Same charges as ``run_steps(math.inf)`` without the budget bookkeeping.
        """
        meter = self.meter
        before = meter.units
        total = 0
        largest = meter.largest
        if self._announced is not None:
            total += self._announced
            largest = max(largest, self._announced)
            self._announced = None
        pending = self.pending
        try:
            while self._active is not None or pending:
                if self._active is None:
                    self._active = self._process(pending[0])
                for cost in self._active:
                    if cost < 1:
                        raise ValueError("charges are at least one unit")
                    total += cost
                    if cost > largest:
                        largest = cost
                self._active = None
                pending.popleft()
        except Exception:
            # a rejected update is dropped so the queue stays usable
            self._active = None
            pending.popleft()
            raise
        finally:
            meter.units += total
            meter.largest = largest
        return meter.units - before

    def apply(self, op: UpdateOp) -> int:
        """Enqueue ``op``, run everything to completion, return units spent."""
        if self.pending or self._active is not None:
            self.enqueue(op)
            return self.drain()
        # idle: run the update directly, charging exactly what drain would
        total = 0
        largest = self.meter.largest
        try:
            for cost in self._process(op):
                if cost < 1:
                    raise ValueError("charges are at least one unit")
                total += cost
                if cost > largest:
                    largest = cost
        finally:
            self.meter.units += total
            self.meter.largest = largest
        return total

    @classmethod
    def rebuild(cls, edges: Iterable[Edge], *args, **kwargs) -> "SteppableUpdater":
        """Fresh instance with inserts of ``edges`` queued but not yet run."""
        inst = cls(*args, **kwargs)
        for e in edges:
            inst.enqueue(UpdateOp(OpKind.INSERT, Edge(*e)))
        return inst

    def state_digest(self) -> str:
        h = hashlib.sha256()
        for item in self._state_items():
            h.update(repr(item).encode())
            h.update(b"\x00")
        h.update(repr(list(self.pending)).encode())
        h.update(repr(self.meter.units).encode())
        return h.hexdigest()


def drive(gen: Iterator[int], meter: WorkMeter | None = None):
    """Run a cost-announcing generator to completion and return its result."""
    try:
        while True:
            cost = next(gen)
            if meter is not None:
                meter.charge(cost)
    except StopIteration as stop:
        return stop.value


@dataclass
class GraphEdges:
    """Plain edge set used for validation and oracles."""

    n: int
    edges: set = field(default_factory=set)

    def validate(self, op: UpdateOp) -> None:
        e = op.edge
        if not (0 <= e.lo < self.n and 0 <= e.hi < self.n):
            raise ValueError(f"edge {tuple(e)} out of range for n={self.n}")
        if op.kind is OpKind.INSERT and e in self.edges:
            raise ValueError(f"duplicate insert of {tuple(e)}")
        if op.kind is OpKind.DELETE and e not in self.edges:
            raise ValueError(f"delete of absent edge {tuple(e)}")

    def apply(self, op: UpdateOp) -> None:
        self.validate(op)
        if op.kind is OpKind.INSERT:
            self.edges.add(op.edge)
        else:
            self.edges.discard(op.edge)
