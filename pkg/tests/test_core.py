import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynalgo.core import (Edge, GraphEdges, OpKind, RandomSource, Status, UpdateOp,
                          WorkMeter, bernoulli, canonical, ceil_log2, charge,
                          derive_seed, drive, floor_log2, floor_log4)
from stubs import CostStub


def test_canonical_orders_endpoints():
    assert canonical(3, 1) == Edge(1, 3)
    assert canonical(0, 9) == Edge(0, 9)


def test_canonical_rejects_self_loop():
    with pytest.raises(ValueError):
        canonical(5, 5)


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_canonical_is_symmetric(u, v):
    if u == v:
        return
    e = canonical(u, v)
    assert e == canonical(v, u) and e.lo < e.hi


def test_log_helpers():
    assert [ceil_log2(x) for x in (1, 2, 3, 4, 5, 1024, 1025)] == [0, 1, 2, 2, 3, 10, 11]
    assert [floor_log2(x) for x in (1, 2, 3, 4, 7, 8)] == [0, 1, 1, 2, 2, 3]
    assert [floor_log4(x) for x in (1, 3, 4, 15, 16, 512, 1024)] == [0, 0, 1, 1, 2, 4, 5]


def test_bernoulli_extremes_do_not_draw():
    rng = RandomSource(1, "x")
    state = rng.getstate()
    assert not any(bernoulli(rng, 0.0) for _ in range(100))
    assert all(bernoulli(rng, 1.0) for _ in range(100))
    assert rng.getstate() == state


def test_bernoulli_rejects_bad_probability():
    rng = RandomSource(1)
    for p in (-0.1, 1.5, math.nan):
        with pytest.raises(ValueError):
            bernoulli(rng, p)


def test_bernoulli_quarter_frequency():
    rng = RandomSource(2024, "freq")
    hits = sum(bernoulli(rng, 0.25) for _ in range(10**6))
    assert abs(hits / 10**6 - 0.25) <= 0.005


def test_random_source_is_reproducible_and_labelled():
    a, b = RandomSource(7, "l"), RandomSource(7, "l")
    assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]
    assert RandomSource(7, "l").random() != RandomSource(7, "m").random()
    assert derive_seed(1, "a") != derive_seed(2, "a")


def test_charge_examples():
    m = WorkMeter()
    assert charge(m, 1).units == 1
    m = WorkMeter(units=5)
    assert charge(m, 3).units == 8
    m = WorkMeter()
    for _ in range(17):
        charge(m, 1)
    assert m.units == 17
    with pytest.raises(ValueError):
        charge(m, 0)


@given(st.lists(st.integers(1, 50), max_size=40))
def test_charge_is_additive_and_tracks_largest(ks):
    m = WorkMeter()
    for k in ks:
        charge(m, k)
    assert m.units == sum(ks)
    assert m.largest == max(ks, default=0)


def test_run_steps_idle_is_fixed():
    s = CostStub(4)
    assert s.run_steps(5) is Status.FIXED
    assert s.meter.units == 0


def test_run_steps_breaks_mid_update_and_resumes():
    s = CostStub(4, cost=10)
    s.enqueue(UpdateOp.insert(0, 1))
    assert s.run_steps(4) is Status.BROKEN
    assert s.meter.units == 4 and not s.items
    assert s.run_steps(4) is Status.BROKEN
    assert s.run_steps(4) is Status.FIXED
    assert s.meter.units == 10 and s.items == {Edge(0, 1)}


def test_run_steps_additive_costs_fit():
    s = CostStub(4, cost=3)
    s.enqueue(UpdateOp.insert(0, 1))
    s.enqueue(UpdateOp.insert(1, 2))
    assert s.run_steps(7) is Status.FIXED
    assert s.meter.units == 6


def test_rejected_update_is_dropped():
    from dynalgo.matching import DynamicMatching
    m = DynamicMatching(4)
    m.enqueue(UpdateOp.delete(0, 1))
    with pytest.raises(ValueError):
        m.run_steps(100)
    assert m.is_fixed
    m.apply(UpdateOp.insert(0, 1))
    with pytest.raises(ValueError):
        m.apply(UpdateOp.insert(0, 1))
    assert m.is_fixed and m.has_edge(0, 1)


@settings(max_examples=60)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=12),
       st.lists(st.integers(1, 9), min_size=1, max_size=30))
def test_split_execution_matches_drain(costs, budgets):
    ops = [UpdateOp.insert(i, i + 1) for i in range(len(costs))]
    table = {op.edge: c for op, c in zip(ops, costs)}
    whole, split = CostStub(30, costs=table), CostStub(30, costs=table)
    for op in ops:
        whole.enqueue(op)
        split.enqueue(op)
    whole.drain()
    for b in budgets:
        split.run_steps(b)
    split.drain()
    assert split.state_digest() == whole.state_digest()
    assert split.meter.units == sum(costs)


def test_run_steps_overshoot_is_below_one_step():
    s = CostStub(4, cost=1)
    for i in range(3):
        s.enqueue(UpdateOp.insert(i, i + 1))
    s.run_steps(2)
    assert s.meter.units == 2


def test_drive_returns_value():
    def gen():
        yield 2
        yield 3
        return "done"
    m = WorkMeter()
    assert drive(gen(), m) == "done" and m.units == 5


def test_graph_edges_validation():
    g = GraphEdges(3)
    g.apply(UpdateOp.insert(0, 1))
    with pytest.raises(ValueError):
        g.apply(UpdateOp.insert(1, 0))
    with pytest.raises(ValueError):
        g.apply(UpdateOp.delete(1, 2))
    with pytest.raises(ValueError):
        g.apply(UpdateOp(OpKind.INSERT, Edge(0, 3)))
