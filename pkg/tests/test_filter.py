import copy
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynalgo.core import RandomSource, drive
from dynalgo.oracles import filter_violations
from dynalgo.spanner.filter import (NEG, FilterState, bucket_scale, filter_params,
                                    make_filter)


def roomy(lam=16, seed=0):
    """Filter whose prefixes withhold everything, so only bucket moves matter."""
    return FilterState(lambda j: 10**9, 10**9, lam, RandomSource(seed, "f"))


def fill(f, c, k, start=0):
    for e in range(start, start + k):
        drive(f.insert(c, e))


def test_bucket_scale():
    assert bucket_scale(NEG) == 0
    assert [bucket_scale(j) for j in range(5)] == [1, 2, 4, 8, 16]


def test_filter_params_shape():
    lam, ell = filter_params(64, 2)
    assert lam == 16  # next power of two above 4 + ln 64
    assert ell > 64 ** 0.5
    assert filter_params(64, 3)[1] < ell


def test_first_edges_climb_deterministically():
    f = roomy()
    drive(f.insert(0, 0))
    assert f.bucket(0) == 0
    drive(f.insert(0, 1))
    assert f.bucket(0) == 1  # the coin at scale 1 has probability one


def move_frequency(base, action, trials=10**4):
    moved = 0
    for t in range(trials):
        f = copy.deepcopy(base)
        f.rng = RandomSource(t, "trial")
        before = f.bucket(0)
        action(f)
        moved += f.bucket(0) != before
    return moved / trials


def test_insert_coin_at_twice_the_scale():
    base = roomy()
    fill(base, 0, 7)
    drive(base._move(0, base.bucket(0), 2))
    assert base.bucket(0) == 2 and base.size(0) == 7
    freq = move_frequency(base, lambda f: drive(f.insert(0, 100)))
    assert abs(freq - 0.25) <= 4 * math.sqrt(0.25 * 0.75 / 10**4)
    f = copy.deepcopy(base)
    for t in range(200):
        f.rng = RandomSource(t, "heads")
        g = copy.deepcopy(f)
        drive(g.insert(0, 100))
        if g.bucket(0) != 2:
            assert g.bucket(0) == 3
            break
    else:
        pytest.fail("coin never came up heads")


def test_insert_forced_at_lam_times_scale():
    base = roomy(lam=4)
    fill(base, 0, 15)
    drive(base._move(0, base.bucket(0), 2))
    for t in range(50):
        f = copy.deepcopy(base)
        f.rng = RandomSource(t, "forced")
        drive(f.insert(0, 100))
        assert f.bucket(0) == 4


def test_delete_coin_at_half_the_scale():
    base = roomy(lam=4)
    fill(base, 0, 9)
    drive(base._move(0, base.bucket(0), 4))
    freq = move_frequency(base, lambda f: drive(f.delete(0, 0)))
    assert abs(freq - 0.5) <= 4 * math.sqrt(0.25 / 10**4)
    for t in range(100):
        f = copy.deepcopy(base)
        f.rng = RandomSource(t, "x")
        drive(f.delete(0, 0))
        assert f.bucket(0) in (4, 3)


def test_last_edge_deleted_leaves_empty_bucket():
    f = roomy()
    fill(f, 3, 5)
    for e in range(5):
        drive(f.delete(3, e))
    assert f.bucket(3) == NEG and len(f) == 0 and not f.buckets and not f.trees


def test_bad_updates_rejected():
    f = roomy()
    drive(f.insert(0, 1))
    with pytest.raises(ValueError):
        drive(f.insert(0, 1))
    with pytest.raises(ValueError):
        drive(f.delete(0, 2))


def test_prefix_rules_with_small_prefixes():
    # pair prefix ceil(0.25 * 4 * 2**j) = 2**j and cluster prefix 1 + 4 = 5
    f = make_filter(4, 0.25, RandomSource(1, "p"))
    assert [f.pair_prefix(j) for j in range(4)] == [1, 2, 4, 8]
    assert f.cluster_prefix == 5
    for c in range(8):
        drive(f.insert(c, (c, 0)))
    # eight clusters of one edge in bucket 0: first pair withheld, five inactive
    assert f.buckets[0] == list(range(8))
    assert f.passed == {(c, 0) for c in range(1, 8)}
    assert f.inactive == set(range(5))
    assert not filter_violations(f)


op_lists = st.lists(st.tuples(st.booleans(), st.integers(0, 9), st.integers(0, 30)),
                    min_size=1, max_size=200)


@settings(max_examples=120, deadline=None)
@given(op_lists, st.integers(0, 2**32), st.sampled_from([0.05, 0.3, 1.0]),
       st.sampled_from([2, 4, 8]))
def test_invariants_after_every_operation(ops, seed, ell, lam):
    f = make_filter(lam, ell, RandomSource(seed, "prop"))
    present = {}
    for ins, c, e in ops:
        key = (c, e)
        flips_before = len(f.flipped_edges)
        passed_before = set(f.passed)
        if ins and key not in present:
            drive(f.insert(c, key))
            present[key] = c
        elif not ins and key in present:
            drive(f.delete(c, key))
            del present[key]
        else:
            continue
        errs = filter_violations(f)
        assert not errs, errs
        # the flip log names exactly the edges whose state changed
        changed = passed_before ^ f.passed
        assert changed <= set(f.flipped_edges[flips_before:])
    assert {e for es in f.edges_of.values() for e in es} == set(present)


def test_induced_changes_per_update_small():
    rng = RandomSource(4, "churn")
    f = make_filter(4, 1.0, RandomSource(4, "coins"))
    edges = {c: [] for c in range(32)}
    nxt = 0
    costs = []
    for _ in range(10**4):
        c = rng.randrange(32)
        es = edges[c]
        before = f.changes
        if not es or (len(es) < 64 and rng.random() < 0.5):
            drive(f.insert(c, nxt))
            es.append(nxt)
            nxt += 1
        else:
            drive(f.delete(c, es.pop(rng.randrange(len(es)))))
        costs.append(f.changes - before)
    assert sum(costs) / len(costs) <= 16
    assert not filter_violations(f)
