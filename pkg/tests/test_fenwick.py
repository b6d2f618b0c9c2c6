import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urnkit._fenwick import CumulativeWeights


def test_prefix_matches_running_sums():
    weights = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0]
    cw = CumulativeWeights(capacity_hint=4)
    for w in weights:
        cw.append(w)
    running = 0.0
    for i, w in enumerate(weights, start=1):
        running += w
        assert cw.prefix(i) == pytest.approx(running, abs=1e-12)
    assert cw.total() == pytest.approx(sum(weights))
    assert len(cw) == len(weights)


def test_update_changes_one_weight():
    cw = CumulativeWeights()
    for w in (1.0, 2.0, 3.0):
        cw.append(w)
    cw.update(2, 10.0)
    assert cw.weight(2) == 10.0
    assert cw.prefix(1) == 1.0
    assert cw.prefix(2) == 11.0
    assert cw.total() == 14.0


def test_find_selects_by_prefix():
    cw = CumulativeWeights()
    for w in (2.0, 3.0, 5.0):
        cw.append(w)
    # prefix boundaries: [0,2) -> 1, [2,5) -> 2, [5,10) -> 3
    assert cw.find(0.0) == 1
    assert cw.find(1.999) == 1
    assert cw.find(2.0) == 2
    assert cw.find(4.999) == 2
    assert cw.find(5.0) == 3
    assert cw.find(9.999) == 3


def test_find_clamps_at_total():
    cw = CumulativeWeights()
    cw.append(1.0)
    cw.append(1.0)
    # a caller's rounded total can put the target at or past the true sum
    assert cw.find(2.0) == 2
    assert cw.find(100.0) == 2


def test_positive_weights_enforced():
    cw = CumulativeWeights()
    with pytest.raises(ValueError):
        cw.append(0.0)
    with pytest.raises(ValueError):
        cw.append(-1.0)
    cw.append(1.0)
    with pytest.raises(ValueError):
        cw.update(1, 0.0)
    with pytest.raises(IndexError):
        cw.update(2, 1.0)


def test_grows_past_capacity_hint():
    cw = CumulativeWeights(capacity_hint=1)
    for i in range(1, 101):
        cw.append(float(i))
    assert len(cw) == 100
    assert cw.prefix(100) == pytest.approx(5050.0)
    assert cw.find(5049.5) == 100
    # the doubling rebuilds must keep find() valid over the whole tree
    assert cw.find(0.5) == 1
    assert cw.find(1.5) == 2


def test_find_valid_after_rebuild_into_large_capacity():
    # a rebuild with far fewer items than capacity must still route
    # find() through the empty high nodes correctly
    cw = CumulativeWeights(capacity_hint=1024)
    cw.rebuild([4.0, 2.0, 1.0])
    assert [cw.find(t) for t in (0.0, 3.9, 4.0, 5.9, 6.0, 6.9)] == \
        [1, 1, 2, 2, 3, 3]


def test_rebuild_replaces_contents():
    cw = CumulativeWeights()
    for w in (1.0, 1.0, 1.0):
        cw.append(w)
    cw.rebuild([4.0, 2.0])
    assert len(cw) == 2
    assert cw.total() == pytest.approx(6.0)
    assert cw.find(3.999) == 1
    assert cw.find(4.0) == 2


def test_exact_total_is_compensated_sum():
    weights = [0.1] * 10
    cw = CumulativeWeights()
    for w in weights:
        cw.append(w)
    assert cw.exact_total() == math.fsum(weights)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=0.01, max_value=100.0), min_size=1,
                max_size=60),
       st.data())
def test_matches_naive_model(weights, data):
    cw = CumulativeWeights(capacity_hint=1)
    model = []
    for w in weights:
        cw.append(w)
        model.append(w)
    # a few random updates
    for _ in range(data.draw(st.integers(0, 5))):
        idx = data.draw(st.integers(1, len(model)))
        w = data.draw(st.floats(min_value=0.01, max_value=100.0))
        cw.update(idx, w)
        model[idx - 1] = w
    for i in range(1, len(model) + 1):
        assert cw.prefix(i) == pytest.approx(sum(model[:i]), rel=1e-9)
    target = data.draw(st.floats(min_value=0.0, max_value=0.999)) * sum(model)
    found = cw.find(target)
    # the naive answer: smallest i with strict prefix sum > target, up to
    # float noise at the boundaries
    running = 0.0
    naive = len(model)
    for i, w in enumerate(model, start=1):
        running += w
        if running > target:
            naive = i
            break
    assert abs(found - naive) <= 1 or math.isclose(
        cw.prefix(min(found, naive)), target, rel_tol=1e-9)
