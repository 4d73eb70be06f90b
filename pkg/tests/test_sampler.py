import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urnsim.errors import EmptyStructure, NegativeWeight
from urnsim.rngutil import make_rng
from urnsim.sampler import WeightedIndex


def oracle_slot(weights, u):
    """Reference prefix search: smallest i with u < w_0 + ... + w_i."""
    cum = list(itertools.accumulate(weights))
    for i, c in enumerate(cum):
        if u < c:
            return i
    return len(weights) - 1


@given(
    st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=1, max_size=50),
    st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
)
@settings(max_examples=200)
def test_sample_u_matches_linear_scan(weights, frac):
    total = sum(weights)
    if total <= 0:
        wi = WeightedIndex(weights)
        with pytest.raises(EmptyStructure):
            wi.sample_u(0.0)
        return
    wi = WeightedIndex(weights)
    u = frac * total
    got = wi.sample_u(u)
    want = oracle_slot(weights, u)
    # at float boundaries both answers carry the same weight interval
    assert got == want or abs(sum(weights[: got + 1]) - u) < 1e-9 * max(total, 1.0)


def test_append_and_grow():
    wi = WeightedIndex()
    for i in range(100):
        wi.add(i, float(i + 1))
    assert len(wi) == 100
    assert wi.total == pytest.approx(sum(range(1, 101)))
    assert wi.weight(41) == 42.0
    # sparse append creates zero-filled slots
    wi.add(150, 3.0)
    assert len(wi) == 151
    assert wi.weight(120) == 0.0


def test_negative_weight_rejected():
    wi = WeightedIndex([1.0])
    with pytest.raises(NegativeWeight):
        wi.add(0, -0.5)


def test_empty_sampling_rejected():
    with pytest.raises(EmptyStructure):
        WeightedIndex().sample(make_rng(0))
    with pytest.raises(EmptyStructure):
        WeightedIndex([0.0, 0.0]).sample(make_rng(0))


def test_sampling_frequencies_match_weights():
    weights = [1.0, 2.0, 3.0, 4.0]
    wi = WeightedIndex(weights)
    rng = make_rng(5)
    counts = np.zeros(4)
    m = 40_000
    for _ in range(m):
        counts[wi.sample(rng)] += 1
    probs = np.array(weights) / sum(weights)
    se = np.sqrt(probs * (1 - probs) / m)
    assert np.all(np.abs(counts / m - probs) < 5 * se)


def test_incremental_updates_shift_distribution():
    wi = WeightedIndex([1.0, 1.0])
    wi.add(1, 8.0)  # slot 1 now carries weight 9 of 10
    rng = make_rng(7)
    hits = sum(wi.sample(rng) for _ in range(20_000))
    assert abs(hits / 20_000 - 0.9) < 0.01


def test_total_stays_consistent_over_many_updates():
    # crosses several drift-check intervals and capacity doublings
    wi = WeightedIndex()
    rng = make_rng(9)
    ref = 0.0
    for i in range(200_000):
        w = rng.random() * 1e-3
        wi.add(i % 1000, w)
        ref += w
    assert wi.total == pytest.approx(ref, rel=1e-8)
    assert wi.total == pytest.approx(sum(wi.weights()), rel=1e-9)
