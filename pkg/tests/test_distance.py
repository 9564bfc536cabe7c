"""Distance functions against independent oracles and metric properties."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from twinforge.errors import EmptySample
from twinforge.tabular.distance import emd_1d, tv_distance


def matching_emd(a, b):
    """Independent oracle: minimum-cost perfect matching for equal sizes."""
    cost = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    rows, cols = linear_sum_assignment(cost)
    return cost[rows, cols].sum() / len(a)


def test_identity_and_point_masses():
    assert emd_1d([1.0, 2.0, 3.0], [3.0, 1.0, 2.0]) == 0.0
    assert emd_1d([0.0], [1.0]) == 1.0
    assert emd_1d([0.0, 1.0], [0.5, 0.5]) == pytest.approx(0.5, abs=1e-12)
    assert matching_emd([0.0, 1.0], [0.5, 0.5]) == pytest.approx(0.5, abs=1e-12)


def test_empty_sample():
    with pytest.raises(EmptySample):
        emd_1d([], [1.0])
    with pytest.raises(EmptySample):
        tv_distance([], ["a"])


def test_matches_min_cost_matching_on_random_pairs():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        a = rng.normal(0, 3, n)
        b = rng.normal(1, 2, n)
        assert abs(emd_1d(a, b) - matching_emd(a, b)) < 1e-9


def test_unequal_sizes_match_cdf_formula():
    # against the textbook quantile form for a simple hand case
    assert emd_1d([0.0, 0.0, 1.0], [0.0]) == pytest.approx(1.0 / 3.0, abs=1e-12)


_sample = st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=12)


@given(_sample, _sample)
def test_symmetry_and_nonnegativity(a, b):
    d = emd_1d(a, b)
    assert d >= 0.0
    assert d == pytest.approx(emd_1d(b, a), abs=1e-12)


@given(_sample, _sample, _sample)
def test_triangle_inequality(a, b, c):
    assert emd_1d(a, c) <= emd_1d(a, b) + emd_1d(b, c) + 1e-9


@given(_sample)
def test_zero_iff_identical_empirical(a):
    shuffled = list(reversed(a))
    assert emd_1d(a, shuffled) == 0.0


def test_zero_implies_identical_distribution():
    assert emd_1d([0.0, 1.0], [0.0, 1.0 + 1e-9]) > 0.0


def test_tv_distance_cases():
    assert tv_distance(["a", "b", "a"], ["a", "a", "b"]) == 0.0
    assert tv_distance(["a", "a"], ["b"]) == 1.0
    assert tv_distance(["a", "b"], ["a", "a", "a", "b"]) == pytest.approx(0.25, abs=1e-12)


@given(
    st.lists(st.sampled_from("abc"), min_size=1, max_size=20),
    st.lists(st.sampled_from("abc"), min_size=1, max_size=20),
)
def test_tv_bounds_and_symmetry(a, b):
    d = tv_distance(a, b)
    assert 0.0 <= d <= 1.0
    assert d == pytest.approx(tv_distance(b, a), abs=1e-12)
