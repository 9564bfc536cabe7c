"""Mixture fitting: degenerate columns, mode recovery, BIC selection, EM monotonicity."""

from __future__ import annotations

import numpy as np
import pytest

from twinforge.errors import TooFewValues
from twinforge.tabular.mixture import ModeNormalizer, fit_mode_normalizer


def test_constant_column_degenerates_to_floor():
    norm = fit_mode_normalizer([5.0] * 40, seed=3)
    assert norm.n_modes == 1
    assert norm.means[0] == pytest.approx(5.0, abs=1e-12)
    assert norm.stdevs[0] == norm.stdev_floor == 1e-6  # zero range falls back to 1.0 scale


def test_two_mode_recovery():
    rng = np.random.default_rng(7)
    draws = np.concatenate([rng.normal(0.0, 1.0, 250), rng.normal(10.0, 1.0, 250)])
    norm = fit_mode_normalizer(draws, seed=5)
    assert norm.n_modes == 2
    means = sorted(norm.means)
    assert abs(means[0] - 0.0) < 0.3
    assert abs(means[1] - 10.0) < 0.3
    assert min(norm.weights) > 0.3


def test_bic_prefers_single_mode_on_unimodal_data():
    rng = np.random.default_rng(19)
    draws = rng.normal(0.0, 1.0, 500)
    norm = fit_mode_normalizer(draws, max_modes=2, seed=5)
    assert norm.n_modes == 1


def test_loglik_never_decreases():
    rng = np.random.default_rng(23)
    for sample in (
        rng.normal(0, 1, 200),
        np.concatenate([rng.normal(0, 0.1, 100), rng.normal(4, 0.5, 100)]),
        rng.uniform(0, 1, 150),
        np.repeat([1.0, 2.0, 3.0], 30),
    ):
        norm = fit_mode_normalizer(sample, seed=1)
        diffs = np.diff(norm.em_loglik)
        assert (diffs >= -1e-9).all()


def test_too_few_values():
    with pytest.raises(TooFewValues):
        fit_mode_normalizer([1.0])


def test_determinism():
    rng = np.random.default_rng(2)
    draws = rng.normal(3.0, 2.0, 300)
    a = fit_mode_normalizer(draws, seed=9)
    b = fit_mode_normalizer(draws, seed=9)
    assert a == b


def test_responsibilities_are_a_distribution():
    rng = np.random.default_rng(4)
    draws = np.concatenate([rng.normal(-2, 0.5, 100), rng.normal(2, 0.5, 100)])
    norm = fit_mode_normalizer(draws, seed=0)
    resp = norm.responsibilities(draws)
    assert resp.shape == (200, norm.n_modes)
    assert np.allclose(resp.sum(axis=1), 1.0)
    assert (resp >= 0).all()


def test_validation():
    with pytest.raises(ValueError):
        ModeNormalizer((0.5, 0.6), (0.0, 1.0), (1.0, 1.0), 1e-6)
    with pytest.raises(ValueError):
        ModeNormalizer((1.0,), (0.0,), (0.0,), 1e-6)
