import numpy as np
import pytest

from snipe.baselines import (
    GrouseState,
    grouse_step,
    oracle_equivalence_suite,
    oracle_least_change,
    zero_fill_svd,
)
from snipe.core import SnipeConfig, interpolate_column, snipe_run
from snipe.exceptions import BlockTooSmall, DimensionMismatch
from snipe.linalg import grassmann_distance
from snipe.model import ObservedVector, StreamConfig, stream_blocks

from .conftest import random_basis


def observe(x, omega):
    values = np.zeros_like(x)
    values[omega] = x[omega]
    return ObservedVector(values, omega)


# -- oracle ------------------------------------------------------------------

def test_oracle_full_support_returns_y(rng):
    B = random_basis(rng, 6, 2)
    y = rng.standard_normal(6)
    np.testing.assert_array_equal(oracle_least_change(B, ObservedVector(y, np.arange(6))), y)


def test_oracle_in_span_has_zero_objective(rng):
    for _ in range(50):
        B = random_basis(rng, 10, 3)
        omega = np.sort(rng.choice(10, size=5, replace=False))
        x = oracle_least_change(B, observe(B @ rng.standard_normal(3), omega))
        assert np.linalg.norm(x - B @ (B.T @ x)) < 1e-10


def test_oracle_matches_closed_form_example(rng):
    B = random_basis(rng, 12, 3)
    omega = np.sort(rng.choice(12, size=6, replace=False))
    y = observe(rng.standard_normal(12), omega)
    x_or = oracle_least_change(B, y)
    x_cf = interpolate_column(B, y)
    assert np.linalg.norm(x_cf - x_or) / np.linalg.norm(x_or) < 1e-8


def test_oracle_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        oracle_least_change(random_basis(rng, 5, 2), ObservedVector(np.zeros(6), []))


def test_oracle_equivalence_suite():
    res = oracle_equivalence_suite(500, seed=0)
    assert res["trials"] == 500
    assert res["max_rel_err"] < 1e-8
    assert res["max_feasibility"] < 1e-14


# -- GROUSE -----------------------------------------------------------------

def test_grouse_noop_when_in_span(rng):
    B = random_basis(rng, 8, 2)
    y = ObservedVector(B @ rng.standard_normal(2), np.arange(8))
    new = grouse_step(GrouseState(B, 3), y)
    np.testing.assert_array_equal(new.estimate, B)
    assert new.t == 4


def test_grouse_noop_with_zero_step(rng):
    B = random_basis(rng, 8, 2)
    y = observe(rng.standard_normal(8), [0, 3, 5])
    new = grouse_step(GrouseState(B, 1, step_scale=0.0), y)
    np.testing.assert_array_equal(new.estimate, B)


def test_grouse_stays_orthonormal_and_moves_toward_data(rng):
    n, r = 30, 3
    S = random_basis(rng, n, r)
    state = GrouseState(random_basis(rng, n, r), 1, step_scale=1.0)
    start = grassmann_distance(S, state.estimate)
    for _ in range(2000):
        x = S @ rng.standard_normal(r)
        state = grouse_step(state, observe(x, np.flatnonzero(rng.random(n) < 0.5)))
        B = state.estimate
        assert np.max(np.abs(B.T @ B - np.eye(r))) < 1e-8
    assert grassmann_distance(S, state.estimate) < start


def test_grouse_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        grouse_step(GrouseState(random_basis(rng, 5, 2)), ObservedVector(np.zeros(4), []))


# -- zero-filled SVD ----------------------------------------------------------

def test_zero_fill_full_observation_is_exact(rng):
    S = random_basis(rng, 20, 3)
    assert grassmann_distance(S, zero_fill_svd(S @ rng.standard_normal((3, 12)), 3)) < 1e-12


def test_zero_fill_single_column():
    x = np.array([3.0, 0.0, 4.0])
    np.testing.assert_allclose(zero_fill_svd(x, 1)[:, 0], x / 5.0, atol=1e-15)


def test_zero_fill_too_few_columns(rng):
    with pytest.raises(BlockTooSmall):
        zero_fill_svd(rng.standard_normal((6, 2)), 3)


@pytest.mark.slow
def test_zero_fill_is_worse_than_snipe():
    worse = []
    for seed in range(20):
        cfg = StreamConfig.uniform(1000, 3, 0.1, 6, 1500, seed=seed)
        blocks = list(stream_blocks(cfg))
        S = blocks[0][1].basis
        state, _ = snipe_run((b for b, _ in blocks), SnipeConfig(3))
        Y = np.hstack([b.values for b, _ in blocks])
        worse.append(grassmann_distance(S, zero_fill_svd(Y, 3)) > grassmann_distance(S, state.estimate))
    assert np.mean(worse) >= 0.9
