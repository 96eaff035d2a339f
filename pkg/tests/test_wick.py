import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import distance_by_grid, distance_by_moments

from dnls_gibbs.errors import MismatchedMethods
from dnls_gibbs.gibbs import sample_coeffs
from dnls_gibbs.spectral import FourierField
from dnls_gibbs.wick import (
    MomentSpec, f_k_N_eval, f_k_N_sum, hypercontractivity_check, hypercontractivity_from_values,
    l2_distance_analytic, l2_distance_mc, orbit, wick_moment,
)


def test_second_moment():
    assert wick_moment(MomentSpec((2,), (2,), 2)) == 1 / 25


def test_second_moment_off_diagonal():
    assert wick_moment(MomentSpec((1,), (2,), 2)) == 0.0


def test_fourth_moment_repeated_mode():
    assert wick_moment(MomentSpec((3, 3), (3, 3), 2)) == pytest.approx(2 / 10 ** 4, rel=1e-15)


def test_fourth_moment_monte_carlo():
    c = sample_coeffs(2, 3, 1_000_000, seed=4)[:, 6]
    x = np.abs(c) ** 4
    assert abs(x.mean() - 2e-4) <= 3 * x.std() / math.sqrt(len(x))


def test_moment_spec_lengths():
    with pytest.raises(ValueError):
        MomentSpec((1, 2), (1,), 2)


pairs = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=4)


@given(pairs, st.randoms(use_true_random=False))
@settings(max_examples=100)
def test_moment_invariant_under_pair_reordering(ps, rnd):
    ms, ns = zip(*ps)
    shuffled = list(ps)
    rnd.shuffle(shuffled)
    ms2, ns2 = zip(*shuffled)
    assert wick_moment(MomentSpec(ms, ns, 2)) == pytest.approx(wick_moment(MomentSpec(ms2, ns2, 2)), rel=1e-14)


def test_f_zero_field():
    assert f_k_N_eval(FourierField.zeros(4), 2) == 0


def test_f_single_mode():
    c = 0.3 - 0.4j
    val = f_k_N_eval(FourierField.from_modes(3, {1: c}), 2)
    assert val == pytest.approx(1j * abs(c) ** 4, abs=1e-15)


def test_f_two_real_modes():
    field = FourierField.from_modes(4, {1: 0.7, -2: 0.4})
    direct, _ = f_k_N_sum(field.coeffs, 2)
    assert abs(f_k_N_eval(field, 2) - direct) <= 1e-10


def test_f_mismatch_detected():
    field = FourierField.from_modes(2, {1: 1.0, 2: 0.5})
    with pytest.raises(MismatchedMethods):
        f_k_N_eval(field, 2, tol=-1.0)


@given(st.integers(0, 10_000), st.integers(2, 3))
@settings(max_examples=30)
def test_f_methods_agree(seed, k):
    c = sample_coeffs(k, 5, 1, seed)[0] * 4
    f_k_N_eval(FourierField(5, c), k)


def test_orbits_partition_s4():
    from dnls_gibbs.wick import S4
    sizes = [sum(orbit(s) == o for s in S4) for o in (1, 2, 3)]
    assert sizes == [4, 16, 4]


def test_distance_equal_truncations():
    w = l2_distance_analytic(2, 5, 5)
    assert (w.total, w.w1, w.w2, w.w3) == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("k,M,N", [(2, 1, 3), (3, 1, 3), (2, 2, 4), (3, 2, 4)])
def test_distance_matches_moment_expansion(k, M, N):
    got = l2_distance_analytic(k, M, N).total
    assert got == pytest.approx(distance_by_moments(k, M, N), rel=1e-9)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("M,N", [(1, 2), (2, 5), (3, 6), (4, 8), (2, 8)])
def test_distance_matches_grid_oracle(k, M, N):
    w = l2_distance_analytic(k, M, N)
    assert w.total == pytest.approx(distance_by_grid(k, M, N), rel=1e-9)
    assert w.w1 == 0.0
    assert w.total >= 0
    assert abs(w.total - (w.w1 + w.w2 + w.w3)) <= 1e-12 * max(1.0, w.total)


@pytest.mark.parametrize("k", [2, 3])
def test_distance_nondecreasing_in_N(k):
    totals = [l2_distance_analytic(k, 3, N).total for N in range(3, 12)]
    assert all(b >= a for a, b in zip(totals, totals[1:]))


def test_mc_equal_truncations():
    assert l2_distance_mc(2, 6, 6, 500, 0) == (0.0, 0.0)


@pytest.mark.parametrize("k,M,N", [(2, 2, 4), (2, 3, 6), (2, 4, 8), (3, 2, 4), (3, 3, 6), (3, 4, 8)])
def test_mc_agrees_with_analytic(k, M, N):
    est, se = l2_distance_mc(k, M, N, 20_000, seed=100 * k + M)
    assert abs(est - l2_distance_analytic(k, M, N).total) <= 3 * se


def test_mc_rejects_few_samples():
    with pytest.raises(ValueError):
        l2_distance_mc(2, 2, 4, 50, 0)


def test_mc_independent_of_workers():
    assert l2_distance_mc(2, 2, 6, 3000, 7) == l2_distance_mc(2, 2, 6, 3000, 7, workers=3)


def test_hyper_degenerate():
    rep = hypercontractivity_from_values(np.zeros(100))
    assert rep.undefined and math.isnan(rep.ratio)


def test_hyper_scale_invariant():
    vals = sample_coeffs(2, 4, 5000, 3)[:, 5]
    r1 = hypercontractivity_from_values(vals).ratio
    r2 = hypercontractivity_from_values(2 * vals).ratio
    assert r1 == pytest.approx(r2, rel=1e-12)


def test_hyper_small_run():
    rep = hypercontractivity_check(2, 8, 10_000, seed=1)
    assert rep.passed and 1 < rep.ratio < rep.bound == 9.0


def test_hyper_rejects_few_samples():
    with pytest.raises(ValueError):
        hypercontractivity_check(2, 8, 1000, seed=1)
