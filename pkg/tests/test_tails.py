import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dnls_gibbs.errors import LambdaBelowNet, RegularityOutOfRange
from dnls_gibbs.gibbs import mode_std
from dnls_gibbs.tails import (
    T_k, concentration_dichotomy, derivative_functional, expected_net_threshold, linear_T, linear_tail_study,
    quadratic_form_matrix, quadratic_tail_study, sobolev_tail_study, sup_tail_study, survival,
)


@given(arrays(float, st.integers(1, 200), elements=st.floats(0, 50)),
       st.lists(st.floats(0, 60), min_size=1, max_size=20, unique=True).map(sorted))
def test_survival_is_a_tail_function(values, lambdas):
    s, se = survival(values, lambdas)
    assert np.all((0 <= s) & (s <= 1))
    assert np.all(np.diff(s) <= 0)
    assert np.all(se >= 0)
    for lam, p in zip(lambdas, s):
        assert p == np.mean(values >= lam)


def test_unsorted_grid_rejected():
    with pytest.raises(ValueError):
        sobolev_tail_study(2, 1.0, 8, [2.0, 1.0], 1000, 0)


def test_sobolev_tail():
    curve = sobolev_tail_study(2, 1.0, 64, np.arange(2.0, 17.0, 2.0), 100_000, seed=1)
    assert curve.passed, list(curve.rows())
    assert "Wick" in curve.params["weights"]


def test_sobolev_empty_grid():
    curve = sobolev_tail_study(2, 1.0, 8, [], 1000, 0)
    assert len(curve.lambdas) == 0 and curve.passed


def test_sobolev_regularity_guard():
    with pytest.raises(RegularityOutOfRange):
        sobolev_tail_study(2, 1.75, 8, [1.0], 1000, 0)


def test_concentration_dichotomy():
    rep = concentration_dichotomy(2, 1.25, 1.75, [16, 32, 64, 128], 10_000, seed=2)
    assert rep.low_stable and rep.high_grows and rep.passed


def test_concentration_marginal():
    rep = concentration_dichotomy(2, 1.25, 1.5, [16, 32], 2000, seed=2)
    assert rep.verdict_high == "marginal"


def test_concentration_singleton():
    rep = concentration_dichotomy(2, 1.25, 1.75, [16], 2000, seed=2)
    assert rep.low_stable is None and rep.verdict_high == "skipped" and len(rep.medians_low) == 1


def test_concentration_guard():
    with pytest.raises(RegularityOutOfRange):
        concentration_dichotomy(2, 1.5, 1.75, [8], 1000, 0)


def test_quadratic_form_matches_pointwise_product():
    rng = np.random.default_rng(0)
    N, k, x = 5, 2, 0.7
    c = rng.standard_normal(11) + 1j * rng.standard_normal(11)
    n = np.arange(-N, N + 1)
    direct = np.sum((1j * n) ** k * c * np.exp(1j * n * x)) * np.conj(np.sum(c * np.exp(1j * n * x)))
    assert c.conj() @ quadratic_form_matrix(k, N, x) @ c == pytest.approx(direct)


def test_T_k_at_most_one():
    assert T_k(quadratic_form_matrix(2, 32, 0.0), 2) <= 1


def test_quadratic_survival_at_zero():
    curve = quadratic_tail_study(2, 8, [0.0, 1.0], 1000, seed=0)
    assert curve.survival[0] == 1.0


def test_quadratic_tail():
    curve = quadratic_tail_study(2, 32, np.arange(4.0, 33.0, 4.0), 100_000, seed=3)
    assert curve.passed, list(curve.rows())


def test_sup_below_net():
    with pytest.raises(LambdaBelowNet):
        sup_tail_study(2, 16, [0.5 * expected_net_threshold(2, 16), 100.0], 1000, 0)


def test_sup_curve_nonincreasing():
    th = expected_net_threshold(2, 16)
    curve = sup_tail_study(2, 16, th * np.linspace(1.2, 4, 6), 2000, seed=5)
    assert np.all(np.diff(curve.survival) <= 0)
    assert curve.params["grid"] == 129


def test_sup_tail():
    th = expected_net_threshold(2, 16)
    curve = sup_tail_study(2, 16, th * np.linspace(1.2, 4.0, 8), 10_000, seed=6)
    assert curve.passed, list(curve.rows())


def test_linear_single_mode():
    a = np.zeros(17, complex)
    a[8] = 1.0
    assert linear_T(a, 3) == 1.0
    lam = np.linspace(0.2, 2.5, 10)
    curve = linear_tail_study(3, 8, a, lam, 100_000, seed=7)
    # |psi_0| is Rayleigh with E|psi_0|^2 = 1
    assert np.all(np.abs(curve.survival - np.exp(-lam ** 2)) <= 3 * curve.stderr + 1e-12)
    assert curve.passed


def test_linear_derivative_functional():
    N = 64
    a = derivative_functional(N, 1)
    lam = np.linspace(0.25, 4.0, 16)
    curve = linear_tail_study(2, N, a, lam, 100_000, seed=8)
    var = float(np.sum(np.abs(a) ** 2 * mode_std(2, N) ** 2))
    assert np.all(np.abs(curve.survival - np.exp(-lam ** 2 / var)) <= 3 * curve.stderr + 1e-12)
    assert curve.passed


def test_linear_zero_functional():
    curve = linear_tail_study(2, 4, np.zeros(9), [0.0, 0.5, 1.0], 1000, seed=0)
    assert list(curve.survival) == [1.0, 0.0, 0.0]
    assert list(curve.bound) == [1.0, 0.0, 0.0]


def test_linear_length_check():
    with pytest.raises(ValueError):
        linear_tail_study(2, 4, np.zeros(5), [1.0], 1000, 0)
