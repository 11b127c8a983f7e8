import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpconnect.continuous import (
    LITERAL,
    MATCHED,
    DegenerateAttenuationError,
    dp_suff_stats,
    eiv_debias,
    ncov,
    nvar,
    privatize_ranks,
    release_mafr,
    suff_stats_sensitivities,
)
from dpconnect.indices import afr, mafr, ols
from dpconnect.netgen import gen_graphon
from dpconnect.noise import PrivacyBudget, make_rng, trunc_laplace_params


@pytest.fixture(scope="module")
def ranked_graph():
    return gen_graphon(3000, 20.0, 0.8, make_rng(21))


def test_sensitivities():
    d1, d2 = suff_stats_sensitivities(4, (0, 2), (1, 2))
    assert (d1, d2) == (3.0, 3.0)


def test_noiseless_suff_stats_equals_ols():
    rng = make_rng(1)
    x, y = rng.random(50), rng.random(50)
    assert dp_suff_stats(x, y, 1.0, None, noiseless=True) == pytest.approx(ols(x, y), rel=1e-13)
    assert nvar(x) == pytest.approx(np.var(x) * 50)
    assert ncov(x, y) == pytest.approx(np.cov(x, y, ddof=0)[0, 1] * 50)


def test_suff_stats_bounds_and_abort():
    with pytest.raises(ValueError, match="outside"):
        dp_suff_stats(np.array([0.0, 2.0]), np.array([0.0, 1.0]), 1.0, make_rng(0))
    # constant x: the noisy variance is the variance noise alone, negative for some seeds
    x, y = np.full(10, 0.5), np.linspace(0, 1, 10)
    outcomes = [dp_suff_stats(x, y, 1.0, make_rng(2, k)) for k in range(40)]
    assert any(o is None for o in outcomes) and any(o is not None for o in outcomes)


def test_pairings_share_draws_but_differ():
    rng_x = make_rng(3)
    x, y = rng_x.random(30), rng_x.random(30)
    a = dp_suff_stats(x, y, 1.0, make_rng(4), (0, 1), (0, 2), pairing=MATCHED)
    b = dp_suff_stats(x, y, 1.0, make_rng(4), (0, 1), (0, 2), pairing=LITERAL)
    assert a != b
    with pytest.raises(ValueError):
        dp_suff_stats(x, y, 1.0, make_rng(4), pairing="shuffled")


def test_eiv_formula():
    x_hat = np.array([0.0, 1.0, 2.0, 3.0])
    s2 = np.var(x_hat, ddof=1)
    a, b = eiv_debias(0.1, 0.5, x_hat, 0.5)
    assert b == pytest.approx(0.5 * s2 / (s2 - 0.5))
    assert a == pytest.approx(0.1 + (0.5 - b) * 1.5)
    with pytest.raises(DegenerateAttenuationError):
        eiv_debias(0.1, 0.5, x_hat, s2)


def test_eiv_recovers_attenuated_slope():
    rng = make_rng(5)
    n = 200_000
    x = rng.random(n)
    y = 0.2 + 0.6 * x + 0.05 * rng.standard_normal(n)
    priv = privatize_ranks(x, 4.0, 1e-3, rng)
    a_star, b_star = ols(priv.x_hat, y)
    assert b_star < 0.5
    _, b = eiv_debias(a_star, b_star, priv.x_hat, priv.params.variance)
    assert b == pytest.approx(0.6, abs=0.02)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 8.0), st.floats(1e-7, 0.2), st.integers(0, 2**31))
def test_private_ranks_stay_in_bounds(eps, delta, seed):
    x = make_rng(seed).random(200)
    priv = privatize_ranks(x, eps, delta, make_rng(seed, 1))
    lo, hi = priv.bounds
    assert np.all(priv.x_hat >= lo) and np.all(priv.x_hat <= hi)
    assert priv.params == trunc_laplace_params(1.0, eps, delta)


def test_noiseless_release_is_bit_identical(ranked_graph):
    g = ranked_graph
    budget = PrivacyBudget(4.0, 4.0, 1e-3)
    reg = release_mafr(g, budget, (0.0, 0.25), None, noiseless=True)
    alpha, beta = ols(g.ranks, afr(g).afr)
    assert reg.sigma2 == 0.0 and not reg.aborted
    assert (reg.alpha_tilde, reg.beta_tilde) == (alpha, beta)
    assert reg.mafr == mafr(alpha, beta, 0.0, 0.25)


def test_private_release_near_truth(ranked_graph):
    g = ranked_graph
    _, beta = ols(g.ranks, afr(g).afr)
    vals = [release_mafr(g, PrivacyBudget(4.0, 4.0, 1e-3), (0, 0.25), make_rng(8, k)).beta_tilde
            for k in range(30)]
    assert np.median(vals) == pytest.approx(beta, abs=0.05)


def test_release_validation(ranked_graph):
    with pytest.raises(ValueError, match="delta_label"):
        release_mafr(ranked_graph, PrivacyBudget(1.0, 1.0), (0, 0.25), make_rng(0))
    with pytest.raises(ValueError, match="interval"):
        release_mafr(ranked_graph, PrivacyBudget(1.0, 1.0, 1e-3), (0.5, 0.2), make_rng(0))
