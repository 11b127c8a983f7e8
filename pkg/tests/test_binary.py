import math

import numpy as np
import pytest
from scipy import stats

from dpconnect.binary import (
    ReleaseAborted,
    debias_node_stats,
    debias_weights,
    hajek,
    noise_scale,
    privatize_binary,
    release_binary,
    s1_sensitivity,
)
from dpconnect.graph import build_graph
from dpconnect.indices import cross_connectedness
from dpconnect.netgen import gen_er_labeled
from dpconnect.noise import PrivacyBudget, PrivateLabels, flip_probability, make_rng

LN3 = math.log(3)


def test_four_node_trace(four_node):
    st = debias_node_stats(four_node, PrivateLabels(four_node.is_b.copy(), 0.25))
    np.testing.assert_allclose(st.rho_tilde, [5 / 6, 1 / 2, -1 / 2, -1 / 2], atol=1e-15)
    np.testing.assert_allclose(st.w, [1.5, 1.5, -0.5, -0.5])
    assert hajek(st) == pytest.approx((2.5, 2.0, 1.25))


def test_four_node_noiseless_release_is_exact(four_node):
    rel = release_binary(four_node, PrivacyBudget(LN3, 1.0), None, noiseless=True)
    assert (rel.value, rel.s0, rel.s1, rel.noise_scale, rel.p) == (1.25, 2.0, 2.5, 3.0, 0.25)
    assert not rel.aborted


def test_sensitivity_and_scale():
    assert s1_sensitivity(0.25) == 6.0
    assert noise_scale(0.25, 1.0, 2.0) == 3.0
    np.testing.assert_allclose(debias_weights(np.array([False, True]), 0.0), [1.0, 0.0])


def test_abort_when_s0_not_positive():
    g = build_graph(3, [(0, 1), (1, 2)], is_b="bbb")
    rel = release_binary(g, PrivacyBudget(1.0, 1.0), make_rng(0), noiseless=True)
    assert rel.aborted and math.isnan(rel.value) and rel.s0 < 0
    with pytest.raises(ReleaseAborted):
        hajek(debias_node_stats(g, PrivateLabels(g.is_b.copy(), 0.2)))


def test_laplace_term_has_stated_scale():
    g = gen_er_labeled(300, 10.0, 0.5, make_rng(1))
    budget = PrivacyBudget(2.0, 0.5)
    priv = privatize_binary(g, budget.eps_label, make_rng(2))
    base = release_binary(g, budget, None, private_labels=priv, noiseless=True)
    z = np.array([release_binary(g, budget, make_rng(3, k), private_labels=priv).value - base.value
                  for k in range(3000)])
    assert base.noise_scale == pytest.approx(s1_sensitivity(priv.p) / (0.5 * base.s0))
    assert stats.kstest(z, stats.laplace(scale=base.noise_scale).cdf).pvalue > 0.001


def test_reproducible_under_seed():
    g = gen_er_labeled(500, 8.0, 0.4, make_rng(5))
    b = PrivacyBudget(1.0, 1.0)
    assert release_binary(g, b, make_rng(9)).value == release_binary(g, b, make_rng(9)).value


def test_monte_carlo_mean_close_to_truth():
    g = gen_er_labeled(2000, 20.0, 0.5, make_rng(6))
    truth = cross_connectedness(g).value
    vals = [release_binary(g, PrivacyBudget(2.0, 2.0), make_rng(7, k)).value for k in range(400)]
    assert np.mean(vals) == pytest.approx(truth, abs=4 * np.std(vals) / 20 + 1e-3)


def test_clamp_and_validation(four_node):
    rel = release_binary(four_node, PrivacyBudget(LN3, 1.0), None, noiseless=True, clamp=True)
    assert rel.value == 1.0 and rel.clamped
    with pytest.raises(ValueError, match="delta_label"):
        release_binary(four_node, PrivacyBudget(1.0, 1.0, 1e-3), make_rng(0))
    wrong = PrivateLabels(four_node.is_b.copy(), flip_probability(2.0))
    with pytest.raises(ValueError, match="different eps_label"):
        release_binary(four_node, PrivacyBudget(1.0, 1.0), make_rng(0), private_labels=wrong)


def test_cell_release_uses_only_members():
    g = build_graph(4, [(0, 1), (0, 2), (2, 3)], is_b="abab", cells={"left": [0, 1], "empty": []})
    rel = release_binary(g, PrivacyBudget(LN3, 1.0), None, "left", noiseless=True)
    st = debias_node_stats(g, PrivateLabels(g.is_b.copy(), 0.25), "left")
    np.testing.assert_array_equal(st.nodes, [0, 1])
    assert rel.s0 == pytest.approx(float(st.w.sum()))
    with pytest.raises(ValueError, match="empty"):
        release_binary(g, PrivacyBudget(LN3, 1.0), None, "empty", noiseless=True)
