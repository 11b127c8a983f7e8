import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpconnect import oracle
from dpconnect.graph import WITHIN_CELL, build_graph
from dpconnect.indices import (
    DegenerateDesignError,
    EmptyGroupError,
    afr,
    cross_connectedness,
    mafr,
    ols,
    rho,
    rho_vector,
    same_connectedness,
)
from dpconnect.noise import make_rng
from dpconnect.verification import random_small_graph


def test_four_node_connectedness(four_node):
    res = cross_connectedness(four_node)
    assert res.value == pytest.approx(7 / 12, abs=1e-15)
    assert res.group_size == 2
    np.testing.assert_allclose(res.per_node_shares, [2 / 3, 1 / 2])
    assert same_connectedness(four_node).value == pytest.approx(5 / 12, abs=1e-15)
    np.testing.assert_allclose(rho_vector(four_node), [2 / 3, 1 / 2, 0, 0])
    assert rho(four_node, 0) == pytest.approx(2 / 3)


def test_isolated_a_node_counts_as_zero_share():
    g = build_graph(3, [(1, 2)], is_b="aab")
    res = cross_connectedness(g)
    assert res.value == 0.5  # node 0 isolated with share 0, node 1 share 1
    assert res.isolated_in_group == 1
    assert same_connectedness(g).per_node_shares[0] == 1.0


def test_weighted_shares():
    g = build_graph(3, [(0, 1, 3.0), (0, 2, 1.0)], is_b="aab")
    assert rho(g, 0) == 0.25


def test_cell_modes():
    # cell {0, 1}: node 0 links to 1 (a) and 2 (b, outside the cell)
    g = build_graph(3, [(0, 1), (0, 2)], is_b="aab", cells={"c": [0, 1]})
    assert cross_connectedness(g, "c").value == pytest.approx(0.25)  # (1/2 + 0) / 2
    assert cross_connectedness(g, "c", WITHIN_CELL).value == 0.0


def test_empty_group():
    g = build_graph(2, [(0, 1)], is_b="bb")
    with pytest.raises(EmptyGroupError):
        cross_connectedness(g)


def test_afr_hand_values():
    g = build_graph(3, [(0, 1), (0, 2, 3.0)], ranks=[0.0, 0.2, 0.6])
    np.testing.assert_allclose(afr(g).afr, [(0.2 + 1.8) / 4, 0.0, 0.0])
    with pytest.raises(ValueError):
        afr(g, np.array([0.1, 0.2, 1.2]))


def test_ols_matches_polyfit():
    rng = make_rng(4)
    x = rng.random(500)
    y = 0.3 + 0.7 * x + 0.05 * rng.standard_normal(500)
    alpha, beta = ols(x, y)
    b, a = np.polyfit(x, y, 1)
    assert (alpha, beta) == pytest.approx((a, b), rel=1e-12)
    with pytest.raises(DegenerateDesignError):
        ols(np.ones(4), np.arange(4.0))


def test_mafr():
    assert mafr(0.4, 0.2, 0.0, 0.25) == pytest.approx(0.425)
    with pytest.raises(ValueError):
        mafr(0.4, 0.2, 0.5, 0.5)


def test_four_node_exact_fraction(four_node):
    assert oracle.naive_cross_connectedness(four_node, exact=True) == Fraction(7, 12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 14))
def test_dual_implementation(seed, n):
    g = random_small_graph(make_rng(seed), n, min_degree=0, weighted=True, ranks=True)
    if g.is_b.all():
        return
    c = cross_connectedness(g).value
    assert 0.0 <= c <= 1.0
    assert math.isclose(c, oracle.naive_cross_connectedness(g), abs_tol=1e-12)
    np.testing.assert_allclose(afr(g).afr, oracle.naive_afr(g), atol=1e-12)
