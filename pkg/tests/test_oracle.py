import ast
import math
from pathlib import Path

import numpy as np
import pytest

import dpconnect.oracle as oracle_mod
from dpconnect import oracle
from dpconnect.continuous import suff_stats_sensitivities
from dpconnect.graph import build_graph
from dpconnect.noise import make_rng
from dpconnect.verification import double_star_graph, random_small_graph


def test_oracle_imports_only_graph_core():
    tree = ast.parse(Path(oracle_mod.__file__).read_text())
    local = {n.module for n in ast.walk(tree) if isinstance(n, ast.ImportFrom) and n.level > 0}
    assert local == {"graph"}


def test_four_node_expectations(four_node):
    ex = oracle.enumerate_expectations(four_node, 0.25)
    np.testing.assert_allclose(ex.rho_tilde, [2 / 3, 1 / 2, 0, 0], atol=1e-12)
    assert ex.s0 == pytest.approx(2.0, abs=1e-12)
    assert ex.s1 == pytest.approx(7 / 6, abs=1e-12)
    assert ex.total_probability == pytest.approx(1.0, abs=1e-12)


def test_enumeration_probability_sums_at_full_size():
    g = random_small_graph(make_rng(1), 14)
    assert abs(oracle.enumerate_expectations(g, 0.4).total_probability - 1.0) < 1e-12
    with pytest.raises(ValueError):
        oracle.enumerate_expectations(random_small_graph(make_rng(1), 15), 0.1)


def test_star_sensitivity_values():
    star = build_graph(6, [(0, k) for k in range(1, 6)], is_b="abbbbb")
    best = max(oracle.max_edge_sensitivity(star, np.array(bits, bool), 0.4)[0]
               for bits in np.ndindex(*(2,) * 6))
    assert best == pytest.approx(17.0, abs=1e-9)
    ds = double_star_graph()
    val, pair = oracle.max_edge_sensitivity(ds, ds.is_b, 0.4)
    assert pair == (0, 1)
    assert val == pytest.approx(29.850746268656, rel=1e-10)


def test_naive_ols_and_afr():
    g = build_graph(3, [(0, 1), (0, 2, 3.0)], ranks=[0.0, 0.2, 0.6])
    np.testing.assert_allclose(oracle.naive_afr(g), [0.5, 0.0, 0.0])
    a, b = oracle.naive_ols([0, 1, 2], [1, 3, 5])
    assert (a, b) == pytest.approx((1.0, 2.0))
    out = oracle.naive_recompute(g)
    assert set(out) == {"afr", "ols"}


def test_nvar_bound_attained_on_unit_interval():
    # x = (1, 0, ..., 0) moved to all zeros changes nvar by exactly (1 - 1/n)
    n = 6
    x = [0.0] * n
    d1, _ = suff_stats_sensitivities(n, (0, 1), (0, 1))
    assert oracle.max_nvar_change(x, 0.0, 1.0) == pytest.approx(d1)


def test_ncov_corner_search_beats_random_search():
    rng = make_rng(2)
    x, y = rng.random(6), rng.random(6)
    best = oracle.max_ncov_change(x, y, (0, 1), (0, 1))
    base = oracle._ncov(list(x), list(y))
    for _ in range(2000):
        k, l = rng.choice(6, 2, replace=False)
        x2, y2 = x.copy(), y.copy()
        x2[[k, l]], y2[[k, l]] = rng.random(2), rng.random(2)
        assert abs(oracle._ncov(list(x2), list(y2)) - base) <= best + 1e-12
    assert math.isfinite(best)
