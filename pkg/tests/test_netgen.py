import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpconnect.indices import cross_connectedness
from dpconnect.netgen import (
    VILLAGE_SUMMARY,
    GeneratorError,
    GeneratorSpec,
    bernoulli_positions,
    gen_er,
    gen_graphon,
    gen_sbm,
    gen_sbm2,
    gen_village_panel,
    graphon_normalizer,
    graphon_scale,
    village_block_probs,
)
from dpconnect.noise import make_rng


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 5000), st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_bernoulli_positions_are_sorted_unique_in_range(total, p, seed):
    pos = bernoulli_positions(total, p, make_rng(seed))
    assert np.all(np.diff(pos) > 0)
    assert pos.size == 0 or (pos[0] >= 0 and pos[-1] < total)


def test_bernoulli_positions_rate_and_uniformity():
    pos = bernoulli_positions(1_000_000, 0.01, make_rng(1))
    assert pos.size == pytest.approx(10_000, abs=5 * math.sqrt(10_000))
    counts = np.bincount(pos // 100_000, minlength=10)
    assert counts.min() > 850 and counts.max() < 1150
    assert bernoulli_positions(10, 1.0, make_rng(0)).tolist() == list(range(10))


def test_er_average_degree():
    g = gen_er(4000, 20 / 3999, make_rng(2))
    assert g.degrees.mean() == pytest.approx(20, abs=0.5)
    assert g.adjacency.diagonal().sum() == 0


def test_sbm_block_densities():
    g = gen_sbm((300, 500), [[0.05, 0.01], [0.01, 0.03]], make_rng(3))
    A = g.adjacency.toarray()
    a, b = slice(0, 300), slice(300, 800)
    assert A[a, a].sum() / (300 * 299) == pytest.approx(0.05, rel=0.05)
    assert A[b, b].sum() / (500 * 499) == pytest.approx(0.03, rel=0.05)
    assert A[a, b].sum() / (300 * 500) == pytest.approx(0.01, rel=0.08)
    with pytest.raises(GeneratorError):
        gen_sbm((2, 2), [[0.1, 0.2], [0.3, 0.1]], make_rng(0))


def test_sbm2_with_explicit_labels():
    labels = np.array([True, False] * 100)
    g = gen_sbm2(200, 0.1, 0.0, make_rng(4), labels=labels)
    np.testing.assert_array_equal(g.is_b, labels)
    assert cross_connectedness(g).value == 0.0


def test_graphon_normalizer_values():
    # reference value from a 40-digit evaluation
    assert graphon_normalizer(0.8) == pytest.approx(0.77915301286631747322, rel=1e-15)
    assert graphon_normalizer(0.0) == 1.0
    # both sides of the series/closed-form switch agree with the Taylor expansion
    for h in (0.99e-4, 1.01e-4):
        assert graphon_normalizer(h) == pytest.approx(1 - h / 3 + h * h / 12, rel=1e-9)


def test_graphon_degree_and_ranks():
    g = gen_graphon(20_000, 20.0, 0.8, make_rng(5))
    assert g.degrees.mean() == pytest.approx(20, abs=0.4)
    assert g.ranks.min() >= 0 and g.ranks.max() <= 1
    g0 = gen_graphon(5000, 10.0, 0.0, make_rng(6))
    assert g0.degrees.mean() == pytest.approx(10, abs=0.3)


def test_graphon_pair_probability_follows_kernel():
    n, h = 800, 6.0
    c = graphon_scale(n, 40.0, h)
    bins = np.linspace(0, 1, 6)
    hits = np.zeros(5)
    trials = np.zeros(5)
    expected = np.zeros(5)
    for k in range(30):
        g = gen_graphon(n, 40.0, h, make_rng(7, k), blocks=8)
        x = g.ranks
        iu, ju = np.triu_indices(n, 1)
        gap = np.abs(x[iu] - x[ju])
        b = np.minimum(np.digitize(gap, bins) - 1, 4)
        present = g.adjacency.toarray()[iu, ju] > 0
        hits += np.bincount(b, weights=present, minlength=5)
        trials += np.bincount(b, minlength=5)
        expected += np.bincount(b, weights=c * np.exp(-h * gap), minlength=5)
    z = (hits - expected) / np.sqrt(expected)
    assert np.all(np.abs(z[expected > 50]) < 4)


def test_graphon_rejects_impossible_density():
    with pytest.raises(GeneratorError):
        gen_graphon(10, 9.5, 8.0, make_rng(0))


def test_village_calibration():
    n, n_a, d, c = VILLAGE_SUMMARY[0]
    P = village_block_probs(n, n_a, d, c)
    n_b = n - n_a
    deg_a = P[0, 0] * (n_a - 1) + P[0, 1] * n_b
    deg_b = P[1, 1] * (n_b - 1) + P[0, 1] * n_a
    assert deg_a == pytest.approx(d) and deg_b == pytest.approx(d)
    assert P[0, 1] * n_b / deg_a == pytest.approx(c)


def test_village_panel_shape():
    panel = gen_village_panel(make_rng(8))
    assert len(panel) == 46
    sizes = [g.node_count for g in panel]
    assert min(sizes) == 99 and max(sizes) == 354
    truths = np.array([cross_connectedness(g).value for g in panel])
    targets = np.array([row[3] for row in VILLAGE_SUMMARY])
    assert np.corrcoef(truths, targets)[0, 1] > 0.9


def test_generator_spec():
    g = GeneratorSpec("er", 300, {"avg_degree": 6.0, "frac_a": 0.3}).build(make_rng(9))
    assert int((~g.is_b).sum()) == 90
    with pytest.raises(GeneratorError):
        GeneratorSpec("lattice", 10, {}).build(make_rng(0))


def test_large_generation_round_trip(tmp_path):
    from dpconnect.io import ingest, write_graph
    import hashlib

    g = gen_graphon(100_000, 20.0, 0.8, make_rng(10))
    paths = write_graph(g, tmp_path / "big")
    h = ingest(paths["edges"], paths["labels"])
    digest = lambda e: hashlib.sha256(np.ascontiguousarray(e).tobytes()).hexdigest()
    assert digest(h.edges()) == digest(g.edges())
    np.testing.assert_array_equal(h.ranks, g.ranks)
