import math

import numpy as np
import pytest

from dpconnect.harness import (
    CSV_VERSION,
    parse_experiment_config,
    read_results_csv,
    results_csv,
    run_correlation_study,
    run_experiment,
    summarize,
    write_results_csv,
)
from dpconnect.netgen import GeneratorSpec
from dpconnect.noise import make_rng

CONFIG = """
generator = er
n = 300
avg_degree = 10
sweep = eps_total
values = 2, 8
graphs = 3
noise_seeds = 2
seed = 7   # inline comments are allowed
"""


def test_config_parsing():
    spec = parse_experiment_config(CONFIG)
    assert spec.generator == GeneratorSpec("er", 300, {"avg_degree": 10.0})
    assert spec.values == (2.0, 8.0)
    assert (spec.graphs, spec.noise_seeds, spec.seed) == (3, 2, 7)
    iv = parse_experiment_config(CONFIG.replace("eps_total", "interval").replace("2, 8", "0:0.25, 0.25:0.5")
                                 + "statistic = slope\n")
    assert iv.values == ((0.0, 0.25), (0.25, 0.5))


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown config keys"):
        parse_experiment_config(CONFIG + "epsilon = 3\n")


def test_runs_are_reproducible_and_worker_independent(tmp_path):
    spec = parse_experiment_config(CONFIG)
    serial = results_csv(run_experiment(spec), spec.sweep)
    assert serial == results_csv(run_experiment(spec), spec.sweep)
    assert serial == results_csv(run_experiment(spec, workers=2), spec.sweep)
    assert serial.startswith(f"# {CSV_VERSION}\n")
    assert "seconds" not in serial.splitlines()[1]


def test_row_invariants_and_summary(tmp_path):
    spec = parse_experiment_config(CONFIG)
    rows = run_experiment(spec)
    assert len(rows) == 2 * 3 * 2
    for r in rows:
        if r.aborted:
            assert r.private_value is None or math.isnan(r.squared_error)
        else:
            assert r.squared_error == (r.private_value - r.true_value) ** 2
    # the true value depends on the graph only
    by_graph = {}
    for r in rows:
        by_graph.setdefault((r.sweep_value, r.graph), set()).add(r.true_value)
    assert all(len(v) == 1 for v in by_graph.values())
    s = summarize(rows)
    assert s[8.0]["mse"] < s[2.0]["mse"]
    path = tmp_path / "out.csv"
    write_results_csv(rows, path, spec.sweep, timing=True)
    back = read_results_csv(path)
    assert len(back) == len(rows) and "seconds" in back[0]
    assert float(back[0]["true_value"]) == rows[0].true_value


def test_correlation_study_shapes_and_guards():
    gens = [GeneratorSpec("er", 200, {"avg_degree": 8.0, "frac_a": f}) for f in (0.3, 0.5, 0.7)]
    units = [(s.build(make_rng(0, k)), None) for k, s in enumerate(gens)]
    study = run_correlation_study(units, [8.0], replicates=20, seed=3)
    assert study.private[8.0].shape == (20, 3)
    assert study.noise_sd(8.0).shape == (3,)
    assert np.all(np.isfinite(study.correlations(8.0)))
    assert study.summary_csv() == run_correlation_study(units, [8.0], replicates=20, seed=3).summary_csv()
    with pytest.raises(ValueError, match="at least two"):
        run_correlation_study(units[:1], [8.0], replicates=2)
