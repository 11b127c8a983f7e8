"""Monte Carlo sweeps and cross-cell correlation studies.

Replicate structure: for every sweep point, ``graphs`` graphs are generated
and each receives ``noise_seeds`` independent privacy draws.  The true
statistic is computed once per graph.  Streams are keyed so that graph ``g``
uses the same generator stream at every sweep point, and noise draw ``k`` on
graph ``g`` uses the same stream at every sweep point (common random numbers
across the sweep):

    graph stream:  make_rng(seed, 0, g)
    noise stream:  make_rng(seed, 1, g, k)
"""

from __future__ import annotations

import configparser
import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .binary import privatize_binary, release_binary
from .continuous import DegenerateAttenuationError, release_mafr
from .graph import EGO_TO_ALL, LabeledGraph
from .indices import EmptyGroupError, afr, cross_connectedness, mafr, ols
from .netgen import GeneratorSpec
from .noise import PrivacyBudget, make_rng

CSV_VERSION = "dpconnect-results v1"
SWEEPS = ("homophily", "eps_total", "eps_split", "n", "composition", "interval")
STATISTICS = ("connectedness", "slope", "mafr")
DEFAULT_DELTA_LABEL = 1e-3


def fmt(x) -> str:
    """Float formatting used in every CSV: 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative Monte Carlo sweep.

    ``generator`` is the base generator; the sweep variable overrides one of
    its parameters (or the budget / interval) at each point.
    """

    generator: GeneratorSpec
    sweep: str
    values: tuple
    statistic: str = "connectedness"
    eps_total: float = 2.0
    label_fraction: float = 0.5
    delta_label: float = DEFAULT_DELTA_LABEL
    interval: tuple[float, float] = (0.0, 0.25)
    graphs: int = 10
    noise_seeds: int = 10
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if self.sweep not in SWEEPS:
            raise ValueError(f"sweep must be one of {SWEEPS}")
        if self.statistic not in STATISTICS:
            raise ValueError(f"statistic must be one of {STATISTICS}")
        if not self.values:
            raise ValueError("sweep values must be nonempty")
        if self.graphs < 1 or self.noise_seeds < 1:
            raise ValueError("replicate counts must be >= 1")

    def point(self, value) -> tuple[GeneratorSpec, PrivacyBudget, tuple[float, float]]:
        """Generator, budget and interval at one sweep value."""
        gen = self.generator
        prm = dict(gen.params)
        eps, frac, interval = self.eps_total, self.label_fraction, self.interval
        if self.sweep == "homophily":
            if gen.kind == "sbm2":
                total = prm.get("p_sum", prm["p_within"] + prm["p_between"])
                prm["p_within"], prm["p_between"] = float(value), total - float(value)
            elif gen.kind == "graphon":
                prm["h"] = float(value)
            else:
                raise ValueError("homophily sweep needs an sbm2 or graphon generator")
        elif self.sweep == "eps_total":
            eps = float(value)
        elif self.sweep == "eps_split":
            frac = float(value)
        elif self.sweep == "n":
            gen = replace(gen, n=int(value))
        elif self.sweep == "composition":
            prm["frac_a"] = float(value)
        elif self.sweep == "interval":
            interval = tuple(float(v) for v in value)
        gen = replace(gen, params=prm)
        delta = self.delta_label if self.statistic != "connectedness" else 0.0
        return gen, PrivacyBudget.split(eps, frac, delta), interval


@dataclass
class ResultRow:
    sweep_value: object
    graph: int
    noise: int
    true_value: float
    private_value: float
    squared_error: float
    aborted: bool
    seconds: float = 0.0


def true_statistic(g: LabeledGraph, statistic: str, interval) -> float:
    if statistic == "connectedness":
        return cross_connectedness(g).value
    alpha, beta = ols(g.ranks, afr(g).afr)
    return beta if statistic == "slope" else mafr(alpha, beta, *interval)


def private_statistic(g, statistic, budget, interval, rng) -> float | None:
    """One private release; ``None`` when the release aborted."""
    if statistic == "connectedness":
        rel = release_binary(g, budget, rng)
        return None if rel.aborted else rel.value
    try:
        reg = release_mafr(g, budget, interval, rng)
    except DegenerateAttenuationError:
        return None
    if reg.aborted:
        return None
    return reg.beta_tilde if statistic == "slope" else reg.mafr


def _run_graph(args) -> list[ResultRow]:
    spec, point_value, g_idx = args
    gen, budget, interval = spec.point(point_value)
    g = gen.build(make_rng(spec.seed, 0, g_idx))
    try:
        truth = true_statistic(g, spec.statistic, interval)
    except EmptyGroupError:
        truth = float("nan")
    rows = []
    for k in range(spec.noise_seeds):
        t0 = time.perf_counter()
        val = private_statistic(g, spec.statistic, budget, interval, make_rng(spec.seed, 1, g_idx, k))
        dt = time.perf_counter() - t0
        if val is None:
            rows.append(ResultRow(point_value, g_idx, k, truth, float("nan"), float("nan"), True, dt))
        else:
            rows.append(ResultRow(point_value, g_idx, k, truth, val, (val - truth) ** 2, False, dt))
    return rows


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[ResultRow]:
    """Run the sweep; rows come back in (point, graph, noise) order regardless of ``workers``."""
    tasks = [(spec, v, g) for v in spec.values for g in range(spec.graphs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_graph, tasks))
    else:
        chunks = [_run_graph(t) for t in tasks]
    rows = [r for c in chunks for r in c]
    if spec.output:
        write_results_csv(rows, spec.output, spec.sweep)
    return rows


def _sweep_label(v) -> str:
    if isinstance(v, tuple):
        return ":".join(fmt(x) for x in v)
    return fmt(v)


def results_csv(rows: Sequence[ResultRow], sweep: str = "sweep_value", timing: bool = False) -> str:
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    head = [sweep, "graph", "noise", "true_value", "private_value", "squared_error", "aborted"]
    w.writerow(head + (["seconds"] if timing else []))
    for r in rows:
        line = [_sweep_label(r.sweep_value), r.graph, r.noise, fmt(r.true_value),
                fmt(r.private_value), fmt(r.squared_error), fmt(r.aborted)]
        w.writerow(line + ([fmt(r.seconds)] if timing else []))
    return buf.getvalue()


def write_results_csv(rows, path, sweep: str = "sweep_value", timing: bool = False) -> None:
    Path(path).write_text(results_csv(rows, sweep, timing), encoding="utf-8")


def read_results_csv(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def summarize(rows: Sequence[ResultRow]) -> dict:
    """Per sweep value: count, aborted count, mean and median squared error."""
    out: dict = {}
    for r in rows:
        out.setdefault(r.sweep_value, []).append(r)
    summary = {}
    for v, rs in out.items():
        se = np.array([r.squared_error for r in rs if not r.aborted])
        summary[v] = {
            "n": len(rs),
            "aborted": sum(r.aborted for r in rs),
            "mse": float(se.mean()) if se.size else float("nan"),
            "median_se": float(np.median(se)) if se.size else float("nan"),
        }
    return summary


# -- config files -------------------------------------------------------------

_GEN_KEYS = {"p_edge", "avg_degree", "frac_a", "p_within", "p_between", "p_sum", "d_bar", "h"}


def _parse_values(sweep: str, raw: str) -> tuple:
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if sweep == "interval":
        return tuple(tuple(float(x) for x in s.split(":")) for s in items)
    if sweep == "n":
        return tuple(int(float(s)) for s in items)
    return tuple(float(s) for s in items)


def parse_experiment_config(text: str) -> ExperimentSpec:
    """Parse a ``key = value`` experiment description.

    Required keys: ``generator`` (er | sbm2 | graphon), ``n``, ``sweep``,
    ``values`` (comma separated; intervals as ``lo:hi``).  Generator
    parameters (``p_edge``, ``avg_degree``, ``frac_a``, ``p_within``,
    ``p_between``, ``p_sum``, ``d_bar``, ``h``) and the remaining
    :class:`ExperimentSpec` fields are optional.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string("[experiment]\n" + text)
    sec = cp["experiment"]
    unknown = set(sec) - _GEN_KEYS - {
        "generator", "n", "sweep", "values", "statistic", "eps_total", "label_fraction",
        "delta_label", "interval", "graphs", "noise_seeds", "seed", "output",
    }
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    params = {k: float(sec[k]) for k in _GEN_KEYS if k in sec}
    gen = GeneratorSpec(sec["generator"], int(float(sec["n"])), params)
    sweep = sec["sweep"]
    kw = {}
    for key, conv in (("statistic", str), ("eps_total", float), ("label_fraction", float),
                      ("delta_label", float), ("graphs", int), ("noise_seeds", int),
                      ("seed", int), ("output", str)):
        if key in sec:
            kw[key] = conv(sec[key])
    if "interval" in sec:
        kw["interval"] = tuple(float(x) for x in sec["interval"].split(":"))
    return ExperimentSpec(gen, sweep, _parse_values(sweep, sec["values"]), **kw)


def load_experiment_config(path) -> ExperimentSpec:
    return parse_experiment_config(Path(path).read_text(encoding="utf-8"))


# -- correlation studies ------------------------------------------------------


@dataclass
class CorrelationStudy:
    eps_values: tuple
    true_values: np.ndarray  # (cells,)
    private: dict  # eps -> (replicates, cells) array, nan where aborted
    cell_names: list = field(default_factory=list)

    def noise_sd(self, eps) -> np.ndarray:
        return np.nanstd(self.private[eps], axis=0, ddof=1)

    def noise_mean(self, eps) -> np.ndarray:
        return np.nanmean(self.private[eps], axis=0)

    def aborted(self, eps) -> int:
        return int(np.isnan(self.private[eps]).sum())

    def correlations(self, eps) -> np.ndarray:
        """Pearson correlation of (true, private) across cells, per replicate."""
        P = self.private[eps]
        out = []
        for row in P:
            ok = ~np.isnan(row)
            if ok.sum() < 3:
                out.append(np.nan)
                continue
            out.append(float(np.corrcoef(self.true_values[ok], row[ok])[0, 1]))
        return np.array(out)

    def signal_to_noise(self, eps) -> float:
        """Cross-cell variance of the true index over mean per-cell noise variance."""
        return float(np.var(self.true_values, ddof=1) / np.mean(self.noise_sd(eps) ** 2))

    def summary_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {CSV_VERSION} correlation-study\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps", "cell", "true_value", "private_mean", "private_sd", "aborted"])
        for eps in self.eps_values:
            sd, mean = self.noise_sd(eps), self.noise_mean(eps)
            ab = np.isnan(self.private[eps]).sum(axis=0)
            for c, name in enumerate(self.cell_names):
                w.writerow([fmt(eps), name, fmt(self.true_values[c]), fmt(mean[c]), fmt(sd[c]), int(ab[c])])
        return buf.getvalue()

    def correlation_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {CSV_VERSION} correlation-distribution\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps", "replicate", "correlation"])
        for eps in self.eps_values:
            for r, c in enumerate(self.correlations(eps)):
                w.writerow([fmt(eps), r, fmt(c)])
        return buf.getvalue()


def run_correlation_study(
    units: Sequence[tuple[LabeledGraph, str | None]],
    eps_values: Sequence[float],
    replicates: int,
    seed: int = 0,
    label_fraction: float = 0.5,
    mode: str = EGO_TO_ALL,
    names: Sequence[str] | None = None,
) -> CorrelationStudy:
    """Repeated private releases of cross-type connectedness for many cells.

    ``units`` pairs a graph with a cell id (``None`` = whole graph).  Units
    sharing one graph object reuse a single randomized-response draw per
    replicate, so each extra cell spends only the edge budget.
    """
    if len(units) < 2:
        raise ValueError("need at least two cells")
    truth = np.array([cross_connectedness(g, cell, mode).value for g, cell in units])
    graph_ids: dict[int, int] = {}
    for g, _ in units:
        graph_ids.setdefault(id(g), len(graph_ids))
    private = {}
    for e_idx, eps in enumerate(eps_values):
        budget = PrivacyBudget.split(eps, label_fraction)
        P = np.full((replicates, len(units)), np.nan)
        for r in range(replicates):
            labels_cache = {}
            for c, (g, cell) in enumerate(units):
                gid = graph_ids[id(g)]
                rng = make_rng(seed, 1, e_idx, r, c)
                priv = labels_cache.get(gid)
                if priv is None:
                    priv = privatize_binary(g, budget.eps_label, make_rng(seed, 2, e_idx, r, gid))
                    labels_cache[gid] = priv
                rel = release_binary(g, budget, rng, cell, mode, private_labels=priv)
                if not rel.aborted:
                    P[r, c] = rel.value
        private[eps] = P
    if names is None:
        names = [cell if cell is not None else f"graph{graph_ids[id(g)]}" for g, cell in units]
    return CorrelationStudy(tuple(eps_values), truth, private, list(names))
