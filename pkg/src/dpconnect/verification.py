"""Verification suite: estimator modules checked against the brute-force oracles.

Each check returns a :class:`CheckResult`; :func:`run_checks` runs them all
with a fixed seed and is what ``dpconnect oracle-check`` reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import integrate

from . import oracle
from .binary import debias_node_stats, release_binary, s1_sensitivity
from .continuous import suff_stats_sensitivities
from .graph import LabeledGraph, build_graph
from .indices import afr, cross_connectedness
from .noise import PrivacyBudget, PrivateLabels, make_rng, trunc_laplace_params

FLIP_PROBS = (0.05, 0.1, 0.25, 0.4)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def four_node_graph() -> LabeledGraph:
    """Four-node example: A1, A2, B1, B2 are nodes 0..3."""
    return build_graph(4, [(0, 2), (0, 3), (0, 1), (1, 3)], is_b=["a", "a", "b", "b"])


def double_star_graph(hub_weight: float = 1000.0, leaves: int = 5) -> LabeledGraph:
    """Two A-labelled hubs joined by a heavy edge, each with ``leaves`` B leaves."""
    edges = [(0, 1, hub_weight)]
    edges += [(0, 2 + k) for k in range(leaves)]
    edges += [(1, 2 + leaves + k) for k in range(leaves)]
    n = 2 + 2 * leaves
    return build_graph(n, edges, is_b=["a", "a"] + ["b"] * (2 * leaves))


def random_small_graph(
    rng: np.random.Generator,
    n: int,
    p_edge: float = 0.3,
    min_degree: int = 1,
    weighted: bool = False,
    ranks: bool = False,
) -> LabeledGraph:
    """Dense random graph with random binary labels (and optionally ranks).

    Nodes left below ``min_degree`` are attached to a random other node, so
    every node has at least one neighbour when ``min_degree >= 1``.
    """
    A = np.triu(rng.random((n, n)) < p_edge, 1)
    A = A | A.T
    if min_degree > 0:
        for i in range(n):
            if A[i].sum() < min_degree:
                j = int(rng.choice([k for k in range(n) if k != i]))
                A[i, j] = A[j, i] = True
    iu, ju = np.nonzero(np.triu(A, 1))
    w = rng.uniform(0.5, 3.0, iu.size) if weighted else np.ones(iu.size)
    is_b = rng.random(n) < 0.5
    if is_b.all() or not is_b.any():
        is_b[0] = not is_b[0]
    edges = list(zip(iu.tolist(), ju.tolist(), w.tolist()))
    return build_graph(n, edges, is_b=is_b, ranks=rng.random(n) if ranks else None)


def check_four_node() -> CheckResult:
    g = four_node_graph()
    rel = release_binary(g, PrivacyBudget(math.log(3), 1.0), make_rng(0), noiseless=True)
    exact = oracle.naive_cross_connectedness(g, exact=True)
    ok = (
        math.isclose(rel.value, 1.25, abs_tol=1e-12)
        and math.isclose(rel.s0, 2.0, abs_tol=1e-12)
        and math.isclose(rel.s1, 2.5, abs_tol=1e-12)
        and math.isclose(rel.noise_scale, 3.0, abs_tol=1e-12)
        and exact == Fraction(7, 12)
    )
    return CheckResult(
        "four_node_worked_example", ok,
        f"value={rel.value!r} s0={rel.s0!r} s1={rel.s1!r} scale={rel.noise_scale!r} C={exact}",
    )


def check_unbiasedness(rng: np.random.Generator, graphs: int = 20, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for _ in range(graphs):
        g = random_small_graph(rng, int(rng.integers(3, 13)), weighted=bool(rng.integers(2)))
        # the neighbour mean of the B indicator is each node's B-share
        rho_true = oracle.naive_afr(g, g.is_b.astype(float))
        group_a = ~g.is_b
        for p in FLIP_PROBS:
            ex = oracle.enumerate_expectations(g, p)
            worst = max(
                worst,
                float(np.max(np.abs(ex.rho_tilde - rho_true))),
                abs(ex.s0 - group_a.sum()),
                abs(ex.s1 - math.fsum(rho_true[group_a])),
                abs(ex.total_probability - 1.0),
            )
    return CheckResult("enumeration_unbiased", worst <= tol, f"max deviation {worst:.3g} (tol {tol:g})")


def check_s1_matches_oracle(rng: np.random.Generator, graphs: int = 50, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for _ in range(graphs):
        g = random_small_graph(rng, int(rng.integers(2, 16)), min_degree=0, weighted=True)
        p = float(rng.choice(FLIP_PROBS))
        hat = rng.random(g.node_count) < 0.5
        stats = debias_node_stats(g, PrivateLabels(hat, p))
        s1 = float(np.sum(stats.w * stats.rho_tilde))
        worst = max(worst, abs(s1 - oracle.s1_from_scratch(g, hat, p)))
    return CheckResult("s1_matches_oracle", worst <= tol, f"max deviation {worst:.3g}")


def check_edge_sensitivity(rng: np.random.Generator, graphs: int = 60) -> CheckResult:
    worst_ratio = 0.0
    for _ in range(graphs):
        g = random_small_graph(rng, int(rng.integers(2, 13)), p_edge=float(rng.uniform(0.1, 0.6)), min_degree=0)
        p = float(rng.choice(FLIP_PROBS))
        hat = rng.random(g.node_count) < 0.5
        found, _ = oracle.max_edge_sensitivity(g, hat, p)
        worst_ratio = max(worst_ratio, found / s1_sensitivity(p))
    return CheckResult("edge_sensitivity_bound", worst_ratio <= 1.0 + 1e-12,
                       f"max observed / bound = {worst_ratio:.4f}")


def check_double_star() -> CheckResult:
    g = double_star_graph()
    p = 0.4
    found, pair = oracle.max_edge_sensitivity(g, g.is_b, p)
    bound = s1_sensitivity(p)
    ok = bound * 0.99 <= found <= bound
    return CheckResult("edge_sensitivity_tight", ok, f"{found:.4f} at {pair} vs bound {bound:.4f}")


def check_dual_indices(rng: np.random.Generator, graphs: int = 100, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for _ in range(graphs):
        g = random_small_graph(rng, int(rng.integers(2, 15)), min_degree=0, weighted=True, ranks=True)
        worst = max(worst, abs(cross_connectedness(g).value - oracle.naive_cross_connectedness(g)))
        worst = max(worst, float(np.max(np.abs(afr(g).afr - oracle.naive_afr(g)))))
    return CheckResult("dual_indices", worst <= tol, f"max deviation {worst:.3g}")


def check_trunc_laplace_quadrature(tol: float = 1e-8) -> CheckResult:
    worst = 0.0
    for eps, delta in ((0.5, 1e-3), (2.0, 1e-5), (4.0, 1e-3), (8.0, 1e-6)):
        prm = trunc_laplace_params(1.0, eps, delta)
        mass, _ = integrate.quad(lambda x: prm.normalizer * math.exp(-abs(x) / prm.scale),
                                 -prm.bound, prm.bound, points=[0.0], epsabs=1e-13, epsrel=1e-13)
        var, _ = integrate.quad(lambda x: x * x * prm.normalizer * math.exp(-abs(x) / prm.scale),
                                -prm.bound, prm.bound, points=[0.0], epsabs=1e-13, epsrel=1e-13)
        worst = max(worst, abs(mass - 1.0), abs(var - prm.variance))
    return CheckResult("trunc_laplace_quadrature", worst <= tol, f"max deviation {worst:.3g}")


def check_suff_stats_sensitivity(rng: np.random.Generator, datasets: int = 200) -> CheckResult:
    n = 6
    worst1 = worst2 = 0.0
    for _ in range(datasets):
        x, y = rng.random(n), rng.random(n)
        d1, d2 = suff_stats_sensitivities(n, (0.0, 1.0), (0.0, 1.0))
        worst1 = max(worst1, oracle.max_nvar_change(x, 0.0, 1.0) / d1)
        worst2 = max(worst2, oracle.max_ncov_change(x, y, (0.0, 1.0), (0.0, 1.0)) / d2)
    ok = worst1 <= 1 + 1e-12 and worst2 <= 1 + 1e-12
    return CheckResult("suff_stats_sensitivity", ok,
                       f"nvar max/bound {worst1:.4f}, ncov max/bound {worst2:.4f}")


def all_checks(seed: int = 0) -> list[Callable[[], CheckResult]]:
    return [
        check_four_node,
        lambda: check_unbiasedness(make_rng(seed, 3, 0)),
        lambda: check_s1_matches_oracle(make_rng(seed, 3, 1)),
        lambda: check_edge_sensitivity(make_rng(seed, 3, 2)),
        check_double_star,
        lambda: check_dual_indices(make_rng(seed, 3, 3)),
        check_trunc_laplace_quadrature,
        lambda: check_suff_stats_sensitivity(make_rng(seed, 3, 4)),
    ]


def run_checks(seed: int = 0) -> list[CheckResult]:
    """Run every check; an exception inside a check is reported as a failure."""
    out = []
    for chk in all_checks(seed):
        try:
            out.append(chk())
        except Exception as exc:  # noqa: BLE001 - surfaced in the report
            name = getattr(chk, "__name__", "check")
            out.append(CheckResult(name, False, f"raised {type(exc).__name__}: {exc}"))
    return out
