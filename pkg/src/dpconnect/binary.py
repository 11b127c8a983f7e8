"""Private cross-type connectedness for binary labels.

Pipeline: randomized response on labels, per-node debiasing, a Hajek ratio of
debiased sums, then Laplace noise calibrated to the edge-sensitivity of the
numerator.  Once labels are privatized they can be reused for any number of
cells; each cell release then spends only ``eps_edge``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import EGO_TO_ALL, LabeledGraph, cell_subgraph_views
from .noise import (
    MIN_EPS_LABEL,
    PrivacyBudget,
    PrivateLabels,
    flip_probability,
    laplace,
    randomize_labels,
)


class ReleaseAborted(RuntimeError):
    """The debiased group size S0 was not positive; nothing can be released."""


@dataclass(frozen=True)
class DebiasedNodeStats:
    nodes: np.ndarray
    w: np.ndarray
    rho_hat: np.ndarray
    rho_tilde: np.ndarray
    p: float


@dataclass(frozen=True)
class BinaryDpRelease:
    value: float
    s0: float
    s1: float
    noise_scale: float
    budget: PrivacyBudget
    p: float
    cell: str | None = None
    mode: str = EGO_TO_ALL
    aborted: bool = False
    clamped: bool = False
    max_degree: float = 0.0
    fraction_a_hat: float = float("nan")

    @property
    def hajek(self) -> float:
        return self.s1 / self.s0 if self.s0 > 0 else float("nan")


def debias_weights(is_b_hat: np.ndarray, p: float) -> np.ndarray:
    """Debiased A-membership weights ``(1{l_hat = a} - p) / (1 - 2p)``."""
    return ((~np.asarray(is_b_hat, bool)).astype(float) - p) / (1.0 - 2.0 * p)


def debias_node_stats(
    g: LabeledGraph,
    priv: PrivateLabels,
    cell: str | None = None,
    mode: str = EGO_TO_ALL,
) -> DebiasedNodeStats:
    """Per-node debiased weights and connectedness from privatized labels only.

    ``rho_hat`` is 0 for nodes with no counted connections, so their
    ``rho_tilde`` is ``-p / (1 - 2p)``.
    """
    p = priv.p
    if not 0 <= p < 0.5:
        raise ValueError(f"flip probability must lie in [0, 1/2), got {p}")
    if priv.is_b.shape != (g.node_count,):
        raise ValueError("privatized labels must cover every node")
    view = cell_subgraph_views(g, cell, mode)
    to_b = view.adjacency @ priv.is_b.astype(float)
    d = view.degrees
    rho_hat = np.divide(to_b, d, out=np.zeros_like(to_b), where=d > 0)[view.egos]
    rho_tilde = (rho_hat - p) / (1.0 - 2.0 * p)
    w = debias_weights(priv.is_b[view.egos], p)
    return DebiasedNodeStats(view.egos, w, rho_hat, rho_tilde, p)


def hajek(stats: DebiasedNodeStats) -> tuple[float, float, float]:
    """Return ``(S1, S0, S1/S0)``.

    Raises:
        ReleaseAborted: if ``S0 <= 0``.
    """
    s0 = float(np.sum(stats.w))
    s1 = float(stats.w @ stats.rho_tilde)
    if not s0 > 0:
        raise ReleaseAborted(f"S0 = {s0:.6g} is not positive")
    return s1, s0, s1 / s0


def s1_sensitivity(p: float) -> float:
    """Edge-sensitivity bound ``2(1-p)/(1-2p)^2`` of the debiased numerator S1."""
    return 2.0 * (1.0 - p) / (1.0 - 2.0 * p) ** 2


def noise_scale(p: float, eps_edge: float, s0: float) -> float:
    return s1_sensitivity(p) / (eps_edge * s0)


def privatize_binary(
    g: LabeledGraph, eps_label: float, rng: np.random.Generator | None, noiseless: bool = False
) -> PrivateLabels:
    """Run randomized response on the graph's labels at budget ``eps_label``."""
    if g.is_b is None:
        raise ValueError("graph has no binary labels")
    if eps_label < MIN_EPS_LABEL:
        raise ValueError(f"eps_label below {MIN_EPS_LABEL} makes debiasing meaningless")
    return randomize_labels(g.is_b, flip_probability(eps_label), rng, noiseless=noiseless)


def release_binary(
    g: LabeledGraph,
    budget: PrivacyBudget,
    rng: np.random.Generator | None,
    cell: str | None = None,
    mode: str = EGO_TO_ALL,
    *,
    private_labels: PrivateLabels | None = None,
    noiseless: bool = False,
    clamp: bool = False,
) -> BinaryDpRelease:
    """Release a private cross-type connectedness index.

    Args:
        g: graph with binary labels.
        budget: ``delta_label`` must be 0 on this path.
        rng: stream for label flips and the Laplace draw (unused if
            ``noiseless``).
        cell, mode: optional cell restriction, see
            :func:`~dpconnect.graph.cell_subgraph_views`.
        private_labels: reuse an earlier randomized-response draw (must have
            been made with ``budget.eps_label``); only ``eps_edge`` is spent.
        noiseless: skip every random draw while keeping ``p`` in the
            debiasing formulas.  NOT private; for verification only.
        clamp: post-process the released value into ``[0, 1]``.

    A non-positive S0 yields ``aborted=True`` and ``value=nan``; the budget
    is considered spent and no retry is made.
    """
    if budget.delta_label != 0:
        raise ValueError("binary release is pure DP; delta_label must be 0")
    if private_labels is None:
        private_labels = privatize_binary(g, budget.eps_label, rng, noiseless=noiseless)
    else:
        expected = flip_probability(budget.eps_label)
        if not np.isclose(private_labels.p, expected, rtol=1e-12, atol=0):
            raise ValueError("private_labels were made with a different eps_label")
    p = private_labels.p
    stats = debias_node_stats(g, private_labels, cell, mode)
    if stats.nodes.size == 0:
        raise ValueError(f"cell {cell!r} is empty")
    view_deg = cell_subgraph_views(g, cell, mode).degrees[stats.nodes]
    max_deg = float(view_deg.max()) if view_deg.size else 0.0
    frac_a = float(np.mean(~private_labels.is_b[stats.nodes]))
    try:
        s1, s0, ratio = hajek(stats)
    except ReleaseAborted:
        s0 = float(np.sum(stats.w))
        s1 = float(stats.w @ stats.rho_tilde)
        return BinaryDpRelease(
            float("nan"), s0, s1, float("nan"), budget, p, cell, mode,
            aborted=True, max_degree=max_deg, fraction_a_hat=frac_a,
        )
    scale = noise_scale(p, budget.eps_edge, s0)
    z = 0.0 if noiseless else float(laplace(scale, rng))
    value = ratio + z
    if clamp:
        value = min(1.0, max(0.0, value))
    return BinaryDpRelease(
        value, s0, s1, scale, budget, p, cell, mode,
        clamped=clamp, max_degree=max_deg, fraction_a_hat=frac_a,
    )
