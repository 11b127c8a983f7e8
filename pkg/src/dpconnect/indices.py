"""Non-private connectedness indices, average friend rank and OLS baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import EGO_TO_ALL, LabeledGraph, cell_subgraph_views


class EmptyGroupError(ValueError):
    """The averaging group (A, or A within a cell) has no members."""


class DegenerateDesignError(ValueError):
    """Regressor has zero variance."""


@dataclass(frozen=True)
class ConnectednessResult:
    value: float
    group_size: int
    per_node_shares: np.ndarray
    group: np.ndarray
    isolated_in_group: int = 0


@dataclass(frozen=True)
class FriendRankProfile:
    own_rank: np.ndarray
    afr: np.ndarray


def _require_binary(g: LabeledGraph) -> None:
    if g.is_b is None:
        raise ValueError("graph has no binary labels")


def rho_vector(g: LabeledGraph, cell: str | None = None, mode: str = EGO_TO_ALL) -> np.ndarray:
    """Weighted share of each node's connections that go to group B.

    Shares of nodes with no counted connections are 0.
    """
    _require_binary(g)
    view = cell_subgraph_views(g, cell, mode)
    to_b = view.adjacency @ g.is_b.astype(float)
    d = view.degrees
    return np.divide(to_b, d, out=np.zeros_like(to_b), where=d > 0)


def rho(g: LabeledGraph, i: int) -> float:
    _require_binary(g)
    if not 0 <= i < g.node_count:
        raise IndexError(f"node {i} out of range")
    d = g.degrees[i]
    if d == 0:
        return 0.0
    return float(g.neighbor_weights(i)[g.is_b[g.neighbors(i)]].sum() / d)


def cross_connectedness(
    g: LabeledGraph, cell: str | None = None, mode: str = EGO_TO_ALL
) -> ConnectednessResult:
    """Average share of B-connections over group A (optionally within a cell)."""
    _require_binary(g)
    view = cell_subgraph_views(g, cell, mode)
    group = view.egos[~g.is_b[view.egos]]
    if group.size == 0:
        raise EmptyGroupError("no group-A nodes" + (f" in cell {cell!r}" if cell else ""))
    shares = rho_vector(g, cell, mode)[group]
    isolated = int(np.count_nonzero(view.degrees[group] == 0))
    return ConnectednessResult(float(shares.mean()), int(group.size), shares, group, isolated)


def same_connectedness(
    g: LabeledGraph, cell: str | None = None, mode: str = EGO_TO_ALL
) -> ConnectednessResult:
    """Same-type index ``1 - C^{A->B}``.

    Computed from the complement identity, so an isolated A node (cross share
    0 by convention) contributes a same-type share of 1.
    """
    cross = cross_connectedness(g, cell, mode)
    return ConnectednessResult(
        1.0 - cross.value, cross.group_size, 1.0 - cross.per_node_shares, cross.group,
        cross.isolated_in_group,
    )


def afr(g: LabeledGraph, ranks: np.ndarray | None = None) -> FriendRankProfile:
    """Average rank of each node's neighbours (weighted); 0 for isolated nodes."""
    x = g.ranks if ranks is None else np.asarray(ranks, dtype=float)
    if x is None:
        raise ValueError("graph has no continuous labels")
    if x.shape != (g.node_count,):
        raise ValueError("rank vector length does not match node count")
    if np.any((x < 0) | (x > 1)):
        raise ValueError("ranks must lie in [0, 1]")
    return FriendRankProfile(x, neighbor_mean(g, x))


def neighbor_mean(g: LabeledGraph, values: np.ndarray, adjacency=None) -> np.ndarray:
    """Weighted neighbour average of ``values``; 0 where the degree is 0."""
    a = g.adjacency if adjacency is None else adjacency
    s = a @ values
    d = np.asarray(a.sum(axis=1)).ravel()
    return np.divide(s, d, out=np.zeros_like(s, dtype=float), where=d > 0)


def ols(x, y) -> tuple[float, float]:
    """Least-squares intercept and slope of ``y`` on ``x`` (two-pass centred sums)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 2:
        raise ValueError("need at least two points")
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx <= 0.0:
        raise DegenerateDesignError("x is constant")
    beta = float(dx @ (y - ym)) / sxx
    return float(ym - beta * xm), beta


def mafr(alpha: float, beta: float, q_lo: float, q_hi: float) -> float:
    """Mean average friend rank over the rank interval ``[q_lo, q_hi]``."""
    if not 0.0 <= q_lo < q_hi <= 1.0:
        raise ValueError(f"need 0 <= q_lo < q_hi <= 1, got [{q_lo}, {q_hi}]")
    return alpha + beta * (q_lo + q_hi) / 2.0
