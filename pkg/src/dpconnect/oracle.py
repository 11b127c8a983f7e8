"""Brute-force reference computations.

Everything here works on dense matrices or plain Python loops and imports
nothing from the estimator modules, so agreement with them is evidence rather
than tautology.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import LabeledGraph

MAX_ENUM_NODES = 14
MAX_TOGGLE_NODES = 30


def _dense(g: LabeledGraph) -> np.ndarray:
    W = np.zeros((g.node_count, g.node_count))
    for i, j, w in g.edges():
        W[int(i), int(j)] = w
        W[int(j), int(i)] = w
    return W


def _s1_dense(W: np.ndarray, is_b_hat: np.ndarray, p: float) -> float:
    d = W.sum(axis=1)
    share = np.divide(W @ is_b_hat, d, out=np.zeros_like(d), where=d > 0)
    weight = ((1.0 - is_b_hat) - p) / (1 - 2 * p)
    return math.fsum(weight * (share - p) / (1 - 2 * p))


@dataclass(frozen=True)
class Expectations:
    rho_tilde: np.ndarray
    s0: float
    s1: float
    total_probability: float


def enumerate_expectations(g: LabeledGraph, p: float) -> Expectations:
    """Exact expectations of the debiased quantities over all ``2^n`` flip patterns."""
    n = g.node_count
    if n > MAX_ENUM_NODES:
        raise ValueError(f"enumeration limited to {MAX_ENUM_NODES} nodes")
    if g.is_b is None:
        raise ValueError("graph has no binary labels")
    W = _dense(g)
    deg = W.sum(axis=1)
    truth = np.asarray(g.is_b, dtype=float)
    patterns = np.array(list(itertools.product((0.0, 1.0), repeat=n))).reshape(-1, n)
    k = patterns.sum(axis=1)
    prob = p ** k * (1 - p) ** (n - k)
    hat_b = np.abs(truth[None, :] - patterns)  # XOR with flip pattern
    share = np.where(deg > 0, hat_b @ W.T / np.where(deg > 0, deg, 1.0), 0.0)
    rho_t = (share - p) / (1 - 2 * p)
    weight = ((1.0 - hat_b) - p) / (1 - 2 * p)
    e_rho = np.array([math.fsum(prob * rho_t[:, i]) for i in range(n)])
    e_s0 = math.fsum((prob[:, None] * weight).ravel())
    e_s1 = math.fsum((prob[:, None] * weight * rho_t).ravel())
    return Expectations(e_rho, e_s0, e_s1, math.fsum(prob))


def s1_from_scratch(g: LabeledGraph, is_b_hat, p: float) -> float:
    return _s1_dense(_dense(g), np.asarray(is_b_hat, dtype=float), p)


def max_edge_sensitivity(
    g: LabeledGraph, is_b_hat, p: float, add_weight: float = 1.0
) -> tuple[float, tuple[int, int] | None]:
    """Largest ``|S1(E) - S1(E')|`` over all single-edge additions and removals.

    Absent pairs are added with weight ``add_weight``; present edges are
    removed.  Labels are held fixed.  Returns the maximum and the pair attaining it.
    """
    n = g.node_count
    if n > MAX_TOGGLE_NODES:
        raise ValueError(f"toggle search limited to {MAX_TOGGLE_NODES} nodes")
    hat = np.asarray(is_b_hat, dtype=float)
    W = _dense(g)
    base = _s1_dense(W, hat, p)
    best, arg = 0.0, None
    for u in range(n):
        for v in range(u + 1, n):
            old = W[u, v]
            new = 0.0 if old > 0 else add_weight
            W[u, v] = W[v, u] = new
            diff = abs(_s1_dense(W, hat, p) - base)
            W[u, v] = W[v, u] = old
            if diff > best:
                best, arg = diff, (u, v)
    return best, arg


def naive_cross_connectedness(g: LabeledGraph, exact: bool = False):
    """Group-A average of B-shares by a double loop over node pairs.

    With ``exact=True`` the arithmetic is done in :class:`fractions.Fraction`
    (weights are converted exactly from their float values).
    """
    n = g.node_count
    W = _dense(g)
    num = Fraction if exact else float
    shares = []
    for i in range(n):
        if g.is_b[i]:
            continue
        d = num(0)
        to_b = num(0)
        for j in range(n):
            if W[i, j] > 0:
                d += num(W[i, j])
                if g.is_b[j]:
                    to_b += num(W[i, j])
        shares.append(to_b / d if d > 0 else num(0))
    if not shares:
        raise ValueError("empty group A")
    if exact:
        return sum(shares, Fraction(0)) / len(shares)
    return math.fsum(shares) / len(shares)


def naive_afr(g: LabeledGraph, ranks=None) -> np.ndarray:
    x = g.ranks if ranks is None else ranks
    W = _dense(g)
    out = np.zeros(g.node_count)
    for i in range(g.node_count):
        d = math.fsum(W[i])
        if d > 0:
            out[i] = math.fsum(W[i, j] * x[j] for j in range(g.node_count) if W[i, j] > 0) / d
    return out


def naive_ols(x, y) -> tuple[float, float]:
    """Intercept and slope from the 2x2 normal equations."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    X = np.column_stack([np.ones_like(x), x])
    coef = np.linalg.solve(X.T @ X, X.T @ y)
    return float(coef[0]), float(coef[1])


def naive_recompute(g: LabeledGraph) -> dict:
    """Every non-private statistic the graph's labels support, by the slow path."""
    out = {}
    if g.is_b is not None:
        out["cross_connectedness"] = naive_cross_connectedness(g)
    if g.ranks is not None:
        y = naive_afr(g)
        out["afr"] = y
        if np.ptp(g.ranks) > 0:
            out["ols"] = naive_ols(g.ranks, y)
    return out


# -- regression sensitivity search -------------------------------------------


def _nvar(x):
    return math.fsum(v * v for v in x) - math.fsum(x) ** 2 / len(x)


def _ncov(x, y):
    return math.fsum(a * b for a, b in zip(x, y)) - math.fsum(x) * math.fsum(y) / len(x)


def max_nvar_change(x, lo: float, hi: float) -> float:
    """Max ``|nvar(x) - nvar(x')|`` over ``x'`` differing from ``x`` in one index.

    ``nvar`` is convex in each coordinate, so the extremes sit at the bounds
    or at the leave-one-out mean.
    """
    x = list(map(float, x))
    best = 0.0
    base = _nvar(x)
    for k in range(len(x)):
        rest = x[:k] + x[k + 1:]
        for cand in (lo, hi, min(hi, max(lo, math.fsum(rest) / len(rest)))):
            x2 = x.copy()
            x2[k] = cand
            best = max(best, abs(_nvar(x2) - base))
    return best


def max_ncov_change(x, y, x_bounds, y_bounds) -> float:
    """Max ``|ncov(x, y) - ncov(x', y')|`` when the pairs differ in at most two indices.

    ``ncov`` is affine in every single coordinate, so it suffices to try the
    corners of the box for the four changed coordinates.
    """
    x = list(map(float, x))
    y = list(map(float, y))
    base = _ncov(x, y)
    best = 0.0
    for k, l in itertools.combinations(range(len(x)), 2):
        for xk, xl, yk, yl in itertools.product(x_bounds, x_bounds, y_bounds, y_bounds):
            x2, y2 = x.copy(), y.copy()
            x2[k], x2[l], y2[k], y2[l] = xk, xl, yk, yl
            best = max(best, abs(_ncov(x2, y2) - base))
    return best
