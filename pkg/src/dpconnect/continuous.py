"""Private friend-rank regression for continuous labels.

Ranks are perturbed with truncated Laplace noise (so every perturbed rank and
every private average friend rank stays inside ``[-A, 1 + A]``), the private
regression line is released with noisy sufficient statistics, and the slope
is corrected for the known attenuation caused by the rank noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import EGO_TO_ALL, LabeledGraph, cell_subgraph_views
from .indices import mafr, neighbor_mean
from .noise import PrivacyBudget, TruncLaplaceParams, laplace, trunc_laplace, trunc_laplace_params

RANK_SENSITIVITY = 1.0
MATCHED = "matched"
LITERAL = "literal"
PAIRINGS = (MATCHED, LITERAL)
ATTENUATION_FLOOR = 1e-9


class DegenerateAttenuationError(ValueError):
    """Sample variance of the noisy regressor does not exceed the noise variance."""


@dataclass(frozen=True)
class PrivateRanks:
    x_hat: np.ndarray
    params: TruncLaplaceParams

    @property
    def bounds(self) -> tuple[float, float]:
        return (-self.params.bound, 1.0 + self.params.bound)


@dataclass(frozen=True)
class DpRegression:
    alpha_star: float
    beta_star: float
    alpha_tilde: float
    beta_tilde: float
    sigma2: float
    bounds: tuple[tuple[float, float], tuple[float, float]]
    aborted: bool = False
    mafr: float = float("nan")
    interval: tuple[float, float] = (0.0, 1.0)
    cell: str | None = None
    budget: PrivacyBudget | None = None


def privatize_ranks(
    ranks,
    eps_label: float,
    delta_label: float,
    rng: np.random.Generator | None,
    noiseless: bool = False,
) -> PrivateRanks:
    """Add independent truncated Laplace noise (sensitivity 1) to every rank."""
    x = np.asarray(ranks, dtype=float)
    if np.any(~np.isfinite(x)) or np.any((x < 0) | (x > 1)):
        raise ValueError("ranks must lie in [0, 1]")
    params = trunc_laplace_params(RANK_SENSITIVITY, eps_label, delta_label)
    if noiseless:
        return PrivateRanks(x + 0.0, params)
    return PrivateRanks(x + trunc_laplace(params, rng, size=x.shape[0]), params)


def suff_stats_sensitivities(n: int, x_bounds, y_bounds) -> tuple[float, float]:
    """Global sensitivities of ``nvar(x)`` and ``ncov(x, y)`` on bounded data."""
    wx = x_bounds[1] - x_bounds[0]
    wy = y_bounds[1] - y_bounds[0]
    shrink = 1.0 - 1.0 / n
    return shrink * wx * wx, 2.0 * shrink * wx * wy


def nvar(x) -> float:
    x = np.asarray(x, dtype=float)
    dx = x - x.mean()
    return float(dx @ dx)


def ncov(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float((x - x.mean()) @ (y - y.mean()))


def dp_suff_stats(
    x,
    y,
    eps: float,
    rng: np.random.Generator | None,
    x_bounds: tuple[float, float] = (0.0, 1.0),
    y_bounds: tuple[float, float] = (0.0, 1.0),
    *,
    noiseless: bool = False,
    pairing: str = MATCHED,
) -> tuple[float, float] | None:
    """Pure-DP simple linear regression by noisy sufficient statistics.

    Returns ``(alpha, beta)``, or ``None`` when the noisy variance is not
    positive.  ``pairing="matched"`` calibrates the noise on ``ncov`` to the
    covariance sensitivity and the noise on ``nvar`` to the variance
    sensitivity; ``"literal"`` swaps them.  Each of the three Laplace draws
    uses a third of ``eps``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    if y.shape != (n,):
        raise ValueError("x and y must have equal length")
    if n < 2:
        raise ValueError("need n >= 2")
    if pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}")
    if not eps > 0:
        raise ValueError("eps must be positive")
    for name, v, (lo, hi) in (("x", x, x_bounds), ("y", y, y_bounds)):
        if not lo < hi:
            raise ValueError(f"{name} bounds must satisfy lo < hi")
        if np.any(v < lo) or np.any(v > hi):
            raise ValueError(f"{name} values fall outside the declared bounds [{lo}, {hi}]")

    xm, ym = x.mean(), y.mean()
    dx = x - xm
    var_n = float(dx @ dx)
    cov_n = float(dx @ (y - ym))
    d1, d2 = suff_stats_sensitivities(n, x_bounds, y_bounds)
    if noiseless:
        l1 = l2 = 0.0
    else:
        l1 = float(laplace(3.0 * d1 / eps, rng))
        l2 = float(laplace(3.0 * d2 / eps, rng))
    cov_noise, var_noise = (l2, l1) if pairing == MATCHED else (l1, l2)
    denom = var_n + var_noise
    if not denom > 0:
        return None
    beta = (cov_n + cov_noise) / denom
    d3 = (y_bounds[1] - y_bounds[0]) / n + abs(beta) * (x_bounds[1] - x_bounds[0]) / n
    l3 = 0.0 if noiseless else float(laplace(3.0 * d3 / eps, rng))
    alpha = float(ym - beta * xm) + l3
    return alpha, float(beta)


def eiv_debias(alpha_star: float, beta_star: float, x_hat, sigma2: float) -> tuple[float, float]:
    """Undo slope attenuation from regressor noise of known variance ``sigma2``.

    The slope is scaled by ``s2 / (s2 - sigma2)`` where ``s2`` is the
    ``1/(n-1)`` sample variance of ``x_hat``.  The intercept is shifted to
    ``alpha_star + (beta_star - beta_tilde) * mean(x_hat)``, which equals
    ``mean(y) - beta_tilde * mean(x_hat)`` plus whatever noise ``alpha_star``
    already carried, and touches no edge-dependent data.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    s2 = float(np.var(x_hat, ddof=1))
    if not s2 - sigma2 >= ATTENUATION_FLOOR * s2 or s2 <= 0:
        raise DegenerateAttenuationError(
            f"sample variance {s2:.6g} does not exceed noise variance {sigma2:.6g}"
        )
    beta_tilde = beta_star * (s2 / (s2 - sigma2))
    alpha_tilde = alpha_star + (beta_star - beta_tilde) * float(x_hat.mean())
    return float(alpha_tilde), float(beta_tilde)


def release_mafr(
    g: LabeledGraph,
    budget: PrivacyBudget,
    interval: tuple[float, float],
    rng: np.random.Generator | None,
    cell: str | None = None,
    mode: str = EGO_TO_ALL,
    *,
    private_ranks: PrivateRanks | None = None,
    noiseless: bool = False,
    pairing: str = MATCHED,
) -> DpRegression:
    """Release a private regression of average friend rank on own rank and its MAFR.

    Regression rows are the cell's members (all nodes if ``cell`` is None);
    isolated rows enter with private AFR 0.  With ``noiseless=True`` no random
    draws are made and the correction uses ``sigma2 = 0``, reproducing the
    non-private pipeline exactly.  A ``None`` from the sufficient-statistics
    step yields ``aborted=True``.

    Raises:
        DegenerateAttenuationError: if the noisy rank variance is swamped by
            the injected noise variance.
    """
    if g.ranks is None:
        raise ValueError("graph has no continuous labels")
    if not 0 < budget.delta_label < 1:
        raise ValueError("continuous release needs delta_label in (0, 1)")
    q_lo, q_hi = interval
    if not 0.0 <= q_lo < q_hi <= 1.0:
        raise ValueError(f"invalid rank interval {interval}")
    if private_ranks is None:
        private_ranks = privatize_ranks(
            g.ranks, budget.eps_label, budget.delta_label, rng, noiseless=noiseless
        )
    params = private_ranks.params
    view = cell_subgraph_views(g, cell, mode)
    y_hat = neighbor_mean(g, private_ranks.x_hat, view.adjacency)[view.egos]
    x_hat = private_ranks.x_hat[view.egos]
    bounds = private_ranks.bounds
    sigma2 = 0.0 if noiseless else params.variance
    res = dp_suff_stats(
        x_hat, y_hat, budget.eps_edge, rng, bounds, bounds, noiseless=noiseless, pairing=pairing
    )
    if res is None:
        nan = float("nan")
        return DpRegression(nan, nan, nan, nan, sigma2, (bounds, bounds), True,
                            interval=(q_lo, q_hi), cell=cell, budget=budget)
    alpha_star, beta_star = res
    alpha_tilde, beta_tilde = eiv_debias(alpha_star, beta_star, x_hat, sigma2)
    return DpRegression(
        alpha_star, beta_star, alpha_tilde, beta_tilde, sigma2, (bounds, bounds), False,
        mafr(alpha_tilde, beta_tilde, q_lo, q_hi), (q_lo, q_hi), cell, budget,
    )
