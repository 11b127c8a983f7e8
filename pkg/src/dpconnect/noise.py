"""Seeded noise sources: randomized response, Laplace and truncated Laplace.

Random streams
--------------
Every stochastic step draws from a :class:`numpy.random.Generator` built by
:func:`make_rng`.  A stream is identified by an experiment ``seed`` plus a
tuple of integer keys, e.g. ``(stage, graph_index, noise_index)``; the keys are
passed to :class:`numpy.random.SeedSequence` as its ``spawn_key``.  The same
``(seed, keys)`` pair therefore reproduces the same draws on any machine
running the same numpy version, and distinct keys give independent streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Below this the binary path's debiasing factor 1/(1-2p) is meaningless.
MIN_EPS_LABEL = 1e-6


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Return the generator for stream ``(seed, *keys)``."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class PrivacyBudget:
    """Privacy parameters for the label mechanism and the edge mechanism.

    The composed release is ``(eps_label + eps_edge, delta_label)`` edge-adjacent
    DP; the edge mechanism is always pure (its delta is zero).
    """

    eps_label: float
    eps_edge: float
    delta_label: float = 0.0

    def __post_init__(self):
        if not self.eps_label > 0 or not self.eps_edge > 0:
            raise ValueError("eps_label and eps_edge must be positive")
        if not 0 <= self.delta_label < 1:
            raise ValueError("delta_label must lie in [0, 1)")

    @property
    def total_eps(self) -> float:
        return self.eps_label + self.eps_edge

    @property
    def total_delta(self) -> float:
        return self.delta_label

    @classmethod
    def split(cls, total: float, label_fraction: float = 0.5, delta_label: float = 0.0) -> "PrivacyBudget":
        """Divide ``total`` between the label and edge mechanisms."""
        if not 0 < label_fraction < 1:
            raise ValueError("label_fraction must lie in (0, 1)")
        return cls(total * label_fraction, total * (1 - label_fraction), delta_label)


# -- randomized response ---------------------------------------------------


def flip_probability(eps_label: float) -> float:
    """Flip probability ``1 / (1 + e^eps)`` of binary randomized response."""
    if not eps_label > 0:
        raise ValueError(f"eps_label must be positive, got {eps_label}")
    # 1/(1+e^x) written to avoid overflow for large x
    return float(math.exp(-eps_label) / (1.0 + math.exp(-eps_label)))


@dataclass(frozen=True)
class PrivateLabels:
    """Randomized-response output plus the flip probability used to make it."""

    is_b: np.ndarray
    p: float


def randomize_labels(
    is_b: np.ndarray, p: float, rng: np.random.Generator | None, noiseless: bool = False
) -> PrivateLabels:
    """Flip each binary label independently with probability ``p``.

    With ``noiseless=True`` the labels pass through untouched but ``p`` is still
    recorded, so downstream debiasing runs exactly as it would on an
    all-unflipped draw.  That mode is NOT private.
    """
    is_b = np.asarray(is_b, dtype=bool)
    if not 0 <= p < 0.5:
        raise ValueError(f"flip probability must lie in [0, 1/2), got {p}")
    if noiseless:
        return PrivateLabels(is_b.copy(), float(p))
    flips = rng.random(is_b.shape[0]) < p
    return PrivateLabels(is_b ^ flips, float(p))


# -- Laplace ---------------------------------------------------------------


def laplace(scale: float, rng: np.random.Generator, size=None):
    """Zero-mean Laplace draw(s) with the given scale."""
    if not scale > 0:
        raise ValueError(f"Laplace scale must be positive, got {scale}")
    return rng.laplace(0.0, scale, size=size)


def laplace_quantile(u, scale: float):
    """Inverse CDF of ``Lap(0, scale)``."""
    u = np.asarray(u, dtype=float)
    return -scale * np.sign(u - 0.5) * np.log1p(-2.0 * np.abs(u - 0.5))


# -- truncated Laplace -----------------------------------------------------


@dataclass(frozen=True)
class TruncLaplaceParams:
    """Truncated Laplace density ``normalizer * exp(-|x| / scale)`` on ``[-bound, bound]``."""

    scale: float
    bound: float
    normalizer: float
    variance: float


def trunc_laplace_variance(scale: float, bound: float) -> float:
    """Second moment of the truncated Laplace density.

    ``lam^2 * (2 - e^-t (t^2 + 2t + 2)) / (1 - e^-t)`` with ``t = bound/scale``.
    """
    if math.isinf(bound):
        return 2.0 * scale * scale
    t = bound / scale
    num = 2.0 - math.exp(-t) * (t * t + 2.0 * t + 2.0)
    return scale * scale * num / -math.expm1(-t)


def trunc_laplace_params(delta_sens: float, eps: float, delta: float) -> TruncLaplaceParams:
    """Parameters of the ``(eps, delta)``-DP truncated Laplace mechanism."""
    if not (delta_sens > 0 and eps > 0):
        raise ValueError("sensitivity and eps must be positive")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    lam = delta_sens / eps
    bound = lam * math.log1p(math.expm1(eps) / (2.0 * delta))
    normalizer = 1.0 / (2.0 * lam * -math.expm1(-bound / lam))
    return TruncLaplaceParams(lam, bound, normalizer, trunc_laplace_variance(lam, bound))


def trunc_laplace_quantile(u, params: TruncLaplaceParams):
    """Inverse CDF of the truncated Laplace law; monotone in ``u``."""
    u = np.asarray(u, dtype=float)
    v = 2.0 * u - 1.0
    mass = -math.expm1(-params.bound / params.scale)
    mag = -params.scale * np.log1p(-mass * np.abs(v))
    return np.clip(np.sign(v) * mag, -params.bound, params.bound)


def trunc_laplace_cdf(x, params: TruncLaplaceParams):
    x = np.clip(np.asarray(x, dtype=float), -params.bound, params.bound)
    mass = -math.expm1(-params.bound / params.scale)
    half = -np.expm1(-np.abs(x) / params.scale) / (2.0 * mass)
    return 0.5 + np.sign(x) * half


def trunc_laplace(params: TruncLaplaceParams, rng: np.random.Generator, size=None):
    """Draw(s) supported exactly on ``[-bound, bound]`` (one uniform per draw)."""
    return trunc_laplace_quantile(rng.random(size), params)
