"""Random-coverage utilities with randomized rounding of fractional effort.

A fractional contribution ``theta_j`` is read as ``floor(theta_j)`` samples
plus one extra sample with probability ``theta_j - floor(theta_j)``. Roundings
are independent across agents, so the expected miss probability of a point is
a product of per-agent factors ``g(q, theta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linear import ModelError

UNDERFLOW = 1e-300
MAX_SAMPLES = 2 ** 60


class UnattainableError(ModelError):
    """Raised when no finite contribution meets an agent's requirement."""


@dataclass(frozen=True)
class CoverageModel:
    """Per-agent distributions over a finite instance space.

    Attributes:
        Q: k x n matrix; row i is agent i's distribution over the n points.
    """

    Q: np.ndarray

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        if Q.ndim != 2:
            raise ModelError("Q must be a matrix")
        if np.any(Q < 0) or np.any(Q > 1):
            raise ModelError("Q entries must lie in [0, 1]")
        sums = Q.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-9):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise ModelError(f"row {bad} of Q sums to {sums[bad]!r}, expected 1")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    @property
    def k(self) -> int:
        return self.Q.shape[0]

    @property
    def n(self) -> int:
        return self.Q.shape[1]


def rounding_factor(q, theta):
    """Expected ``(1 - q)^m`` for ``m ~ floor(theta) + Bernoulli(frac(theta))``.

    Broadcasts over numpy arrays. Continuous and non-increasing in ``theta``.
    """
    q = np.asarray(q, dtype=float)
    theta = np.asarray(theta, dtype=float)
    whole = np.floor(theta)
    frac = theta - whole
    return (1.0 - q) ** whole * (1.0 - frac * q)


def _miss_products(Q: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    # thetas: (N, k) -> (N, n) expected probability that each point is unseen
    g = rounding_factor(Q[None, :, :], thetas[:, :, None])
    if np.any((g > 0) & (g < UNDERFLOW)):
        with np.errstate(divide="ignore"):
            return np.exp(np.log(g).sum(axis=1))
    return g.prod(axis=1)


def eval_coverage(model: CoverageModel, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (model.k,):
        raise ModelError(f"theta has shape {theta.shape}, expected ({model.k},)")
    return eval_coverage_batch(model, theta[None, :])[0]


def eval_coverage_batch(model: CoverageModel, thetas, chunk: int = 4096) -> np.ndarray:
    """Evaluate utilities for a stack of allocations of shape (N, k)."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if thetas.shape[1] != model.k:
        raise ModelError(f"allocations have {thetas.shape[1]} columns, expected {model.k}")
    if np.any(thetas < 0):
        raise ModelError("coverage utilities need nonnegative contributions")
    Q = model.Q
    out = np.empty_like(thetas)
    for start in range(0, thetas.shape[0], chunk):
        block = thetas[start:start + chunk]
        miss = _miss_products(Q, block)
        out[start:start + chunk] = 1.0 - 0.5 * miss @ Q.T
    return out


def _solo_bound(q_row: np.ndarray, mu_i: float) -> int:
    support = q_row[q_row > 0]
    q_min = float(support.min())
    if q_min >= 1.0:
        return 1
    target = 2.0 * (1.0 - mu_i)
    if target >= 1.0:
        return 0
    bound = math.log(target) / math.log1p(-q_min)
    return int(math.ceil(bound)) + 1 if bound < MAX_SAMPLES else MAX_SAMPLES


def min_contribution(model: CoverageModel, mu_i: float, agent: int, coord: int, theta) -> float:
    """Smallest value of ``theta[coord]`` giving ``agent`` utility ``mu_i``.

    All other coordinates stay as in ``theta``. The utility is affine in
    ``theta[coord]`` on every interval ``[t, t + 1]``; the integer crossing is
    located by bisection and the fractional part is solved exactly.

    Raises:
        UnattainableError: if no finite value of ``theta[coord]`` suffices.
    """
    Q = model.Q
    theta = np.array(theta, dtype=float)
    theta[coord] = 0.0
    q_i, q_c = Q[agent], Q[coord]
    factors = rounding_factor(Q, theta[:, None])
    factors[coord] = 1.0
    weight = q_i * factors.prod(axis=0)
    base = 1.0 - q_c

    def u_at(t: int) -> float:
        return 1.0 - 0.5 * float(np.dot(weight, base ** t))

    if u_at(0) >= mu_i:
        return 0.0
    reachable = weight[q_c > 0]
    limit = 1.0 - 0.5 * float(weight[q_c == 0].sum())
    if mu_i > limit or (mu_i == limit and np.any(base[q_c > 0][reachable > 0] > 0)):
        raise UnattainableError(
            f"agent {agent}: requirement {mu_i} is not reachable through agent {coord}'s effort")
    hi = max(_solo_bound(q_c, mu_i), 1) if limit >= 1.0 else 1
    while u_at(hi) < mu_i:
        hi *= 2
        if hi > MAX_SAMPLES:
            raise UnattainableError(f"agent {agent}: requirement {mu_i} sits at the utility limit")
    lo = 0  # u_at(lo) < mu_i <= u_at(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if u_at(mid) >= mu_i:
            hi = mid
        else:
            lo = mid
    u_lo = u_at(lo)
    slope = 0.5 * float(np.dot(weight, base ** lo * q_c))
    frac = (mu_i - u_lo) / slope
    return float(lo + min(max(frac, 0.0), 1.0))


def best_response_coverage(model: CoverageModel, mu_i: float, agent: int, theta_others) -> float:
    """Minimal own contribution of ``agent`` meeting ``mu_i`` given the others.

    Entry ``agent`` of ``theta_others`` is ignored.

    Raises:
        UnattainableError: if ``mu_i`` cannot be reached at any finite level.
    """
    return min_contribution(model, mu_i, agent, agent, theta_others)
