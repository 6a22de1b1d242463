"""Canonical game instances and seeded random families."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .coverage import CoverageModel
from .linear import LinearModel, ModelError
from .model import INTEGER, Instance, StrategySpace
from .tabular import TabularModel, pac_cycle_threshold

MAX_FLOWER_B = 256

# K4 edges ordered so that agents {0, 2}, {1, 3} and {4, 5} are the three
# perfect matchings.
K4_EDGES = ((0, 1), (0, 2), (2, 3), (1, 3), (0, 3), (1, 2))


def _root(b: int) -> int:
    r = math.isqrt(b)
    if b < 4 or r * r != b:
        raise ModelError(f"flower size b={b} must be a perfect square >= 4")
    return r


def flower_groups(b: int) -> list:
    """Petal agent indices (1..b) split into sqrt(b) groups."""
    r = _root(b)
    return [list(range(1 + g * r, 1 + (g + 1) * r)) for g in range(r)]


def gen_flower(b: int, variant: str = "linear") -> Instance:
    """Flower game: agent 0 is the core, agents 1..b are petals in sqrt(b) groups.

    Linear variant: ``u_i = theta_i + (theta_0 + sum of i's group-mates)/sqrt(b)``
    for a petal and ``u_0 = theta_0 + sum(petals)/sqrt(b)``; requirements 1.
    Coverage variant: the core is uniform on b central points, split into
    sqrt(b) blocks; each petal is uniform on its group's block plus
    ``b - sqrt(b)`` private points; requirements ``1/2 + 1/(2b)``.
    """
    r = _root(b)
    k = b + 1
    groups = flower_groups(b)
    if variant == "linear":
        W = np.eye(k)
        W[0, 1:] = W[1:, 0] = 1.0 / r
        for group in groups:
            for i, j in itertools.permutations(group, 2):
                W[i, j] = 1.0 / r
        return Instance(LinearModel(W), np.ones(k), label=f"flower-linear-b{b}")
    if variant == "coverage":
        if b > MAX_FLOWER_B:
            raise ModelError(f"coverage flower is capped at b={MAX_FLOWER_B}")
        private = b - r
        n = b + b * private
        Q = np.zeros((k, n))
        Q[0, :b] = 1.0 / b
        for g, group in enumerate(groups):
            for slot, agent in enumerate(group):
                Q[agent, g * r:(g + 1) * r] = 1.0 / b
                start = b + (agent - 1) * private
                Q[agent, start:start + private] = 1.0 / b
        mu = np.full(k, 0.5 + 1.0 / (2 * b))
        return Instance(CoverageModel(Q), mu, label=f"flower-coverage-b{b}")
    raise ModelError(f"unknown flower variant {variant!r}")


def flower_core_only(b: int) -> int:
    """Core-only sample count ``ceil(ln(1 - 1/sqrt b) / ln(1 - 1/b))``."""
    r = _root(b)
    return int(math.ceil(math.log(1.0 - 1.0 / r) / math.log(1.0 - 1.0 / b)))


def pac_cycle_mu(d: int, mu: float) -> float:
    """Shift ``mu`` so that the threshold sample count is odd."""
    if pac_cycle_threshold(d, mu) % 2 == 1:
        return mu
    return (1.0 - 1.0 / d) * mu + 1.0 / d


def gen_pac_cycle(d: int = 1, mu: float = 0.8) -> Instance:
    """Three-agent cyclic PAC game with no stable equilibrium.

    ``d == 1`` gives the {0,1}^3 table with requirement 1. For ``d > 1`` the
    closed form ``1 - (1/2)(1 - 1/d)^(theta_i + theta_{i-1})`` is used, the
    requirement is shifted to make the threshold odd, and each agent's
    grid runs up to threshold + 1.
    """
    if d < 1:
        raise ModelError("d must be a positive integer")
    if d == 1:
        table = {}
        for point in itertools.product((0, 1), repeat=3):
            table[point] = [1.0 if point[i] == 1 or point[(i - 1) % 3] == 1 else 0.5 for i in range(3)]
        model = TabularModel((1, 1, 1), table=table)
        return Instance(model, np.ones(3), StrategySpace(INTEGER, np.ones(3)), label="pac-cycle-d1")
    if not 0.5 < mu < 1.0:
        raise ModelError("mu must lie in (1/2, 1)")
    adjusted = pac_cycle_mu(d, mu)
    m = pac_cycle_threshold(d, adjusted)
    if m % 2 == 0:
        raise ModelError(f"could not make the threshold odd for d={d}, mu={mu}")
    upper = (m + 1,) * 3
    model = TabularModel(upper, family={"name": "pac-cycle", "d": d})
    return Instance(model, np.full(3, adjusted), StrategySpace(INTEGER, np.array(upper, dtype=float)),
                    label=f"pac-cycle-d{d}")


def gen_matching_k4() -> Instance:
    """Six edge agents of K4 over 10 points (edge midpoints, then vertices)."""
    Q = np.zeros((6, 10))
    for agent, (u, v) in enumerate(K4_EDGES):
        Q[agent, [agent, 6 + u, 6 + v]] = 1.0 / 3.0
    return Instance(CoverageModel(Q), np.full(6, 0.6), label="matching-k4")


def matching_allocation(which: int = 0) -> np.ndarray:
    """Indicator of one of the three perfect matchings of ``gen_matching_k4``."""
    pairs = ((0, 2), (1, 3), (4, 5))
    theta = np.zeros(6)
    theta[list(pairs[which])] = 1.0
    return theta


def gen_random_psd(k: int, seed: int = 0, dominance: str = "none", n: int | None = None) -> Instance:
    """Random discovery game ``W = QQ^T`` rescaled to a unit diagonal.

    With ``dominance="diagonal"`` the off-diagonal part is shrunk towards the
    identity until every row is strictly diagonally dominant; a convex
    combination with ``I`` keeps the matrix PSD.
    """
    if k < 1:
        raise ModelError("k must be positive")
    if dominance not in ("none", "diagonal"):
        raise ModelError(f"unknown dominance option {dominance!r}")
    rng = np.random.default_rng(seed)
    n = n or max(2 * k, 4)
    Q = rng.dirichlet(np.full(n, 0.4), size=k)
    W = Q @ Q.T
    scale = 1.0 / np.sqrt(np.diag(W))
    W = W * scale[:, None] * scale[None, :]
    W = np.clip(0.5 * (W + W.T), 0.0, 1.0)
    np.fill_diagonal(W, 1.0)
    if dominance == "diagonal":
        off = W.sum(axis=1) - 1.0
        worst = float(off.max(initial=0.0))
        if worst >= 1.0:
            shrink = 0.9 / worst
            W = np.eye(k) + shrink * (W - np.eye(k))
    label = f"random-psd-k{k}-s{seed}" + ("-dd" if dominance == "diagonal" else "")
    return Instance(LinearModel(W), np.ones(k), label=label)


def gen_easy_hard(strong: float = 0.8, weak: float = 0.05, hard_pair: float = 0.05,
                  seed: int = 0, jitter: float = 0.02) -> Instance:
    """Four linear agents: a strongly coupled easy pair and a weakly coupled hard pair.

    Agents 0 and 1 help each other with weight ``strong``; agents 2 and 3
    only get ``hard_pair`` from each other and ``weak`` from the easy pair.
    ``jitter`` perturbs the couplings deterministically from ``seed``.
    """
    rng = np.random.default_rng(seed)
    W = np.full((4, 4), weak)
    W[0, 1] = W[1, 0] = strong
    W[2, 3] = W[3, 2] = hard_pair
    noise = rng.uniform(-jitter, jitter, size=(4, 4))
    noise = 0.5 * (noise + noise.T)
    W = np.clip(W + noise, 0.0, 1.0)
    np.fill_diagonal(W, 1.0)
    return Instance(LinearModel(W), np.ones(4), label=f"easy-hard-s{seed}")
