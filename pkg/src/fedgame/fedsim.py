"""Deterministic federated-learning surrogate.

An agent's accuracy after the server has collected cumulative contributions
``theta`` is taken to be ``u_i(theta)`` from the instance, so training is
replaced by exact utility evaluation.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .linear import ModelError
from .model import FEAS_TOL, Instance, evaluate, evaluate_batch
from .parallel import pmap

ALGORITHMS = ("fedavg", "mwfed")


@dataclass(frozen=True)
class SimConfig:
    instance: Instance
    rounds: int
    budget: float
    factor: float = 2.0
    seed: int = 0
    batch: float | None = None  # when set, MW-FED shares are floored to multiples of it

    def __post_init__(self):
        if not self.instance.continuous:
            raise ModelError("simulation needs a continuous strategy space")
        if int(self.rounds) != self.rounds or self.rounds < 1:
            raise ModelError("rounds must be a positive integer")
        if not (self.budget > 0 and math.isfinite(self.budget)):
            raise ModelError("budget must be positive")
        if not self.factor > 1:
            raise ModelError("factor must exceed 1")
        if self.batch is not None and not self.batch > 0:
            raise ModelError("batch must be positive")


@dataclass
class SimTrace:
    """Per-round arrays, all shaped (rounds, k); row t is the state after round t+1."""

    algorithm: str
    contributions: np.ndarray
    cumulative: np.ndarray
    weights: np.ndarray
    utilities: np.ndarray
    satisfied: np.ndarray
    final_satisfied: list = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return self.cumulative.shape[0]

    def first_satisfied(self) -> list:
        """Round number (1-based) at which each agent is first satisfied, or None."""
        out = []
        for column in self.satisfied.T:
            hits = np.flatnonzero(column)
            out.append(int(hits[0]) + 1 if hits.size else None)
        return out

    def to_csv(self) -> str:
        k = self.cumulative.shape[1]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["round", "agent", "contribution", "cumulative", "weight", "utility", "satisfied"])
        for t in range(self.rounds):
            for i in range(k):
                writer.writerow([t + 1, i, repr(float(self.contributions[t, i])),
                                 repr(float(self.cumulative[t, i])), repr(float(self.weights[t, i])),
                                 repr(float(self.utilities[t, i])), int(self.satisfied[t, i])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "contributions": self.contributions.tolist(),
                "cumulative": self.cumulative.tolist(), "weights": self.weights.tolist(),
                "utilities": self.utilities.tolist(), "satisfied": self.satisfied.astype(int).tolist(),
                "final_satisfied": self.final_satisfied}


def _shares(log_weights: np.ndarray) -> np.ndarray:
    # Shifting by the max makes equal weights exactly 1.0, so a uniform MW-FED
    # round reproduces FedAvg bit for bit.
    rel = np.exp(log_weights - log_weights.max())
    return rel / rel.sum()


def _run(config: SimConfig, algorithm: str) -> SimTrace:
    if algorithm not in ALGORITHMS:
        raise ModelError(f"unknown algorithm {algorithm!r}")
    inst = config.instance
    k, rounds = inst.k, int(config.rounds)
    log_c = math.log(config.factor)
    log_w = np.full(k, -math.log(k))
    cum = np.zeros(k)
    contributions = np.zeros((rounds, k))
    cumulative = np.zeros((rounds, k))
    weights = np.zeros((rounds, k))
    utilities = np.zeros((rounds, k))
    satisfied = np.zeros((rounds, k), dtype=bool)
    for t in range(rounds):
        share = _shares(log_w)
        step = config.budget * share
        if algorithm == "mwfed" and config.batch is not None:
            step = config.batch * np.floor(step / config.batch)
        cum = cum + step
        util = evaluate(inst, cum)
        ok = util >= inst.mu - FEAS_TOL
        contributions[t], cumulative[t], utilities[t], satisfied[t] = step, cum, util, ok
        weights[t] = np.exp(log_w)
        if algorithm == "mwfed":
            log_w = log_w + np.where(ok, 0.0, log_c)
    final = [int(i) for i in np.flatnonzero(satisfied[-1])]
    return SimTrace(algorithm, contributions, cumulative, weights, utilities, satisfied, final)


def run_fedavg(config: SimConfig) -> SimTrace:
    """Every agent contributes ``budget / k`` each round."""
    return _run(config, "fedavg")


def run_mwfed(config: SimConfig) -> SimTrace:
    """Multiplicative-weights schedule: unsatisfied agents' weights grow by ``factor``."""
    return _run(config, "mwfed")


def run(config: SimConfig, algorithm: str) -> SimTrace:
    return _run(config, algorithm)


def defection_outcomes(config: SimConfig, algorithm: str, levels) -> np.ndarray:
    """Boolean (k, len(levels)) table: does agent i stay satisfied when it alone defects to a level.

    The server's schedule is that of the undisturbed run; only the
    defector's cumulative contribution shrinks by the level factor.
    """
    levels = _check_levels(levels)
    inst = config.instance
    final = _run(config, algorithm).cumulative[-1]

    def for_agent(i: int) -> np.ndarray:
        points = np.repeat(final[None, :], len(levels), axis=0)
        points[:, i] = final[i] * levels
        util = evaluate_batch(inst, points)[:, i]
        return util >= inst.mu[i] - FEAS_TOL

    return np.array(pmap(for_agent, range(inst.k)), dtype=bool).reshape(inst.k, len(levels))


def _check_levels(levels) -> np.ndarray:
    levels = np.asarray(list(levels), dtype=float)
    if levels.size == 0 or np.any(levels <= 0) or np.any(levels > 1):
        raise ModelError("defection levels must lie in (0, 1]")
    return levels


def defection_curve(config: SimConfig, algorithm: str, levels, trials: int) -> list:
    """Fraction of sampled defectors still satisfied at round T, per level.

    Each trial draws one defecting agent uniformly with ``config.seed``; the
    same draw is used at every level. Returns ``[(level, fraction), ...]``.
    """
    if int(trials) != trials or trials < 1:
        raise ModelError("trials must be a positive integer")
    levels = _check_levels(levels)
    table = defection_outcomes(config, algorithm, levels)
    agents = np.random.default_rng(config.seed).integers(0, config.instance.k, size=int(trials))
    fractions = table[agents].mean(axis=0)
    return [(float(lv), float(fr)) for lv, fr in zip(levels, fractions)]


def curves_to_csv(curves: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algorithm", "level", "fraction_satisfied"])
    for name, rows in curves.items():
        for level, fraction in rows:
            writer.writerow([name, repr(level), repr(fraction)])
    return buf.getvalue()
