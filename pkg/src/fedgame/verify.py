"""Certificates for feasibility, stability and envy-freeness."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .model import Instance, evaluate, evaluate_batch
from .response import best_response_step

VERDICT_TOL = 1e-7


@dataclass
class Verdict:
    """Outcome of certifying one allocation.

    ``stable`` and ``envy_free`` are ``None`` when not checked. Each
    violation is a dict with ``agent``, ``kind``, ``magnitude`` and a
    witness (``deviation`` for stability, ``swap_with`` for envy).
    """

    feasible: bool
    stable: Optional[bool] = None
    envy_free: Optional[bool] = None
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def merge(self, other: "Verdict") -> "Verdict":
        return Verdict(
            feasible=self.feasible and other.feasible,
            stable=self.stable if other.stable is None else other.stable,
            envy_free=self.envy_free if other.envy_free is None else other.envy_free,
            violations=self.violations + [v for v in other.violations if v not in self.violations],
        )


def _feasibility(instance: Instance, theta: np.ndarray, tol: float) -> tuple:
    util = evaluate(instance, theta)
    short = instance.mu - util
    violations = [{"agent": int(i), "kind": "requirement", "magnitude": float(short[i])}
                  for i in np.flatnonzero(short > tol)]
    return util, violations


def is_feasible_verdict(instance: Instance, theta, tol: float = VERDICT_TOL) -> Verdict:
    theta = np.asarray(theta, dtype=float)
    _, violations = _feasibility(instance, theta, tol)
    return Verdict(feasible=not violations, violations=violations)


def is_stable_equilibrium(instance: Instance, theta, tol: float = VERDICT_TOL) -> Verdict:
    """Feasible, and no agent can lower its own contribution and stay satisfied.

    Continuous games compare each positive contribution with the agent's
    best response; integer games try a one-sample decrement.
    """
    theta = np.asarray(theta, dtype=float)
    _, violations = _feasibility(instance, theta, tol)
    feasible = not violations
    if not feasible:
        return Verdict(feasible=False, stable=False, violations=violations)
    if instance.continuous:
        response = best_response_step(instance, theta)
        for i in range(instance.k):
            if theta[i] > tol and response[i] < theta[i] - tol:
                violations.append({"agent": i, "kind": "reducible",
                                   "magnitude": float(theta[i] - response[i]),
                                   "deviation": float(response[i])})
    else:
        active = [i for i in range(instance.k) if theta[i] >= 1 - 1e-9]
        if active:
            lowered = np.repeat(theta[None, :], len(active), axis=0)
            lowered[np.arange(len(active)), active] -= 1.0
            util = evaluate_batch(instance, lowered)
            for row, i in enumerate(active):
                if util[row, i] >= instance.mu[i] - tol:
                    violations.append({"agent": i, "kind": "reducible",
                                       "magnitude": 1.0, "deviation": float(theta[i] - 1.0)})
    return Verdict(feasible=True, stable=not violations, violations=violations)


def _swap_available(instance: Instance, theta: np.ndarray, i: int, j: int) -> bool:
    upper = instance.space.upper
    if upper is None:
        return True
    return theta[j] <= upper[i] + 1e-9 and theta[i] <= upper[j] + 1e-9


def is_envy_free(instance: Instance, theta, tol: float = VERDICT_TOL) -> Verdict:
    """Feasible, and no agent would stay satisfied after taking a lighter load.

    Agent ``i`` envies ``j`` when ``theta_j < theta_i`` and ``i`` still meets
    its requirement in the allocation with entries ``i`` and ``j`` swapped.
    Swaps leaving the strategy space are not available deviations.
    """
    theta = np.asarray(theta, dtype=float)
    _, violations = _feasibility(instance, theta, tol)
    if violations:
        return Verdict(feasible=False, envy_free=False, violations=violations)
    pairs = [(i, j) for i in range(instance.k) for j in range(instance.k)
             if theta[j] < theta[i] - tol and _swap_available(instance, theta, i, j)]
    if pairs:
        swapped = np.repeat(theta[None, :], len(pairs), axis=0)
        for row, (i, j) in enumerate(pairs):
            swapped[row, i], swapped[row, j] = theta[j], theta[i]
        util = evaluate_batch(instance, swapped)
        for row, (i, j) in enumerate(pairs):
            if util[row, i] >= instance.mu[i] - tol:
                violations.append({"agent": i, "kind": "envy", "swap_with": j,
                                   "magnitude": float(util[row, i] - instance.mu[i])})
    return Verdict(feasible=True, envy_free=not violations, violations=violations)


def verify(instance: Instance, theta, stable: bool = True, envy_free: bool = True,
           tol: float = VERDICT_TOL) -> Verdict:
    verdict = is_feasible_verdict(instance, theta, tol)
    if stable:
        verdict = verdict.merge(is_stable_equilibrium(instance, theta, tol))
    if envy_free:
        verdict = verdict.merge(is_envy_free(instance, theta, tol))
    return verdict
