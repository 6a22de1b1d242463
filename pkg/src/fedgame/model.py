"""Game instances, the uniform utility interface and instance JSON I/O."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .coverage import (CoverageModel, UnattainableError, best_response_coverage,
                       eval_coverage_batch)
from .linear import LinearModel, ModelError, eval_linear
from .tabular import TabularModel, eval_tabular_batch

UtilityModel = Union[LinearModel, CoverageModel, TabularModel]

FEAS_TOL = 1e-9
INTEGRAL_TOL = 1e-9
FD_STEP = 1e-5

CONTINUOUS = "continuous"
INTEGER = "integer"


@dataclass(frozen=True)
class StrategySpace:
    kind: str = CONTINUOUS
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, INTEGER):
            raise ModelError(f"unknown strategy space kind {self.kind!r}")
        if self.upper is not None:
            upper = np.array(self.upper, dtype=float)
            upper.setflags(write=False)
            object.__setattr__(self, "upper", upper)
        if self.kind == INTEGER:
            if self.upper is None or not np.all(np.isfinite(self.upper)):
                raise ModelError("integer strategy spaces need finite per-agent upper bounds")

    @property
    def is_integer(self) -> bool:
        return self.kind == INTEGER


@dataclass(frozen=True)
class Instance:
    """A complete game: utilities, requirements and strategy space."""

    model: UtilityModel
    mu: np.ndarray
    space: StrategySpace = field(default_factory=StrategySpace)
    label: str = ""

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).reshape(-1)
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        if isinstance(self.model, TabularModel) and not self.space.is_integer:
            object.__setattr__(self, "space", StrategySpace(INTEGER, np.array(self.model.upper, dtype=float)))
        k = self.model.k
        if mu.shape != (k,):
            raise ModelError(f"mu has {mu.size} entries but the model has {k} agents")
        if self.space.upper is not None and self.space.upper.shape != (k,):
            raise ModelError(f"strategy space has dimension {self.space.upper.size}, expected {k}")
        if not isinstance(self.model, TabularModel):
            for i in range(k):
                solo_requirement(self, i)

    @property
    def k(self) -> int:
        return self.model.k

    @property
    def continuous(self) -> bool:
        return not self.space.is_integer

    def with_mu(self, mu) -> "Instance":
        return Instance(self.model, mu, self.space, self.label)


def _check_in_space(instance: Instance, thetas: np.ndarray) -> None:
    if thetas.shape[1] != instance.k:
        raise ModelError(f"allocation has dimension {thetas.shape[1]}, expected {instance.k}")
    if np.any(thetas < -FEAS_TOL):
        raise ModelError("allocation has negative entries")
    space = instance.space
    if space.is_integer and np.any(np.abs(thetas - np.rint(thetas)) > INTEGRAL_TOL):
        raise ModelError("integer strategy space needs integral contributions")
    if space.upper is not None and np.any(thetas > space.upper + FEAS_TOL):
        raise ModelError("allocation exceeds the strategy space upper bound")


def evaluate_batch(instance: Instance, thetas) -> np.ndarray:
    """Utilities for every row of an (N, k) stack of allocations."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    _check_in_space(instance, thetas)
    thetas = np.maximum(thetas, 0.0)
    if instance.space.is_integer:
        thetas = np.rint(thetas)
    model = instance.model
    if isinstance(model, LinearModel):
        return thetas @ model.W.T
    if isinstance(model, CoverageModel):
        return eval_coverage_batch(model, thetas)
    return eval_tabular_batch(model, thetas)


def evaluate(instance: Instance, theta) -> np.ndarray:
    """Utility vector ``(u_1(theta), ..., u_k(theta))``."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1:
        raise ModelError("theta must be a vector")
    if isinstance(instance.model, LinearModel):
        _check_in_space(instance, theta[None, :])
        return eval_linear(instance.model, np.maximum(theta, 0.0))
    return evaluate_batch(instance, theta[None, :])[0]


def is_feasible(instance: Instance, theta, tol: float = FEAS_TOL) -> bool:
    return bool(np.all(evaluate(instance, theta) >= instance.mu - tol))


def solo_requirement(instance: Instance, agent: int) -> float:
    """Smallest own contribution meeting ``mu_i`` when everyone else is at zero.

    Raises:
        UnattainableError: if no contribution within the space's bound works.
    """
    model, mu_i, k = instance.model, float(instance.mu[agent]), instance.k
    if isinstance(model, LinearModel):
        x = max(mu_i, 0.0) / model.W[agent, agent]
    elif isinstance(model, CoverageModel):
        x = best_response_coverage(model, mu_i, agent, np.zeros(k))
    else:
        for t in range(model.upper[agent] + 1):
            point = np.zeros(k)
            point[agent] = t
            if eval_tabular_batch(model, point)[0, agent] >= mu_i - FEAS_TOL:
                return float(t)
        raise UnattainableError(f"agent {agent} cannot reach {mu_i} alone on the grid")
    if instance.space.is_integer:
        x = float(math.ceil(x - INTEGRAL_TOL))
    upper = instance.space.upper
    if upper is not None and x > upper[agent] + FEAS_TOL:
        raise UnattainableError(
            f"agent {agent} needs {x:.6g} alone, above the strategy bound {upper[agent]:.6g}")
    return float(x)


def check_well_behaved(instance: Instance, box_upper, grid: int = 5):
    """Finite-difference evidence for the well-behavedness constants.

    Scans ``grid`` points per axis of ``[0, box_upper_i]`` and records, per
    agent, the smallest observed own-derivative (evidence for ``c2``) and
    the largest observed cross-derivative (evidence for ``c1``). Coverage
    utilities are differenced one-sidedly across integer breakpoints, where
    left and right derivatives differ. This is a diagnostic only.

    Returns:
        (c2_lower, c1_upper), each a length-k array.
    """
    model = instance.model
    if isinstance(model, TabularModel) or instance.space.is_integer:
        raise ModelError("utilities on an integer grid are not differentiable")
    k = instance.k
    box_upper = np.asarray(box_upper, dtype=float)
    axes = [np.linspace(0.0, b, grid) for b in box_upper]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
    h = FD_STEP
    free = Instance(model, instance.mu, StrategySpace(CONTINUOUS), instance.label)
    base = evaluate_batch(free, pts)
    c2 = np.full(k, np.inf)
    c1 = np.zeros(k)
    for j in range(k):
        up = pts.copy()
        up[:, j] += h
        down = pts.copy()
        down[:, j] -= h
        forward = (evaluate_batch(free, up) - base) / h
        deriv = forward
        can_center = pts[:, j] >= h
        if isinstance(model, CoverageModel):
            # (x - h, x + h) must not straddle an integer breakpoint
            can_center &= np.floor(pts[:, j] - h) == np.floor(pts[:, j] + h)
        if np.any(can_center):
            down_u = evaluate_batch(free, np.maximum(down[can_center], 0.0))
            up_u = base[can_center] + forward[can_center] * h
            deriv = forward.copy()
            deriv[can_center] = (up_u - down_u) / (2 * h)
        c2[j] = min(c2[j], float(deriv[:, j].min()))
        others = np.delete(np.arange(k), j)
        if others.size:
            c1[others] = np.maximum(c1[others], deriv[:, others].max(axis=0))
    return c2, c1


# ----------------------------------------------------------------------------
# JSON
# ----------------------------------------------------------------------------

def instance_to_dict(instance: Instance) -> dict:
    model = instance.model
    if isinstance(model, LinearModel):
        mdict = {"type": "linear", "W": model.W.tolist()}
    elif isinstance(model, CoverageModel):
        mdict = {"type": "coverage", "Q": model.Q.tolist()}
    else:
        mdict = {"type": "tabular", "upper": list(model.upper)}
        if model.family is not None:
            mdict["family"] = dict(model.family)
        else:
            mdict["table"] = {",".join(str(v) for v in key): list(map(float, model._dense[key]))
                              for key in np.ndindex(*(u + 1 for u in model.upper))}
    space = {"kind": instance.space.kind}
    if instance.space.upper is not None:
        space["upper"] = instance.space.upper.tolist()
    return {"label": instance.label, "mu": instance.mu.tolist(), "space": space, "model": mdict}


def instance_from_dict(data: dict) -> Instance:
    try:
        mdata = data["model"]
        kind = mdata["type"]
        if kind == "linear":
            model = LinearModel(np.asarray(mdata["W"], dtype=float))
        elif kind == "coverage":
            model = CoverageModel(np.asarray(mdata["Q"], dtype=float))
        elif kind == "tabular":
            table = None
            if "table" in mdata:
                table = {tuple(int(v) for v in key.split(",")): vals for key, vals in mdata["table"].items()}
            model = TabularModel(tuple(mdata["upper"]), table=table, family=mdata.get("family"))
        else:
            raise ModelError(f"unknown model type {kind!r}")
        sdata = data.get("space", {"kind": CONTINUOUS})
        space = StrategySpace(sdata.get("kind", CONTINUOUS), sdata.get("upper"))
        return Instance(model, data["mu"], space, data.get("label", ""))
    except KeyError as exc:
        raise ModelError(f"instance JSON is missing field {exc.args[0]!r}") from None


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=1)


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(data)
