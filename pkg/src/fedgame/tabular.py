"""Utilities given explicitly on an integer grid.

Used for the PAC-learning counterexamples, where fractional contributions
carry no meaning and stability is tested with unit decrements.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .linear import ModelError

GRID_CAP = 10_000_000


def pac_cycle_utility(thetas: np.ndarray, d: int) -> np.ndarray:
    """Three-agent cyclic PAC utilities ``1 - 0.5 (1 - 1/d)^(theta_i + theta_{i-1})``.

    For ``d == 1`` this is the 0/1 table: utility 1 once agent i or its
    predecessor has a sample, one half otherwise.
    """
    thetas = np.atleast_2d(thetas)
    seen = thetas + np.roll(thetas, 1, axis=1)
    return 1.0 - 0.5 * (1.0 - 1.0 / d) ** seen


FAMILIES = {"pac-cycle": pac_cycle_utility}


@dataclass(frozen=True)
class TabularModel:
    """Utility table over ``{0..upper_0} x ... x {0..upper_{k-1}}``.

    Either ``table`` covers every grid point, or ``family`` names a closed
    form (currently ``{"name": "pac-cycle", "d": d}``) evaluated on demand.
    """

    upper: tuple
    table: Optional[Mapping[tuple, np.ndarray]] = None
    family: Optional[Mapping] = None
    _dense: Optional[np.ndarray] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        upper = tuple(int(u) for u in self.upper)
        if any(u < 0 for u in upper):
            raise ModelError("tabular upper bounds must be nonnegative integers")
        object.__setattr__(self, "upper", upper)
        k = len(upper)
        if self.family is not None:
            name = self.family.get("name")
            if name not in FAMILIES:
                raise ModelError(f"unknown tabular family {name!r}")
            if name == "pac-cycle" and k != 3:
                raise ModelError("pac-cycle family has exactly 3 agents")
            return
        if self.table is None:
            raise ModelError("tabular model needs a table or a closed-form family")
        dense = np.empty(tuple(u + 1 for u in upper) + (k,))
        seen = 0
        for key, vals in self.table.items():
            key = tuple(int(v) for v in key)
            if len(key) != k or any(not 0 <= v <= u for v, u in zip(key, upper)):
                raise ModelError(f"table key {key} is off the grid")
            vals = np.asarray(vals, dtype=float)
            if vals.shape != (k,):
                raise ModelError(f"table entry {key} has {vals.size} utilities, expected {k}")
            dense[key] = vals
            seen += 1
        if seen != int(np.prod([u + 1 for u in upper])):
            raise ModelError("table does not cover every grid point")
        object.__setattr__(self, "_dense", dense)

    @property
    def k(self) -> int:
        return len(self.upper)

    @property
    def grid_size(self) -> int:
        return int(np.prod([u + 1 for u in self.upper]))


def _as_grid(model: TabularModel, thetas) -> np.ndarray:
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if thetas.shape[1] != model.k:
        raise ModelError(f"allocations have {thetas.shape[1]} columns, expected {model.k}")
    ints = np.rint(thetas)
    if np.any(np.abs(thetas - ints) > 1e-9):
        raise ModelError("tabular utilities are only defined at integer allocations")
    if np.any(ints < 0) or np.any(ints > np.asarray(model.upper)):
        raise ModelError("allocation lies off the tabular grid")
    return ints.astype(int)


def eval_tabular_batch(model: TabularModel, thetas) -> np.ndarray:
    grid = _as_grid(model, thetas)
    if model.family is not None:
        fn = FAMILIES[model.family["name"]]
        params = {key: val for key, val in model.family.items() if key != "name"}
        return fn(grid.astype(float), **params)
    return model._dense[tuple(grid.T)]


def eval_tabular(model: TabularModel, theta) -> np.ndarray:
    return eval_tabular_batch(model, theta)[0]


def grid_points(upper) -> np.ndarray:
    """All integer points of the box, in lexicographic order."""
    return np.array(list(itertools.product(*(range(u + 1) for u in upper))), dtype=int).reshape(-1, len(upper))


@dataclass
class EquilibriumSearch:
    stable: list
    feasible: list

    @property
    def n_feasible(self) -> int:
        return len(self.feasible)


def exhaustive_equilibrium_search(model: TabularModel, mu, tol: float = 1e-9,
                                  cap: int = GRID_CAP) -> EquilibriumSearch:
    """Enumerate the grid and return every stable point plus every feasible point.

    A feasible point is stable when, for every agent with a positive
    contribution, dropping that contribution by one sample breaks the
    agent's own requirement.
    """
    if model.grid_size > cap:
        raise ModelError(f"grid has {model.grid_size} points, above the cap of {cap}")
    mu = np.asarray(mu, dtype=float)
    pts = grid_points(model.upper)
    util = eval_tabular_batch(model, pts)
    feasible = np.all(util >= mu - tol, axis=1)
    stable = feasible.copy()
    for i in range(model.k):
        active = feasible & (pts[:, i] > 0)
        if not np.any(active):
            continue
        lowered = pts[active].copy()
        lowered[:, i] -= 1
        keeps = eval_tabular_batch(model, lowered)[:, i] >= mu[i] - tol
        idx = np.flatnonzero(active)
        stable[idx[keeps]] = False
    return EquilibriumSearch(
        stable=[tuple(int(v) for v in p) for p in pts[stable]],
        feasible=[tuple(int(v) for v in p) for p in pts[feasible]],
    )


def pac_cycle_threshold(d: int, mu: float) -> int:
    """Smallest ``s`` with ``1 - 0.5 (1 - 1/d)^s >= mu``."""
    if d == 1:
        return 1
    ratio = math.log(2.0 * (1.0 - mu)) / math.log(1.0 - 1.0 / d)
    m = max(int(math.ceil(ratio)), 0)
    # guard the ceiling against rounding at integer ratios
    while m > 0 and 1.0 - 0.5 * (1.0 - 1.0 / d) ** (m - 1) >= mu:
        m -= 1
    while 1.0 - 0.5 * (1.0 - 1.0 / d) ** m < mu:
        m += 1
    return m
