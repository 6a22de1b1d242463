"""Price of Stability and Price of Fairness."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linear import LinearModel
from .model import Instance
from .solvers import (SolveReport, integer_grid_search, optimal_stable_eq, optimal_uniform_envy_free,
                      social_opt)
from .verify import is_envy_free


@dataclass
class PriceReport:
    """Ratio of an equilibrium cost to the social optimum.

    ``opt_exact`` / ``eq_exact`` say whether each side is a proven optimum.
    When only the optimum side is heuristic the true optimum can only be
    cheaper, so ``ratio`` is a lower bound and ``lower_bound_only`` is set;
    a heuristic equilibrium side makes ``ratio`` an upper bound instead.
    """

    which: str
    opt_cost: float
    eq_cost: float
    ratio: float
    opt_method: str
    eq_method: str
    opt_exact: bool
    eq_exact: bool
    opt_theta: list = field(default_factory=list)
    eq_theta: list = field(default_factory=list)
    note: str = ""

    @property
    def lower_bound_only(self) -> bool:
        return self.eq_exact and not self.opt_exact

    @property
    def upper_bound_only(self) -> bool:
        return self.opt_exact and not self.eq_exact

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["lower_bound_only"] = self.lower_bound_only
        out["upper_bound_only"] = self.upper_bound_only
        return out


def _ratio(eq_cost: float, opt_cost: float) -> float:
    if opt_cost == 0.0:
        return 1.0 if eq_cost == 0.0 else math.inf
    return eq_cost / opt_cost


def _build(which: str, opt: SolveReport, eq: SolveReport, opt_exact: bool, eq_exact: bool,
           note: str = "") -> PriceReport:
    return PriceReport(which=which, opt_cost=opt.cost, eq_cost=eq.cost, ratio=_ratio(eq.cost, opt.cost),
                       opt_method=opt.method, eq_method=eq.method, opt_exact=opt_exact, eq_exact=eq_exact,
                       opt_theta=np.asarray(opt.theta).tolist(), eq_theta=np.asarray(eq.theta).tolist(),
                       note=note)


def _side_exact(instance: Instance, rep: SolveReport) -> bool:
    return not rep.heuristic and (isinstance(instance.model, LinearModel) or not instance.continuous)


def price_of_stability(instance: Instance) -> PriceReport:
    opt = social_opt(instance)
    eq = optimal_stable_eq(instance)
    note = "no stable equilibrium exists on the grid" if eq.status == "no-equilibrium" else ""
    return _build("pos", opt, eq, _side_exact(instance, opt), _side_exact(instance, eq), note)


def _cheapest_envy_free_on_grid(instance: Instance) -> SolveReport:
    search = integer_grid_search(instance)
    for point in sorted(search.feasible, key=lambda p: (sum(p), p)):
        theta = np.array(point, dtype=float)
        if is_envy_free(instance, theta).envy_free:
            return SolveReport(theta=theta, cost=float(theta.sum()), method="exhaustive",
                               verified_envy_free=True)
    raise RuntimeError("no envy-free point on the grid")


def price_of_fairness(instance: Instance) -> PriceReport:
    """Price of Fairness over envy-free feasible allocations.

    Integer games are enumerated exactly. Continuous games use the best
    equal or two-level envy-free allocation found, so the ratio is an upper
    bound unless the instance's optimal envy-free allocation is equal.
    """
    opt = social_opt(instance)
    if instance.continuous:
        ef = optimal_uniform_envy_free(instance)
    else:
        ef = _cheapest_envy_free_on_grid(instance)
    return _build("pof", opt, ef, _side_exact(instance, opt), _side_exact(instance, ef))
