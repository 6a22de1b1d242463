"""Socially optimal allocations, stable equilibria and envy-free allocations.

Linear games are solved exactly: the social optimum by LP and the optimal
stable equilibrium by searching over zero sets, where each candidate zero
set ``I`` gives the LP

    min 1.theta  s.t.  theta_I = 0,  W_j.theta = mu_j (j not in I),
                       W_j.theta >= mu_j (j in I),  theta >= 0.

Coverage games have non-convex equilibrium sets; their results come from
multi-start best-response dynamics plus, for small k, a grid reference.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .coverage import CoverageModel, UnattainableError, min_contribution
from .linear import LinearModel, ModelError
from .lp import EQ, GE, LpProblem, covering_lp, solve_lp
from .model import Instance, evaluate, evaluate_batch, is_feasible, solo_requirement
from .response import best_response_step
from .tabular import EquilibriumSearch, TabularModel, exhaustive_equilibrium_search, grid_points
from .verify import VERDICT_TOL, is_envy_free, is_stable_equilibrium

ENUMERATION_CAP = 22
NODE_LIMIT = 200_000
COMPLEMENTARITY_TOL = 1e-9
GRID_RESOLUTION = 1.0 / 64
GRID_CAP = 2_000_000


class SolverError(RuntimeError):
    """A solver could not produce a result it can stand behind."""


@dataclass
class SolveReport:
    """An allocation with its cost, provenance and verification flags.

    ``heuristic`` means there is no optimality guarantee. The verified flags
    are only ever set from the verifier's verdict.
    """

    theta: np.ndarray
    cost: float
    method: str
    certificate: dict = field(default_factory=dict)
    utilities: Optional[np.ndarray] = None
    verified_stable: bool = False
    verified_envy_free: bool = False
    heuristic: bool = False
    status: str = "ok"
    iterations: int = 0
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def plain(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, dict):
                return {key: plain(val) for key, val in v.items()}
            if isinstance(v, (list, tuple)):
                return [plain(x) for x in v]
            return v

        return {key: plain(val) for key, val in self.__dict__.items()}


def _report(instance: Instance, theta, method: str, tol: float = VERDICT_TOL, **kwargs) -> SolveReport:
    theta = np.asarray(theta, dtype=float)
    rep = SolveReport(theta=theta, cost=float(theta.sum()), method=method,
                      utilities=evaluate(instance, theta), **kwargs)
    rep.verified_stable = bool(is_stable_equilibrium(instance, theta, tol).stable)
    rep.verified_envy_free = bool(is_envy_free(instance, theta, tol).envy_free)
    return rep


def _require_linear(instance: Instance) -> LinearModel:
    if not isinstance(instance.model, LinearModel) or not instance.continuous:
        raise ModelError("this solver needs a linear model on a continuous strategy space")
    return instance.model


# ----------------------------------------------------------------------------
# Social optimum
# ----------------------------------------------------------------------------

def social_opt_linear(instance: Instance) -> SolveReport:
    model = _require_linear(instance)
    problem = covering_lp(model.W, instance.mu)
    sol = solve_lp(problem)
    if not sol.optimal:
        raise SolverError(f"social optimum LP is {sol.status}")
    slack = model.W @ sol.x - instance.mu
    tight = [int(i) for i in np.flatnonzero(slack <= COMPLEMENTARITY_TOL * (1 + abs(sol.objective)))]
    return _report(instance, sol.x, "lp", certificate={"dual": sol.y, "tight": tight,
                                                        "basis": list(sol.basis)},
                   iterations=sol.iterations)


def _cheapest_cover(instance: Instance, coord: int, theta: np.ndarray) -> float:
    """Least ``theta[coord]`` keeping every agent satisfied, others fixed."""
    model = instance.model
    need = 0.0
    for i in range(instance.k):
        need = max(need, min_contribution(model, float(instance.mu[i]), i, coord, theta))
    return need


def _greedy_descent(instance: Instance, theta: np.ndarray, sweeps: int = 100) -> np.ndarray:
    theta = theta.copy()
    for _ in range(sweeps):
        before = theta.sum()
        for j in range(instance.k):
            try:
                theta[j] = min(theta[j], _cheapest_cover(instance, j, theta))
            except UnattainableError:
                pass
        if before - theta.sum() <= 1e-12:
            break
    return theta


def social_opt_coverage(instance: Instance, resolution: float = GRID_RESOLUTION) -> SolveReport:
    """Best-known social optimum of a coverage game (no global guarantee).

    For k <= 4 the first k-1 coordinates are searched on a grid that is
    refined around the incumbent down to ``resolution``, with the last
    coordinate set to its exact minimal value. Larger games start from
    single-agent and equal allocations and run coordinate descent.
    """
    if not isinstance(instance.model, CoverageModel) or not instance.continuous:
        raise ModelError("coverage social optimum needs a continuous coverage game")
    k = instance.k
    solo = np.array([solo_requirement(instance, i) for i in range(k)])
    candidates = []
    for j in range(k):
        theta = np.zeros(k)
        try:
            theta[j] = _cheapest_cover(instance, j, theta)
            candidates.append(theta)
        except UnattainableError:
            pass
    candidates.append(uniform_feasible_level(instance) * np.ones(k))
    method = "greedy"
    if 2 <= k <= 4:
        method = "grid-refined"
        last = k - 1

        def complete(head) -> Optional[np.ndarray]:
            theta = np.append(np.asarray(head, dtype=float), 0.0)
            try:
                theta[last] = _cheapest_cover(instance, last, theta)
            except UnattainableError:
                return None
            return theta

        step = solo[:last] / 8.0
        centre = None
        best = None
        offsets = range(0, 9)
        while True:
            axes = []
            for a in range(last):
                if centre is None:
                    axes.append([o * step[a] for o in offsets])
                else:
                    axes.append([centre[a] + o * step[a] for o in range(-2, 3) if centre[a] + o * step[a] >= 0])
            for head in itertools.product(*axes):
                theta = complete(head)
                if theta is not None and (best is None or theta.sum() < best.sum() - 1e-15):
                    best = theta
            centre = best[:last]
            if np.all(step <= resolution):
                break
            step = np.maximum(step / 2.0, 0.0)
        candidates.append(best)
    polished = [_greedy_descent(instance, c) for c in sorted(candidates, key=np.sum)[:3]]
    theta = min(polished, key=np.sum)
    return _report(instance, theta, method, heuristic=True,
                   certificate={"resolution": resolution if method == "grid-refined" else None})


def integer_grid_search(instance: Instance, cap: int = GRID_CAP):
    """Feasible and stable points of an integer-box game, by enumeration."""
    if instance.continuous:
        raise ModelError("grid search needs an integer strategy space")
    model = instance.model
    if isinstance(model, TabularModel):
        return exhaustive_equilibrium_search(model, instance.mu, cap=cap)
    upper = tuple(int(round(u)) for u in instance.space.upper)
    size = int(np.prod([u + 1 for u in upper]))
    if size > cap:
        raise ModelError(f"grid has {size} points, above the cap of {cap}")
    pts = grid_points(upper).astype(float)
    util = evaluate_batch(instance, pts)
    feasible = np.all(util >= instance.mu - 1e-9, axis=1)
    stable = feasible.copy()
    for i in range(instance.k):
        active = np.flatnonzero(feasible & (pts[:, i] > 0))
        if active.size:
            lowered = pts[active].copy()
            lowered[:, i] -= 1
            stable[active[evaluate_batch(instance, lowered)[:, i] >= instance.mu[i] - 1e-9]] = False
    def as_tuples(mask):
        return [tuple(int(v) for v in p) for p in pts[mask]]

    return EquilibriumSearch(stable=as_tuples(stable), feasible=as_tuples(feasible))


def _cheapest_point(points: Sequence[tuple]) -> Optional[np.ndarray]:
    if not points:
        return None
    return np.array(min(points, key=lambda p: (sum(p), p)), dtype=float)


def social_opt(instance: Instance) -> SolveReport:
    """Cheapest feasible allocation, ignoring incentives."""
    if not instance.continuous:
        search = integer_grid_search(instance)
        theta = _cheapest_point(search.feasible)
        if theta is None:
            raise SolverError("no feasible point on the grid")
        return _report(instance, theta, "exhaustive", certificate={"n_feasible": search.n_feasible})
    if isinstance(instance.model, LinearModel):
        return social_opt_linear(instance)
    return social_opt_coverage(instance)


# ----------------------------------------------------------------------------
# Optimal stable equilibrium, linear games
# ----------------------------------------------------------------------------

def _support_lp(W: np.ndarray, mu: np.ndarray, zero, tight):
    """Minimize cost with ``theta_zero = 0`` and rows in ``tight`` at equality.

    Returns (theta, dual) or None when infeasible.
    """
    k = len(mu)
    free = [j for j in range(k) if j not in zero]
    senses = [EQ if i in tight else GE for i in range(k)]
    if not free:
        ok = all((mu[i] == 0.0) if i in tight else (mu[i] <= 0.0) for i in range(k))
        return (np.zeros(k), np.zeros(k)) if ok else None
    sol = solve_lp(LpProblem(np.ones(len(free)), W[:, free], senses, mu))
    if not sol.optimal:
        return None
    theta = np.zeros(k)
    theta[free] = sol.x
    return theta, sol.y


def _complementarity_violations(W, mu, theta, fixed) -> list:
    scale = 1.0 + float(np.abs(theta).max(initial=0.0))
    slack = W @ theta - mu
    eps = COMPLEMENTARITY_TOL * scale
    return [j for j in range(len(mu)) if j not in fixed and theta[j] > eps and slack[j] > eps]


def _better(cost, zero, best) -> bool:
    if best is None:
        return True
    if cost < best[0] - 1e-9:
        return True
    return abs(cost - best[0]) <= 1e-9 and zero < best[1]


def enumerate_supports(W: np.ndarray, mu: np.ndarray, lower_bound: float = -np.inf):
    """Brute-force optimal stable equilibrium over all zero sets.

    Zero sets are visited in increasing size, lexicographically within a
    size; the walk stops once a candidate reaches ``lower_bound``.

    Returns:
        (cost, zero_set, theta, dual, lps_solved) or None.
    """
    k = len(mu)
    best = None
    solved = 0
    for r in range(k + 1):
        for zero in itertools.combinations(range(k), r):
            tight = set(range(k)) - set(zero)
            out = _support_lp(W, mu, set(zero), tight)
            solved += 1
            if out is None:
                continue
            theta, dual = out
            cost = float(theta.sum())
            if _better(cost, zero, best):
                best = (cost, zero, theta, dual)
            if best[0] <= lower_bound + 1e-9:
                return best + (solved,)
    return None if best is None else best + (solved,)


def _branch_and_bound(W: np.ndarray, mu: np.ndarray, lower_bound: float, max_nodes: int = NODE_LIMIT):
    """Exact search over zero sets by branching on complementarity.

    Each node fixes some agents to zero and some constraints to equality and
    solves the LP relaxation of the rest. A relaxation whose solution has
    ``theta_j * slack_j = 0`` everywhere is a stable equilibrium; otherwise
    the first violating agent is branched on. The relaxation value bounds
    every descendant, and the search stops early at the social optimum.

    Returns (cost, zero_set, theta, dual, nodes, complete) or None; the
    result is proven optimal only when ``complete`` is true.
    """
    best = None
    nodes = 0
    stack = [(frozenset(), frozenset())]
    while stack and nodes < max_nodes:
        zero, tight = stack.pop()
        out = _support_lp(W, mu, zero, tight)
        nodes += 1
        if out is None:
            continue
        theta, dual = out
        cost = float(theta.sum())
        if best is not None and cost > best[0] + 1e-9:
            continue
        viol = _complementarity_violations(W, mu, theta, zero | tight)
        if not viol:
            eps = COMPLEMENTARITY_TOL * (1.0 + float(theta.max(initial=0.0)))
            theta = np.where(theta <= 1e-12, 0.0, theta)
            zset = tuple(int(j) for j in np.flatnonzero(theta <= eps))
            if _better(cost, zset, best):
                best = (cost, zset, theta, dual)
            if best[0] <= lower_bound + 1e-9:
                break
            continue
        j = viol[0]
        stack.append((zero, tight | {j}))
        stack.append((zero | {j}, tight))
    complete = not stack or (best is not None and best[0] <= lower_bound + 1e-9)
    return None if best is None else best + (nodes, complete)


def _projected_gauss_seidel(W: np.ndarray, mu: np.ndarray, start: np.ndarray, sweeps: int = 20_000,
                            tol: float = 1e-14) -> np.ndarray:
    """Sequential best responses; coordinate descent on ``theta'W theta / 2 - mu'theta`` over ``theta >= 0``."""
    theta = start.astype(float).copy()
    diag = np.diag(W)
    for _ in range(sweeps):
        change = 0.0
        for i in range(len(mu)):
            new = max(0.0, theta[i] + (mu[i] - W[i] @ theta) / diag[i])
            change = max(change, abs(new - theta[i]))
            theta[i] = new
        if change <= tol * (1.0 + float(theta.max(initial=0.0))):
            break
    return theta


def _gauss_seidel_support(W: np.ndarray, mu: np.ndarray, start: np.ndarray):
    """Cheapest stable point sharing the zero pattern of a Gauss-Seidel limit.

    With W symmetric PSD, every stable point minimizes the quadratic above
    and all minimizers share the gradient ``W theta - mu``; agents with a
    positive gradient are zero in all of them. Several thresholds for
    "positive" are tried and the cheapest feasible support LP is kept.
    Returns (theta, zero_set) or None.
    """
    theta = _projected_gauss_seidel(W, mu, start)
    grad = W @ theta - mu
    scale = 1.0 + float(np.abs(mu).max(initial=0.0))
    best = None
    for threshold in (1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5):
        zero = frozenset(int(j) for j in np.flatnonzero(grad > threshold * scale))
        out = _support_lp(W, mu, set(zero), set(range(len(mu))) - zero)
        if out is not None and (best is None or out[0].sum() < best[0].sum() - 1e-12):
            best = (out[0], zero)
    return best


def optimal_stable_eq_linear(instance: Instance, enumeration_cap: int = ENUMERATION_CAP,
                             exhaustive: bool = False, max_nodes: int = NODE_LIMIT) -> SolveReport:
    """Cheapest stable equilibrium of a linear game.

    Branch and bound over zero sets is exact whenever it finishes within
    ``max_nodes`` LPs; otherwise its incumbent is returned flagged
    heuristic. ``exhaustive=True`` instead enumerates all ``2^k`` zero sets
    and is refused above ``enumeration_cap`` agents. When the search finds
    no incumbent at all, projected Gauss-Seidel on the convex quadratic
    whose minimizers are the stable points picks a zero pattern for one
    final support LP (heuristic).
    """
    model = _require_linear(instance)
    W, mu = model.W, instance.mu
    lower = social_opt_linear(instance).cost
    if exhaustive:
        if instance.k > enumeration_cap:
            raise SolverError(f"plain enumeration is capped at k={enumeration_cap}")
        found = enumerate_supports(W, mu, lower)
        if found is None:
            raise SolverError("no stable equilibrium found among the zero sets")
        cost, zero, theta, dual, count = found
        return _report(instance, theta, "support-enum",
                       certificate={"zero_set": list(zero), "dual": dual, "lower_bound": lower, "lps": count})
    found = _branch_and_bound(W, mu, lower, max_nodes)
    if found is not None:
        cost, zero, theta, dual, count, complete = found
        rep = _report(instance, theta, "support-enum", heuristic=not complete,
                      certificate={"zero_set": list(zero), "dual": dual, "lower_bound": lower, "nodes": count})
        if not complete:
            rep.status = "node-limit"
        return rep
    opt = social_opt_linear(instance).theta
    found = _gauss_seidel_support(W, mu, opt)
    if found is None:
        theta, zero = _projected_gauss_seidel(W, mu, opt), ()
    else:
        theta, zero = found
    rep = _report(instance, theta, "gauss-seidel", heuristic=True,
                  certificate={"zero_set": sorted(zero), "lower_bound": lower})
    if not rep.verified_stable:
        rep.status = "unverified"
    return rep


# ----------------------------------------------------------------------------
# Best-response dynamics
# ----------------------------------------------------------------------------

@dataclass
class BrConfig:
    damping: float = 0.5
    max_iterations: int = 10_000
    tol: float = 1e-8
    start: str = "zeros"
    seed: int = 0
    start_point: Optional[np.ndarray] = None

    def __post_init__(self):
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.start not in ("zeros", "solo", "random"):
            raise ValueError(f"unknown start policy {self.start!r}")


def _start_point(instance: Instance, config: BrConfig) -> np.ndarray:
    if config.start_point is not None:
        return np.asarray(config.start_point, dtype=float).copy()
    if config.start == "zeros":
        return np.zeros(instance.k)
    solo = np.array([solo_requirement(instance, i) for i in range(instance.k)])
    if config.start == "solo":
        return solo
    return np.random.default_rng(config.seed).uniform(0.0, solo)


def best_response_dynamics(instance: Instance, config: Optional[BrConfig] = None) -> SolveReport:
    """Iterate ``theta <- (1 - damping) theta + damping f(theta)``.

    Stops when ``max|f(theta) - theta| <= tol`` (status ``converged``), when
    a state repeats to 12 decimals (``cycle``) or at the iteration limit.
    Convergence is not guaranteed; non-convergence is reported through
    ``status``.
    """
    config = config or BrConfig()
    theta = _start_point(instance, config)
    seen = {}
    residuals = []
    status = "max-iterations"
    it = 0
    for it in range(1, config.max_iterations + 1):
        response = best_response_step(instance, theta)
        residual = float(np.max(np.abs(response - theta), initial=0.0))
        residuals.append(residual)
        if residual <= config.tol:
            status = "converged"
            break
        key = tuple(np.round(theta, 12))
        if key in seen:
            status = "cycle"
            break
        seen[key] = it
        theta = (1.0 - config.damping) * theta + config.damping * response
    trace = [{"iteration": i + 1, "residual": r} for i, r in enumerate(residuals[:200])]
    cert = {"start": config.start if config.start_point is None else "explicit",
            "damping": config.damping, "final_residual": residuals[-1] if residuals else 0.0}
    if status == "cycle":
        cert["cycle_from"] = seen[tuple(np.round(theta, 12))]
    return _report(instance, theta, "best-response", heuristic=True, status=status,
                   iterations=it, trace=trace, certificate=cert)


def _grid_stable_candidates(instance: Instance, resolution: float, cap: int):
    k = instance.k
    solo = np.array([solo_requirement(instance, i) for i in range(k)])
    counts = np.ceil(solo / resolution).astype(int) + 1
    while int(np.prod(counts)) > cap:
        resolution *= 2.0
        counts = np.ceil(solo / resolution).astype(int) + 1
    pts = grid_points(tuple(counts - 1)).astype(float) * resolution
    util = evaluate_batch(instance, pts)
    ok = np.all(util >= instance.mu - 1e-12, axis=1)
    for i in range(k):
        idx = np.flatnonzero(ok & (pts[:, i] >= resolution))
        if idx.size:
            lowered = pts[idx].copy()
            lowered[:, i] -= resolution
            still = evaluate_batch(instance, lowered)[:, i] >= instance.mu[i] - 1e-12
            ok[idx[still]] = False
    return pts[ok], resolution


def optimal_stable_eq_coverage(instance: Instance, starts: int = 6, seed: int = 0,
                               grid: Optional[bool] = None, resolution: float = GRID_RESOLUTION,
                               grid_cap: int = GRID_CAP) -> SolveReport:
    """Cheapest stable equilibrium found for a coverage game.

    Runs damped best-response dynamics from zero, the solo vector, every
    single-agent solo point and ``starts`` seeded random points. For k <= 4
    (or ``grid=True``) the grid of step ``resolution`` is also scanned for
    points passing the discrete decrement test; the cheapest such point
    seeds one more run. Results carry ``heuristic=True``.
    """
    if not isinstance(instance.model, CoverageModel) or not instance.continuous:
        raise ModelError("needs a continuous coverage game")
    k = instance.k
    solo = np.array([solo_requirement(instance, i) for i in range(k)])
    points = [np.zeros(k), solo.copy()]
    for i in range(k):
        e = np.zeros(k)
        e[i] = solo[i]
        points.append(e)
    rng = np.random.default_rng(seed)
    points += [rng.uniform(0.0, solo) for _ in range(starts)]
    grid_note = None
    if grid is None:
        grid = k <= 4
    if grid:
        cands, used = _grid_stable_candidates(instance, resolution, grid_cap)
        grid_note = {"resolution": used, "n_candidates": int(len(cands))}
        if len(cands):
            best_grid = cands[np.argmin(cands.sum(axis=1))]
            grid_note["best_cost"] = float(best_grid.sum())
            grid_note["best_theta"] = best_grid.tolist()
            points.append(best_grid)
    runs = [best_response_dynamics(instance, BrConfig(start_point=p)) for p in points]
    good = [r for r in runs if r.status == "converged" and r.verified_stable]
    if not good:
        if grid_note and grid_note.get("best_theta") is not None:
            rep = _report(instance, grid_note["best_theta"], "exhaustive", heuristic=True,
                          status="grid-certified", certificate={"grid": grid_note})
            return rep
        raise SolverError("no stable equilibrium found by best-response dynamics")
    best = min(good, key=lambda r: (round(r.cost, 9), tuple(r.theta)))
    best.certificate["starts"] = len(points)
    best.certificate["converged_runs"] = len(good)
    if grid_note is not None:
        best.certificate["grid"] = grid_note
    return best


def optimal_stable_eq(instance: Instance) -> SolveReport:
    if not instance.continuous:
        search = integer_grid_search(instance)
        theta = _cheapest_point(search.stable)
        if theta is None:
            return SolveReport(theta=np.full(instance.k, np.nan), cost=math.inf, method="exhaustive",
                               status="no-equilibrium",
                               certificate={"n_feasible": search.n_feasible, "n_stable": 0})
        return _report(instance, theta, "exhaustive",
                       certificate={"n_feasible": search.n_feasible, "n_stable": len(search.stable)})
    if isinstance(instance.model, LinearModel):
        return optimal_stable_eq_linear(instance)
    return optimal_stable_eq_coverage(instance)


# ----------------------------------------------------------------------------
# Envy-free allocations
# ----------------------------------------------------------------------------

def envy_free_padding(instance: Instance, theta_feasible) -> np.ndarray:
    """Raise every contribution to the current maximum.

    Feasibility survives because utilities are non-decreasing; equal loads
    leave nobody to envy.
    """
    theta = np.asarray(theta_feasible, dtype=float)
    return np.full(theta.shape, float(theta.max(initial=0.0)))


def _min_scale(instance: Instance, shape: np.ndarray, hi: float, rel_tol: float = 1e-13) -> float:
    """Least ``c`` with ``c * shape`` feasible, given feasible ``hi``."""
    lo = 0.0
    if is_feasible(instance, lo * shape, tol=0.0):
        return 0.0
    for _ in range(200):
        if hi - lo <= rel_tol * max(hi, 1.0):
            break
        mid = 0.5 * (lo + hi)
        if is_feasible(instance, mid * shape, tol=0.0):
            hi = mid
        else:
            lo = mid
    return hi


def uniform_feasible_level(instance: Instance) -> float:
    """Least ``c`` making the equal allocation ``(c, ..., c)`` feasible."""
    k = instance.k
    solo = np.array([solo_requirement(instance, i) for i in range(k)])
    if not instance.continuous:
        top = int(np.min(instance.space.upper))
        for c in range(top + 1):
            if is_feasible(instance, np.full(k, float(c))):
                return float(c)
        raise SolverError("no equal allocation on the grid is feasible")
    return _min_scale(instance, np.ones(k), float(solo.max()))


def optimal_uniform_envy_free(instance: Instance, levels: Sequence[float] = (0.0, 0.25, 0.5, 0.75),
                              max_two_level_agents: int = 64) -> SolveReport:
    """Cheapest verified envy-free allocation in the equal and two-level families.

    The equal family ``(c, ..., c)`` is always envy-free. The two-level
    family lowers one agent to ``r * c`` for each ``r`` in ``levels``, which
    covers instances with a distinguished agent such as a flower core. No
    global optimality claim is made.
    """
    k = instance.k
    c = uniform_feasible_level(instance)
    best = np.full(k, c)
    tried = 1
    if instance.continuous and 2 <= k <= max_two_level_agents:
        solo = np.array([solo_requirement(instance, i) for i in range(k)])
        for a in range(k):
            for r in levels:
                shape = np.ones(k)
                shape[a] = r
                hi = max(float(np.delete(solo, a).max()), solo[a] / r if r > 0 else 0.0)
                hi = max(hi, 1e-12)
                doublings = 0
                while not is_feasible(instance, hi * shape, tol=0.0) and doublings < 30:
                    hi *= 2.0
                    doublings += 1
                if doublings == 30:
                    continue
                scale = _min_scale(instance, shape, hi)
                cand = scale * shape
                tried += 1
                if cand.sum() < best.sum() - 1e-12 and is_envy_free(instance, cand).envy_free:
                    best = cand
    return _report(instance, best, "padding", heuristic=True, certificate={"candidates": tried})
