"""Dense two-phase primal simplex with Bland's rule and dual extraction.

Problems are small (tens of variables), so the solver keeps an explicit
tableau and refactorizes it from the original data every ``REFRESH``
pivots to bound drift.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-8
OPT_TOL = 1e-9
REFRESH = 50
MAX_ITER = 50_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

GE, EQ, LE = ">=", "=", "<="


class LpNumericalError(RuntimeError):
    """The simplex method failed to terminate or lost feasibility."""


@dataclass
class LpProblem:
    """``min c.x`` subject to ``A x (senses) b`` and ``x >= lb``."""

    c: np.ndarray
    A: np.ndarray
    senses: Sequence[str]
    b: np.ndarray
    lb: Optional[np.ndarray] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        self.A = np.asarray(self.A, dtype=float).reshape(-1, self.c.size)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.senses = list(self.senses)
        self.lb = np.zeros(self.c.size) if self.lb is None else np.asarray(self.lb, dtype=float)
        m, n = self.A.shape
        if self.b.size != m or len(self.senses) != m or self.lb.size != n:
            raise ValueError("LP dimensions are inconsistent")
        if any(s not in (GE, EQ, LE) for s in self.senses):
            raise ValueError(f"unknown constraint sense in {self.senses}")
        for arr in (self.c, self.A, self.b, self.lb):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")


@dataclass
class LpSolution:
    """Primal/dual pair, or a status with a witness.

    ``y`` follows the sign convention of the Lagrangian ``c.x - y.(Ax - b)``:
    nonnegative on ``>=`` rows, nonpositive on ``<=`` rows. For infeasible
    problems ``witness`` is a Farkas multiplier; for unbounded ones, a
    recession direction.
    """

    status: str
    x: Optional[np.ndarray] = None
    objective: float = float("nan")
    y: Optional[np.ndarray] = None
    basis: tuple = ()
    iterations: int = 0
    witness: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list):
        self.A = A
        self.b = b
        self.basis = basis
        self.pivots = 0
        self.refresh()

    def refresh(self):
        B = self.A[:, self.basis]
        full = np.hstack([self.A, self.b[:, None]])
        self.T = np.linalg.solve(B, full)

    def pivot(self, row: int, col: int):
        T = self.T
        T[row] /= T[row, col]
        factor = T[:, col].copy()
        factor[row] = 0.0
        T -= np.outer(factor, T[row])
        self.basis[row] = col
        self.pivots += 1
        if self.pivots % REFRESH == 0:
            self.refresh()

    def run(self, cost: np.ndarray, allowed: np.ndarray, budget: int) -> tuple:
        """Bland's-rule simplex on the current basis. Returns (status, column)."""
        T = self.T
        n = self.A.shape[1]
        for _ in range(budget):
            T = self.T
            cb = cost[self.basis]
            reduced = cost - cb @ T[:, :n]
            candidates = np.flatnonzero(allowed & (reduced < -OPT_TOL))
            if candidates.size == 0:
                return OPTIMAL, None
            col = int(candidates[0])
            column = T[:, col]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return UNBOUNDED, col
            rhs = np.maximum(T[rows, -1], 0.0)
            ratios = rhs / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, best)]
            row = int(min(ties, key=lambda r: self.basis[r]))
            self.pivot(row, col)
        raise LpNumericalError("simplex exceeded its iteration budget")


def solve_lp(problem: LpProblem) -> LpSolution:
    """Solve an LP with the two-phase simplex method.

    Args:
        problem: the LP; bounds other than ``x >= lb`` go into ``A``.

    Returns:
        LpSolution with status ``optimal``, ``infeasible`` or ``unbounded``.
    """
    c, A, b, lb = problem.c, problem.A, problem.b, problem.lb
    m, n = A.shape
    rhs = b - A @ lb
    flip = np.where(rhs < 0, -1.0, 1.0)
    senses = []
    for s, f in zip(problem.senses, flip):
        if f < 0 and s != EQ:
            s = GE if s == LE else LE
        senses.append(s)
    A_std = A * flip[:, None]
    rhs = rhs * flip

    n_slack = sum(s != EQ for s in senses)
    n_art = sum(s != LE for s in senses)
    cols = n + n_slack + n_art
    M = np.zeros((m, cols))
    M[:, :n] = A_std
    basis = [0] * m
    s_idx, a_idx = n, n + n_slack
    artificial = np.zeros(cols, dtype=bool)
    for r, s in enumerate(senses):
        if s == LE:
            M[r, s_idx] = 1.0
            basis[r] = s_idx
            s_idx += 1
        else:
            if s == GE:
                M[r, s_idx] = -1.0
                s_idx += 1
            M[r, a_idx] = 1.0
            artificial[a_idx] = True
            basis[r] = a_idx
            a_idx += 1

    tab = _Tableau(M, rhs, basis)
    iterations = 0
    scale = 1.0 + float(np.abs(rhs).max(initial=0.0))

    if n_art:
        cost1 = artificial.astype(float)
        status, _ = tab.run(cost1, np.ones(cols, dtype=bool), MAX_ITER)
        iterations = tab.pivots
        phase1 = float(cost1[tab.basis] @ tab.T[:, -1])
        if phase1 > FEAS_TOL * scale:
            B = tab.A[:, tab.basis]
            y1 = np.linalg.solve(B.T, cost1[tab.basis])
            return LpSolution(INFEASIBLE, iterations=iterations, witness=y1 * flip)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if not artificial[tab.basis[r]]:
                continue
            row = tab.T[r, :cols]
            options = np.flatnonzero(~artificial & (np.abs(row) > PIVOT_TOL))
            if options.size:
                tab.pivot(r, int(options[0]))
            else:
                keep[r] = False
        if not keep.all():
            basis = [bv for bv, kp in zip(tab.basis, keep) if kp]
            tab = _Tableau(M[keep], rhs[keep], basis)
        else:
            tab.refresh()
    else:
        keep = np.ones(m, dtype=bool)

    cost2 = np.zeros(cols)
    cost2[:n] = c
    allowed = ~artificial
    status, col = tab.run(cost2, allowed, MAX_ITER)
    iterations += tab.pivots
    if status == UNBOUNDED:
        direction = np.zeros(cols)
        direction[col] = 1.0
        direction[tab.basis] = -tab.T[:, col]
        return LpSolution(UNBOUNDED, iterations=iterations, witness=direction[:n])

    values = np.zeros(cols)
    values[tab.basis] = tab.T[:, -1]
    if np.any(values[:cols] < -FEAS_TOL * scale):
        raise LpNumericalError("basic solution lost primal feasibility")
    x = np.maximum(values[:n], 0.0) + lb
    B = tab.A[:, tab.basis]
    y_kept = np.linalg.solve(B.T, cost2[tab.basis])
    y = np.zeros(m)
    y[keep] = y_kept
    y *= flip
    return LpSolution(OPTIMAL, x=x, objective=float(c @ x), y=y,
                      basis=tuple(tab.basis), iterations=iterations)


def duality_gap(problem: LpProblem, sol: LpSolution) -> float:
    """``|c.x - (b.y + lb.(c - A^T y))|`` for an optimal pair."""
    reduced = problem.c - problem.A.T @ sol.y
    dual_value = problem.b @ sol.y + problem.lb @ reduced
    return abs(sol.objective - dual_value)


def certificate_errors(problem: LpProblem, sol: LpSolution) -> dict:
    """Primal and dual infeasibility magnitudes of an optimal pair."""
    A, b, x, y = problem.A, problem.b, sol.x, sol.y
    act = A @ x - b
    primal = 0.0
    dual_sign = 0.0
    for r, s in enumerate(problem.senses):
        if s == GE:
            primal = max(primal, -act[r])
            dual_sign = max(dual_sign, -y[r])
        elif s == LE:
            primal = max(primal, act[r])
            dual_sign = max(dual_sign, y[r])
        else:
            primal = max(primal, abs(act[r]))
    primal = max(primal, float(np.max(problem.lb - x, initial=0.0)))
    reduced = problem.c - A.T @ y
    dual = max(dual_sign, float(np.max(-reduced, initial=0.0)))
    return {"primal": float(primal), "dual": float(dual), "gap": duality_gap(problem, sol)}


def covering_lp(W: np.ndarray, mu: np.ndarray) -> LpProblem:
    """``min 1.theta`` s.t. ``W theta >= mu``, ``theta >= 0``."""
    k = W.shape[0]
    return LpProblem(np.ones(k), W, [GE] * k, mu)
