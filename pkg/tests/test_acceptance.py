"""Numbered acceptance criteria, each checked at its stated tolerance and time budget.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from fedgame.coverage import CoverageModel
from fedgame.fedsim import SimConfig, defection_curve, run_fedavg, run_mwfed
from fedgame.generators import (flower_core_only, gen_easy_hard, gen_flower, gen_matching_k4, gen_pac_cycle,
                                gen_random_psd, matching_allocation)
from fedgame.linear import LinearModel
from fedgame.lp import covering_lp, duality_gap, solve_lp
from fedgame.model import Instance, evaluate, is_feasible
from fedgame.prices import price_of_fairness, price_of_stability
from fedgame.response import best_response_step
from fedgame.solvers import BrConfig, best_response_dynamics, optimal_stable_eq_linear, social_opt
from fedgame.tabular import exhaustive_equilibrium_search
from fedgame.verify import is_envy_free, is_stable_equilibrium, verify

from oracles import linear_stable_equilibria, lp_vertex_enumeration, random_coverage_matrix


@contextmanager
def within(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, budget {seconds}s"


def random_psd_family(count, offset=0):
    return [gen_random_psd(2 + (seed % 5), offset + seed) for seed in range(count)]


@pytest.mark.criterion(1, "two-agent coverage values, stability of unit vectors, infeasible midpoint")
def test_criterion_01_coverage_regression():
    with within(1.0):
        inst = Instance(CoverageModel(np.full((2, 2), 0.5)), np.full(2, 0.75))
        e1, e2, mid = np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.5, 0.5])
        assert np.all(evaluate(inst, e1) == 0.75) and np.all(evaluate(inst, e2) == 0.75)
        assert np.all(np.abs(evaluate(inst, mid) - (0.75 - 1 / 32)) <= 1e-12)
        assert is_stable_equilibrium(inst, e1).stable and is_stable_equilibrium(inst, e2).stable
        assert not verify(inst, mid).feasible


@pytest.mark.criterion(2, "K4 matching utilities, envy-freeness and mixture envy witness")
def test_criterion_02_matching():
    with within(1.0):
        inst = gen_matching_k4()
        theta = matching_allocation(0)
        util = evaluate(inst, theta)
        assert np.all(np.abs(util[[0, 2]] - 2 / 3) <= 1e-12)
        assert np.all(np.abs(util[[1, 3, 4, 5]] - 11 / 18) <= 1e-12)
        assert is_envy_free(inst, theta).envy_free
        mixture = 0.9 * matching_allocation(0) + 0.1 * matching_allocation(1)
        verdict = is_envy_free(inst, mixture)
        assert not verdict.envy_free
        pairs = {(v["agent"], v["swap_with"]) for v in verdict.violations}
        # envious agent on the lightly used matching, swapping with an agent of the unused one
        assert (1, 5) in pairs
        assert all(i in (1, 3) and j in (4, 5) for i, j in pairs)


@pytest.mark.criterion(3, "no stable point in the cyclic PAC games")
def test_criterion_03_no_equilibrium():
    with within(10.0):
        base = gen_pac_cycle(1)
        search = exhaustive_equilibrium_search(base.model, base.mu)
        assert search.n_feasible == 4 and search.stable == []
        for d in (2, 4, 8):
            inst = gen_pac_cycle(d, 0.8)
            assert exhaustive_equilibrium_search(inst.model, inst.mu).stable == []


@pytest.mark.criterion(4, "LP duality gap on 200 instances; vertex-enumeration agreement for k <= 4")
def test_criterion_04_lp_soundness():
    with within(30.0):
        for inst in random_psd_family(200):
            prob = covering_lp(inst.model.W, inst.mu)
            sol = solve_lp(prob)
            assert sol.optimal
            assert duality_gap(prob, sol) <= 1e-7 * (1 + abs(sol.objective))
            if inst.k <= 4:
                best, _ = lp_vertex_enumeration(inst.model.W, inst.mu)
                assert abs(sol.objective - best) <= 1e-8


@pytest.mark.criterion(5, "support of the optimal stable point is socially optimal for its agents")
def test_criterion_05_core_set():
    with within(60.0):
        for inst in random_psd_family(100, offset=1000):
            rep = optimal_stable_eq_linear(inst)
            assert rep.verified_stable
            support = np.flatnonzero(rep.theta > 1e-9)
            W = inst.model.W[np.ix_(support, support)]
            sub = solve_lp(covering_lp(W, inst.mu[support]))
            assert abs(sub.objective - rep.cost) <= 1e-7
            if np.all(rep.theta > 1e-9):
                assert abs(rep.cost - social_opt(inst).cost) <= 1e-7


@pytest.mark.criterion(6, "stable implies envy-free when every off-diagonal is below the diagonal")
def test_criterion_06_stable_implies_envy_free():
    with within(30.0):
        checked = 0
        for inst in random_psd_family(100, offset=1000):
            W = inst.model.W
            off = W - np.diag(np.diag(W))
            if not np.all(off < np.diag(W)[:, None]):
                continue
            candidates = linear_stable_equilibria(W, inst.mu) + [optimal_stable_eq_linear(inst).theta]
            for theta in candidates:
                if is_stable_equilibrium(inst, theta).stable:
                    assert is_envy_free(inst, theta).envy_free
                    checked += 1
        assert checked > 0


@pytest.mark.criterion(7, "price of stability is 1 under diagonal dominance")
def test_criterion_07_diagonal_dominance():
    with within(30.0):
        for seed in range(50):
            inst = gen_random_psd(2 + seed % 5, 2000 + seed, "diagonal")
            assert abs(price_of_stability(inst).ratio - 1.0) <= 1e-7


@pytest.mark.criterion(8, "flower family prices grow at least like 0.4 sqrt(k)")
def test_criterion_08_flower_scaling():
    with within(60.0):
        pos, pof = [], []
        for b in (4, 9, 16):
            inst = gen_flower(b, "linear")
            opt = social_opt(inst)
            assert abs(opt.cost - math.sqrt(b)) <= 1e-7
            eq = optimal_stable_eq_linear(inst)
            assert abs(eq.cost - b / (2 - 1 / math.sqrt(b))) <= 1e-6
            stab, fair = price_of_stability(inst), price_of_fairness(inst)
            assert stab.ratio >= 0.4 * math.sqrt(inst.k) and fair.ratio >= 0.4 * math.sqrt(inst.k)
            pos.append(stab.ratio)
            pof.append(fair.ratio)
        assert abs(pos[0] - 4 / 3) <= 1e-6
        assert pos[0] < pos[1] < pos[2] and pof[0] < pof[1] < pof[2]
        for b in (4, 9):
            inst = gen_flower(b, "coverage")
            theta = np.zeros(inst.k)
            theta[0] = flower_core_only(b)
            assert is_feasible(inst, theta)


@pytest.mark.criterion(9, "best-response constraints, convergence under dominance, coverage cycle")
def test_criterion_09_best_response():
    with within(60.0):
        rng = np.random.default_rng(9)
        for trial in range(1000):
            if trial % 2:
                inst = gen_random_psd(int(rng.integers(2, 7)), int(rng.integers(1 << 30)))
            else:
                k = int(rng.integers(2, 5))
                Q = random_coverage_matrix(rng, k, int(rng.integers(2, 7)))
                inst = Instance(CoverageModel(Q), rng.uniform(0.55, 0.95, size=k))
            theta = rng.uniform(0, 3, size=inst.k)
            response = best_response_step(inst, theta)
            for i in range(inst.k):
                point = theta.copy()
                point[i] = response[i]
                assert evaluate(inst, point)[i] >= inst.mu[i] - 1e-9
        for seed in range(20):
            inst = gen_random_psd(2 + seed % 5, 3000 + seed, "diagonal")
            rep = best_response_dynamics(inst, BrConfig(max_iterations=10_000, tol=1e-8))
            assert rep.status == "converged" and rep.iterations <= 10_000
            assert is_stable_equilibrium(inst, rep.theta).stable
        pair = Instance(CoverageModel(np.full((2, 2), 0.5)), np.full(2, 0.75))
        rep = best_response_dynamics(pair, BrConfig(damping=1.0, start_point=np.ones(2)))
        assert rep.status == "cycle"


@pytest.mark.criterion(10, "single defector fares worse under MW-FED than FedAvg at level 0.25")
def test_criterion_10_defection_direction():
    with within(30.0):
        config = SimConfig(gen_easy_hard(seed=0), rounds=10, budget=0.4, factor=2.0, seed=0)
        levels = [0.01, 0.25, 0.5, 0.75, 1.0]
        curves = {alg: defection_curve(config, alg, levels, 1000) for alg in ("fedavg", "mwfed")}
        for rows in curves.values():
            fractions = [f for _, f in rows]
            assert all(a <= b for a, b in zip(fractions, fractions[1:]))
        assert dict(curves["mwfed"])[0.25] < dict(curves["fedavg"])[0.25]
        for trace in (run_fedavg(config), run_mwfed(config)):
            assert np.all(np.abs(trace.contributions.sum(axis=1) - config.budget) <= 1e-9)
            assert trace.final_satisfied == [0, 1, 2, 3]
