import numpy as np
import pytest

from fedgame.coverage import CoverageModel
from fedgame.generators import gen_matching_k4, gen_pac_cycle, matching_allocation
from fedgame.linear import LinearModel
from fedgame.model import INTEGER, Instance, StrategySpace, evaluate
from fedgame.verify import Verdict, is_envy_free, is_feasible_verdict, is_stable_equilibrium, verify


def test_tight_pair_is_stable(coupled_pair):
    assert is_stable_equilibrium(coupled_pair, [2 / 3, 2 / 3]).stable


def test_overpaying_pair_has_witness(coupled_pair):
    verdict = is_stable_equilibrium(coupled_pair, [1, 1])
    assert not verdict.stable and verdict.feasible
    witness = [v for v in verdict.violations if v["agent"] == 0][0]
    assert witness["kind"] == "reducible" and witness["deviation"] == pytest.approx(0.5)


def test_coverage_unit_vectors_are_stable(two_agent_coverage):
    assert is_stable_equilibrium(two_agent_coverage, [1, 0]).stable
    assert is_stable_equilibrium(two_agent_coverage, [0, 1]).stable
    midpoint = verify(two_agent_coverage, [0.5, 0.5])
    assert not midpoint.feasible and not midpoint.stable


def test_matching_is_envy_free():
    inst = gen_matching_k4()
    theta = matching_allocation(0)
    util = evaluate(inst, theta)
    assert np.allclose(util[[0, 2]], 2 / 3, atol=1e-12)
    assert np.allclose(util[[1, 3, 4, 5]], 11 / 18, atol=1e-12)
    assert is_envy_free(inst, theta).envy_free


def test_mixed_matchings_are_not_envy_free():
    inst = gen_matching_k4()
    theta = 0.9 * matching_allocation(0) + 0.1 * matching_allocation(1)
    verdict = is_envy_free(inst, theta)
    assert verdict.feasible and not verdict.envy_free
    pairs = {(v["agent"], v["swap_with"]) for v in verdict.violations}
    assert (1, 5) in pairs
    swapped = theta.copy()
    swapped[1], swapped[5] = theta[5], theta[1]
    assert evaluate(inst, swapped)[1] >= 0.6


@pytest.mark.parametrize("c", [0.3, 1.0, 7.5])
def test_constant_allocations_are_envy_free(c):
    inst = gen_matching_k4()
    assert is_envy_free(inst, np.full(6, c)).envy_free


def test_infeasible_is_neither_stable_nor_envy_free(identity_pair):
    verdict = verify(identity_pair, [1, 0.5])
    assert not verdict.feasible and not verdict.stable and not verdict.envy_free
    assert verdict.violations[0]["kind"] == "requirement"


def test_integer_decrement_stability():
    inst = gen_pac_cycle(1)
    verdict = is_stable_equilibrium(inst, [1, 1, 1])
    assert verdict.feasible and not verdict.stable
    assert is_feasible_verdict(inst, [1, 1, 0]).feasible


def test_swaps_outside_the_box_are_unavailable():
    model = LinearModel(np.array([[1.0, 0.0], [0.0, 1.0]]))
    inst = Instance(model, [1, 0], StrategySpace(INTEGER, np.array([3.0, 0.0])))
    assert is_envy_free(inst, [2, 0]).envy_free


def test_verdict_dict_and_merge():
    a = Verdict(feasible=True, stable=True)
    b = Verdict(feasible=True, envy_free=False, violations=[{"agent": 0, "kind": "envy"}])
    merged = a.merge(b)
    assert merged.stable and merged.envy_free is False and len(merged.to_dict()["violations"]) == 1


def test_explicit_tolerance_is_honoured(identity_pair):
    assert not verify(identity_pair, [1, 1 - 1e-6]).feasible
    assert verify(identity_pair, [1, 1 - 1e-6], tol=1e-5).feasible


def test_coverage_envy_uses_same_evaluator():
    inst = Instance(CoverageModel(np.array([[0.5, 0.5, 0], [0, 0.5, 0.5]])), [0.6, 0.6])
    theta = np.array([3.0, 0.5])
    verdict = is_envy_free(inst, theta)
    swapped_util = evaluate(inst, theta[::-1])[0]
    assert verdict.envy_free == (swapped_util < 0.6 - 1e-7)
