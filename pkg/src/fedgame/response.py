"""The best-response map shared by the solvers and the verifier."""
from __future__ import annotations

import numpy as np

from .coverage import CoverageModel, best_response_coverage
from .linear import LinearModel, ModelError, best_response_linear
from .model import Instance


def best_response_step(instance: Instance, theta) -> np.ndarray:
    """Apply the best-response map ``f`` once.

    ``f_i(theta)`` is the least contribution agent ``i`` needs to meet its
    requirement when every other agent keeps its current contribution.
    Only continuous linear and coverage games have this map.
    """
    theta = np.asarray(theta, dtype=float)
    model = instance.model
    if not instance.continuous:
        raise ModelError("best responses need a continuous strategy space")
    if isinstance(model, LinearModel):
        return best_response_linear(model, instance.mu, theta)
    if isinstance(model, CoverageModel):
        return np.array([best_response_coverage(model, float(instance.mu[i]), i, theta)
                         for i in range(instance.k)])
    raise ModelError(f"no best-response map for {type(model).__name__}")
