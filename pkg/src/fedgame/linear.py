"""Linear (random discovery) utilities: u(theta) = W @ theta."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

SYMMETRY_TOL = 1e-12
DIAGONAL_TOL = 1e-12
PSD_TOL = -1e-8


class ModelError(ValueError):
    """Raised when a utility model fails validation."""


@dataclass(frozen=True)
class LinearModel:
    """Linear utilities with interaction matrix ``W``.

    ``W[i, j]`` is the effect of one unit of agent ``j``'s effort on agent
    ``i``'s utility.

    Attributes:
        W: k x k matrix with entries in [0, 1].
        canonical: True when the diagonal is all ones.
        psd: False when the smallest eigenvalue is below -1e-8. Solvers that
            rely on convexity of the stability constraint read this flag.
    """

    W: np.ndarray
    canonical: bool = field(init=False)
    psd: bool = field(init=False)

    def __post_init__(self):
        W = np.array(self.W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ModelError(f"W must be square, got shape {W.shape}")
        if not np.all(np.isfinite(W)):
            raise ModelError("W has non-finite entries")
        if np.any(W < 0):
            raise ModelError("W has negative entries")
        if np.any(np.diag(W) <= 0):
            raise ModelError("W has a non-positive diagonal entry; that agent cannot help herself")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "canonical", bool(np.all(np.abs(np.diag(W) - 1.0) <= DIAGONAL_TOL)))
        psd = True
        if np.allclose(W, W.T, atol=SYMMETRY_TOL, rtol=0):
            psd = bool(np.linalg.eigvalsh(W).min() >= PSD_TOL)
        else:
            psd = False
        if not psd:
            warnings.warn("W is not symmetric PSD; the convex stable-equilibrium program does not apply",
                          stacklevel=3)
        object.__setattr__(self, "psd", psd)

    @property
    def k(self) -> int:
        return self.W.shape[0]

    @property
    def symmetric(self) -> bool:
        return bool(np.allclose(self.W, self.W.T, atol=SYMMETRY_TOL, rtol=0))


def eval_linear(model: LinearModel, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (model.k,):
        raise ModelError(f"theta has shape {theta.shape}, expected ({model.k},)")
    return model.W @ theta


def from_discovery(Q) -> LinearModel:
    """Build the discovery model ``W = Q Q^T`` from per-agent distributions.

    Args:
        Q: k x n nonnegative matrix whose rows are probability vectors.

    Returns:
        LinearModel with ``W_ii = ||q_i||_2^2``; not canonical unless each
        row is a point mass.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2:
        raise ModelError("Q must be a matrix")
    if np.any(Q < 0):
        raise ModelError("Q has negative entries")
    sums = Q.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        bad = int(np.argmax(np.abs(sums - 1.0)))
        raise ModelError(f"row {bad} of Q sums to {sums[bad]!r}, expected 1")
    W = Q @ Q.T
    # QQ^T is symmetric in exact arithmetic; remove rounding asymmetry.
    return LinearModel(0.5 * (W + W.T))


def is_diagonally_dominant(model: LinearModel) -> bool:
    W = model.W
    off = W.sum(axis=1) - np.diag(W)
    return bool(np.all(off < np.diag(W)))


def best_response_linear(model: LinearModel, mu: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Componentwise minimal own contribution restoring each constraint."""
    W = model.W
    diag = np.diag(W)
    others = W @ theta - diag * theta
    return np.maximum(0.0, (mu - others) / diag)
