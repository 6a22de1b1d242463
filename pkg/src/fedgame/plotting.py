"""Figure rendering for simulation traces, defection curves and price scaling."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "fedgame"
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path) -> None:
    fig.tight_layout()
    # Fixed metadata keeps repeated renders byte-identical.
    suffix = str(path).rsplit(".", 1)[-1].lower()
    metadata = {"png": {"Software": None}, "svg": {"Date": None}, "pdf": {"CreationDate": None}}.get(suffix)
    fig.savefig(path, dpi=120, metadata=metadata)
    plt.close(fig)


def plot_trace(trace, mu, path) -> None:
    """Cumulative contribution and utility per agent across rounds."""
    rounds = np.arange(1, trace.rounds + 1)
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    for i in range(trace.cumulative.shape[1]):
        left.plot(rounds, trace.cumulative[:, i], label=f"agent {i}")
        line, = right.plot(rounds, trace.utilities[:, i])
        right.axhline(mu[i], color=line.get_color(), linestyle=":", linewidth=0.8)
    left.set_xlabel("round")
    left.set_ylabel("cumulative contribution")
    right.set_xlabel("round")
    right.set_ylabel("utility (dotted: requirement)")
    left.legend(fontsize="small")
    fig.suptitle(trace.algorithm)
    _save(fig, path)


def plot_defection(curves: dict, path) -> None:
    """Grouped bars: fraction of defectors still satisfied per defection level."""
    names = list(curves)
    levels = [lv for lv, _ in curves[names[0]]]
    x = np.arange(len(levels))
    width = 0.8 / len(names)
    fig, ax = plt.subplots(figsize=(6, 4))
    for n, name in enumerate(names):
        fractions = [fr for _, fr in curves[name]]
        ax.bar(x + (n - (len(names) - 1) / 2) * width, fractions, width, label=name)
    ax.set_xticks(x, [f"{lv:g}" for lv in levels])
    ax.set_xlabel("defection level (fraction of prescribed contribution)")
    ax.set_ylabel("fraction satisfied")
    ax.set_ylim(0, 1.05)
    ax.legend()
    _save(fig, path)


def plot_price_scaling(rows: list, path) -> None:
    """Price ratios against agent count with a ``0.4 sqrt(k)`` reference curve."""
    k = np.array([r["k"] for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(k, [r["pos"] for r in rows], "o-", label="PoS")
    ax.plot(k, [r["pof"] for r in rows], "s-", label="PoF")
    ax.plot(k, 0.4 * np.sqrt(k), "k--", label="0.4 sqrt(k)")
    ax.set_xlabel("agents k")
    ax.set_ylabel("ratio")
    ax.legend()
    _save(fig, path)
