import hashlib

from fedgame.fedsim import SimConfig, defection_curve, run_mwfed
from fedgame.generators import gen_easy_hard
from fedgame.plotting import plot_defection, plot_price_scaling, plot_trace


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_figures_render_deterministically(tmp_path):
    inst = gen_easy_hard()
    config = SimConfig(inst, rounds=6, budget=0.4)
    trace = run_mwfed(config)
    curves = {alg: defection_curve(config, alg, [0.25, 1.0], 20) for alg in ("fedavg", "mwfed")}
    rows = [{"k": 5, "pos": 1.33, "pof": 1.25}, {"k": 10, "pos": 1.8, "pof": 1.67}]
    for suffix in ("png", "svg"):
        first, second = tmp_path / f"a.{suffix}", tmp_path / f"b.{suffix}"
        for path in (first, second):
            plot_trace(trace, inst.mu, path)
        assert first.stat().st_size > 0 and digest(first) == digest(second)
        plot_defection(curves, first)
        plot_price_scaling(rows, second)
        assert first.stat().st_size > 0 and second.stat().st_size > 0
