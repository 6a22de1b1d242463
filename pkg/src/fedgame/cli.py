"""Command-line entry point: ``fedgame <subcommand>``.

Instances travel as JSON over stdin/stdout, so subcommands compose with
pipes, e.g. ``fedgame gen flower --b 4 | fedgame solve --objective stable-eq``.
Exit status is 0 on success, 2 on invalid input, 3 when a solver fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import generators
from .fedsim import ALGORITHMS, SimConfig, curves_to_csv, defection_curve, run
from .linear import ModelError
from .lp import LpNumericalError
from .model import evaluate, instance_to_dict, loads_instance
from .parallel import set_threads
from .prices import price_of_fairness, price_of_stability
from .solvers import (BrConfig, SolverError, best_response_dynamics, integer_grid_search, optimal_stable_eq,
                      optimal_uniform_envy_free, social_opt)
from .verify import VERDICT_TOL, verify

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3


class InputError(ValueError):
    pass


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _clean(value):
    # JSON has no infinity; emit null instead.
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _dump_json(payload) -> str:
    plain = json.loads(json.dumps(payload, default=_json_default))
    return json.dumps(_clean(plain), indent=1, allow_nan=False) + "\n"


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_instance(args):
    source = args.instance
    if source in (None, "-"):
        if sys.stdin.isatty():
            raise InputError("no instance given: pass --instance FILE or pipe JSON on stdin")
        text = sys.stdin.read()
    else:
        try:
            with open(source) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc.strerror}") from None
    return loads_instance(text)


def _parse_floats(text: str, name: str) -> np.ndarray:
    text = text.strip()
    try:
        if text.startswith("["):
            values = json.loads(text)
        else:
            values = [float(x) for x in text.split(",") if x.strip()]
        return np.asarray(values, dtype=float)
    except (ValueError, json.JSONDecodeError):
        raise InputError(f"--{name} must be comma-separated numbers or a JSON list, got {text!r}") from None


def _theta(args, instance) -> np.ndarray:
    theta = _parse_floats(args.theta, "theta")
    if theta.shape != (instance.k,):
        raise InputError(f"--theta has {theta.size} entries but the instance has {instance.k} agents")
    return theta


# ----------------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.family == "flower":
        inst = generators.gen_flower(args.b, args.variant)
    elif args.family == "pac-cycle":
        inst = generators.gen_pac_cycle(args.d, args.mu)
    elif args.family == "matching":
        inst = generators.gen_matching_k4()
    elif args.family == "random-psd":
        inst = generators.gen_random_psd(args.k, args.seed, "diagonal" if args.diag_dominant else "none")
    else:
        inst = generators.gen_easy_hard(seed=args.seed)
    _emit(args, _dump_json(instance_to_dict(inst)))
    return EXIT_OK


def cmd_eval(args) -> int:
    inst = _read_instance(args)
    theta = _theta(args, inst)
    util = evaluate(inst, theta)
    _emit(args, _dump_json({"theta": theta, "utilities": util,
                            "feasible": bool(np.all(util >= inst.mu - VERDICT_TOL))}))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _read_instance(args)
    if args.objective == "social":
        rep = social_opt(inst)
    elif args.objective == "stable-eq":
        rep = optimal_stable_eq(inst)
    elif args.objective == "envy-free":
        rep = optimal_uniform_envy_free(inst)
    else:
        rep = best_response_dynamics(inst, BrConfig(damping=args.damping, max_iterations=args.max_iterations,
                                                    start=args.start, seed=args.seed))
    _emit(args, _dump_json(rep.to_dict()))
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _read_instance(args)
    if args.search_equilibria:
        if inst.continuous:
            raise InputError("--search-equilibria needs an integer strategy space")
        search = integer_grid_search(inst)
        n_stable, n_feasible = len(search.stable), search.n_feasible
        if n_stable:
            summary = f"{n_stable} stable equilibria; {n_feasible} feasible points"
        else:
            summary = f"no stable equilibrium; {n_feasible} feasible points"
        print(summary, file=sys.stderr)
        _emit(args, _dump_json({"summary": summary, "stable": [list(p) for p in search.stable],
                                "feasible": [list(p) for p in search.feasible]}))
        return EXIT_OK
    if args.theta is None:
        raise InputError("verify needs --theta or --search-equilibria")
    theta = _theta(args, inst)
    verdict = verify(inst, theta, stable=args.stable, envy_free=args.envy_free, tol=args.tol)
    _emit(args, _dump_json(verdict.to_dict()))
    return EXIT_OK


def cmd_price(args) -> int:
    inst = _read_instance(args)
    rep = price_of_stability(inst) if args.which == "pos" else price_of_fairness(inst)
    payload = rep.to_dict()
    payload["summary"] = f"{args.which} ratio {rep.ratio:.6f}"
    _emit(args, _dump_json(payload))
    return EXIT_OK


def _sim_config(args, inst) -> SimConfig:
    return SimConfig(inst, rounds=args.rounds, budget=args.budget, factor=args.factor, seed=args.seed,
                     batch=args.batch)


def cmd_simulate(args) -> int:
    inst = _read_instance(args)
    trace = run(_sim_config(args, inst), args.alg)
    _emit(args, _dump_json(trace.to_dict()) if args.json else trace.to_csv())
    if args.figure:
        from .plotting import plot_trace
        plot_trace(trace, inst.mu, args.figure)
    return EXIT_OK


def cmd_defect(args) -> int:
    inst = _read_instance(args)
    config = _sim_config(args, inst)
    levels = _parse_floats(args.levels, "levels")
    names = ALGORITHMS if args.alg == "both" else (args.alg,)
    curves = {name: defection_curve(config, name, levels, args.trials) for name in names}
    _emit(args, _dump_json(curves) if args.json else curves_to_csv(curves))
    if args.figure:
        from .plotting import plot_defection
        plot_defection(curves, args.figure)
    return EXIT_OK


def cmd_scaling(args) -> int:
    rows = []
    for b in [int(x) for x in _parse_floats(args.b, "b")]:
        inst = generators.gen_flower(b, "linear")
        pos, pof = price_of_stability(inst), price_of_fairness(inst)
        rows.append({"b": b, "k": inst.k, "opt": pos.opt_cost, "stable_eq": pos.eq_cost, "envy_free": pof.eq_cost,
                     "pos": pos.ratio, "pof": pof.ratio, "reference": 0.4 * math.sqrt(inst.k)})
    header = list(rows[0])
    lines = [",".join(header)] + [",".join(repr(r[h]) for h in header) for r in rows]
    _emit(args, "\n".join(lines) + "\n")
    if args.figure:
        from .plotting import plot_price_scaling
        plot_price_scaling(rows, args.figure)
    return EXIT_OK


# ----------------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fedgame", description="Equilibria and fairness in contribution games.")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap on worker threads (default: FEDGAME_THREADS or all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text, instance=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--out", help="write output to this file instead of stdout")
        if instance:
            p.add_argument("--instance", help="instance JSON file; '-' or omitted reads stdin")
        return p

    gen = add("gen", cmd_gen, "generate an instance", instance=False)
    gen.add_argument("family", choices=["flower", "pac-cycle", "matching", "random-psd", "easy-hard"])
    gen.add_argument("--b", type=int, default=4, help="flower size (perfect square)")
    gen.add_argument("--variant", choices=["linear", "coverage"], default="linear")
    gen.add_argument("--d", type=int, default=1, help="pac-cycle domain parameter")
    gen.add_argument("--mu", type=float, default=0.8, help="pac-cycle base requirement")
    gen.add_argument("--k", type=int, default=3, help="random-psd agent count")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--diag-dominant", action="store_true")

    ev = add("eval", cmd_eval, "evaluate utilities at an allocation")
    ev.add_argument("--theta", required=True)

    solve = add("solve", cmd_solve, "solve for an allocation")
    solve.add_argument("--objective", choices=["social", "stable-eq", "envy-free", "best-response"],
                       required=True)
    solve.add_argument("--damping", type=float, default=0.5)
    solve.add_argument("--max-iterations", type=int, default=10_000)
    solve.add_argument("--start", choices=["zeros", "solo", "random"], default="zeros")
    solve.add_argument("--seed", type=int, default=0)

    ver = add("verify", cmd_verify, "certify an allocation")
    ver.add_argument("--theta")
    ver.add_argument("--stable", action="store_true")
    ver.add_argument("--envy-free", action="store_true")
    ver.add_argument("--search-equilibria", action="store_true",
                     help="enumerate the integer grid for stable points")
    ver.add_argument("--tol", type=float, default=VERDICT_TOL)

    price = add("price", cmd_price, "price of stability or fairness")
    price.add_argument("--which", choices=["pos", "pof"], required=True)

    for name, handler, help_text in (("simulate", cmd_simulate, "run a federated schedule"),
                                     ("defect", cmd_defect, "single-defector robustness curve")):
        p = add(name, handler, help_text)
        p.add_argument("--alg", choices=list(ALGORITHMS) + (["both"] if name == "defect" else []),
                       default="both" if name == "defect" else "mwfed")
        p.add_argument("--rounds", type=int, default=10)
        p.add_argument("--budget", type=float, default=0.4)
        p.add_argument("--factor", type=float, default=2.0)
        p.add_argument("--batch", type=float, default=None, help="floor MW-FED shares to this granularity")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true", help="JSON instead of CSV")
        p.add_argument("--figure", help="also render a figure to this path")
        if name == "defect":
            p.add_argument("--levels", default="0.01,0.25,0.5,1.0")
            p.add_argument("--trials", type=int, default=1000)

    scaling = add("scaling", cmd_scaling, "flower price scaling table", instance=False)
    scaling.add_argument("--b", default="4,9,16")
    scaling.add_argument("--figure")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    set_threads(args.threads)
    try:
        return args.handler(args)
    except (InputError, ModelError, ValueError) as exc:
        print(f"fedgame: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, LpNumericalError, RuntimeError) as exc:
        print(f"fedgame: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
