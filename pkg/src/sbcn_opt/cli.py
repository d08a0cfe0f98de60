"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 bad input or infeasible problem.
"""
from __future__ import annotations

import argparse
import os
import platform
import random
import statistics
import sys
import time
from contextlib import contextmanager

from . import __version__, kernels
from .all_initial import solve_all
from .io import (ProblemError, graph_to_dict, load_law, load_model, load_problem, parse_state, write_dot, write_json,
                 write_model, write_trajectory)
from .mmc import NoCycleError, solve_mmc
from .ostg import InfeasibleError, ValidationError, build_ostg
from .policy import FreeStateError, simulate, synthesize
from .rules import RuleError

USER_ERRORS = (ProblemError, RuleError, ValidationError, InfeasibleError, FreeStateError, NoCycleError,
               FileNotFoundError, IsADirectoryError)


class Timer:
    def __init__(self):
        self.phases: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        yield
        self.phases[name] = self.phases.get(name, 0.0) + time.perf_counter() - t0


def _seq(N: int, states) -> str:
    return f"δ_{N}⟨{','.join(map(str, states))}⟩"


def _out_path(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _load(args, timer: Timer | None = None):
    timer = timer or Timer()
    with timer.phase("compile"):
        inst = load_problem(args.problem)
        if getattr(args, "model", None):
            inst = type(inst)(load_model(args.model), inst.constraints, inst.cost, inst.x0)
    if getattr(args, "x0", None) is not None:
        inst = inst.with_x0(parse_state(args.x0, inst.model.n, "--x0"))
    return inst


def _pipeline(inst, timer: Timer):
    with timer.phase("ostg"):
        graph = build_ostg(inst)
    with timer.phase("karp"):
        res, table = solve_mmc(graph)
    with timer.phase("synthesis"):
        law = synthesize(graph, res)
    return graph, res, table, law


# --- subcommands -------------------------------------------------------------

def cmd_compile(args) -> int:
    model = load_model(args.model)
    print(f"n={model.n} m={model.m} z={model.z} N={model.N} M={model.M}")
    if args.out:
        path = _out_path(args, "model.json")
        with open(path, "w", encoding="utf-8") as fh:
            write_model(model, fh)
        print(f"wrote {path}")
    elif model.N <= 64:
        for l, mat in enumerate(model.L, start=1):
            print(f"L_{l} = δ_{mat.rows}[{' '.join(map(str, mat.to_list()))}]")
    return 0


def cmd_solve(args) -> int:
    timer = Timer()
    inst = _load(args, timer)
    graph, res, table, law = _pipeline(inst, timer)
    N = inst.model.N
    print(f"mu* = {res.mu_star:g}")
    print(f"OSTG: {graph.n_vertices} vertices, {graph.n_edges} edges, {len(graph.pruned)} pruned")
    print(f"v* = {res.v_star}, k* = {res.k_star}, alpha = {res.alpha}, beta = {res.beta}")
    print(f"cycle {_seq(N, res.cycle)}")
    print(f"transient {_seq(N, res.transient)} (cycle entered at step {res.alpha})")
    if args.out:
        formats = set(args.format or ["json"])
        bundle = {
            "mu_star": res.mu_star, "v_star": res.v_star, "k_star": res.k_star,
            "F_n_v_star": table.f(table.n, res.v_star), "path": res.path,
            "alpha": res.alpha, "beta": res.beta, "cycle": res.cycle, "transient": res.transient,
            "n_vertices": graph.n_vertices, "n_edges": graph.n_edges, "pruned": len(graph.pruned),
            "law": law.to_dict(),
        }
        with open(_out_path(args, "solution.json"), "w", encoding="utf-8") as fh:
            write_json(bundle, fh)
        with open(_out_path(args, "policy.json"), "w", encoding="utf-8") as fh:
            write_json(law.to_dict(), fh)
        if "json" in formats:
            with open(_out_path(args, "ostg.json"), "w", encoding="utf-8") as fh:
                write_json(graph_to_dict(graph), fh)
        if "dot" in formats:
            with open(_out_path(args, "ostg.dot"), "w", encoding="utf-8") as fh:
                write_dot(graph, fh)
        if "csv" in formats:
            with open(_out_path(args, "karp.csv"), "w", encoding="utf-8") as fh:
                table.write_csv(fh)
        if args.timing:
            with open(_out_path(args, "timing.json"), "w", encoding="utf-8") as fh:
                write_json({"backend": kernels.BACKEND, "seconds": timer.phases}, fh)
    if args.timing:
        _print_phases({k: [v] for k, v in timer.phases.items()})
    return 0


def cmd_solve_all(args) -> int:
    inst = _load(args)
    sol = solve_all(inst)
    print(f"{len(sol.states)} states solved in {sol.K} iterations, {len(sol.graph.pruned)} pruned")
    for it in sol.iterations:
        print(f"  law {it.law_id}: mu* = {it.mmc.mu_star:g}, cycle {_seq(inst.model.N, it.mmc.cycle)}, "
              f"{len(it.eliminated)} states")
    if args.out:
        path = _out_path(args, "all_states.json")
        with open(path, "w", encoding="utf-8") as fh:
            write_json(sol.to_dict(), fh)
        print(f"wrote {path}")
    return 0


def cmd_simulate(args) -> int:
    inst = _load(args)
    if args.law:
        law = load_law(args.law)
    else:
        law = _pipeline(inst, Timer())[3]
    traj = simulate(inst, law, args.horizon)
    if args.out:
        path = args.out if args.out.endswith(".csv") else _out_path(args, "trajectory.csv")
        with open(path, "w", encoding="utf-8") as fh:
            write_trajectory(traj, inst.model.n, fh)
    else:
        write_trajectory(traj, inst.model.n, sys.stdout)
    return 0


def cmd_export_graph(args) -> int:
    inst = _load(args)
    graph = build_ostg(inst)
    fmt = (args.format or ["dot"])[-1]
    if fmt == "csv":
        raise ProblemError("export-graph supports dot or json")
    fh = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        if fmt == "dot":
            write_dot(graph, fh)
        else:
            write_json(graph_to_dict(graph), fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _print_phases(samples: dict[str, list[float]]) -> None:
    print(f"{'phase':<10} {'median ms':>10} {'min ms':>10} {'max ms':>10}")
    for name, vals in samples.items():
        print(f"{name:<10} {1e3 * statistics.median(vals):>10.3f} {1e3 * min(vals):>10.3f} "
              f"{1e3 * max(vals):>10.3f}")


def cmd_bench(args) -> int:
    rng = random.Random(args.seed) if args.seed is not None else None
    samples: dict[str, list[float]] = {p: [] for p in ("compile", "ostg", "karp", "synthesis", "total")}
    base = _load(args)
    starts = base.constraints.states().tolist()
    print(f"# sbcn-opt {__version__}, backend={kernels.BACKEND}, python {platform.python_version()}, "
          f"{platform.machine()} {platform.system()}")
    for r in range(args.repeats):
        timer = Timer()
        inst = _load(args, timer)
        if rng is not None:
            inst = inst.with_x0(rng.choice(starts))
        try:
            _pipeline(inst, timer)
        except InfeasibleError:
            print(f"# repeat {r}: x0 = {inst.x0} infeasible, skipped")
            continue
        for name, val in timer.phases.items():
            samples[name].append(val)
        samples["total"].append(sum(timer.phases.values()))
    if not samples["total"]:
        raise InfeasibleError("no feasible repeat")
    print(f"# {len(samples['total'])} runs, x0 = {'random' if rng else base.x0}")
    _print_phases(samples)
    return 0


# --- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbcn-opt", description="Average-cost optimal control of "
                                     "switched Boolean control networks.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_args(p, horizon=False):
        p.add_argument("--problem", required=True, help="problem JSON file")
        p.add_argument("--model", help="override the problem's model (rule file or compiled JSON)")
        p.add_argument("--x0", help="override the initial state (index or bit string)")
        p.add_argument("--out", help="output directory (or file for export-graph/simulate)")
        p.add_argument("--format", action="append", choices=["dot", "json", "csv"])
        p.add_argument("--timing", action="store_true", help="report per-phase wall-clock times")
        if horizon:
            p.add_argument("-T", "--horizon", type=int, required=True)

    p = sub.add_parser("compile", help="compile a rule file to its algebraic form")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("solve", help="optimal cycle and feedback law from x0")
    problem_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("solve-all", help="optimal laws for every admissible initial state")
    problem_args(p)
    p.set_defaults(func=cmd_solve_all)

    p = sub.add_parser("simulate", help="closed-loop trajectory as CSV")
    problem_args(p, horizon=True)
    p.add_argument("--law", help="policy JSON (default: solve first)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="time each pipeline phase")
    problem_args(p)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, help="draw a random admissible x0 per repeat")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-graph", help="write the OSTG as DOT or JSON")
    problem_args(p)
    p.set_defaults(func=cmd_export_graph)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        for msg in exc.errors:
            print(f"error: {msg}", file=sys.stderr)
        return 2
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
