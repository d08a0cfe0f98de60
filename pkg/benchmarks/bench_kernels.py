"""Compare the compiled and pure-Python Karp kernels.

Usage: python3 benchmarks/bench_kernels.py [--sizes 100 200 400] [--degree 4] [--repeats 5]
"""
import argparse
import random
import statistics
import time

from sbcn_opt import kernels
from sbcn_opt.io import load_problem
from sbcn_opt.mmc import karp_dp, min_mean
from sbcn_opt.ostg import Ostg, build_ostg


def ring_graph(rng, n, d):
    edges = [(v, w, rng.uniform(-10, 10)) for v in range(1, n + 1) for w in rng.sample(range(1, n + 1), d)]
    edges += [(v, v % n + 1, 0.0) for v in range(1, n + 1)]
    return Ostg.from_edges(edges, x0=1)


def time_backend(graph, backend, repeats):
    runs = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        min_mean(karp_dp(graph, backend=backend), backend=backend)
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--problem", help="also time the OSTG of this problem file")
    args = ap.parse_args()

    backends = sorted(kernels.BACKENDS)
    rng = random.Random(args.seed)
    cases = [(f"random n={n} d={args.degree}", ring_graph(rng, n, args.degree)) for n in args.sizes]
    if args.problem:
        cases.append((args.problem, build_ostg(load_problem(args.problem))))

    print(f"{'graph':<32}" + "".join(f"{b + ' ms':>14}" for b in backends) + f"{'speedup':>10}")
    for name, g in cases:
        t = {b: time_backend(g, b, args.repeats) for b in backends}
        speed = f"{t['python'] / t['cython']:>9.1f}x" if "cython" in t else f"{'n/a':>10}"
        print(f"{name:<32}" + "".join(f"{1e3 * t[b]:>14.2f}" for b in backends) + speed)


if __name__ == "__main__":
    main()
