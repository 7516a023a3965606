"""Compare the compiled kernels with the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each workload is run under every available backend; the solvers are
deterministic given the seed, so the outputs are also checked for equality.
"""

import argparse
import random
import time

from flawwalk import kernels
from flawwalk.aec import aec_solve, random_degenerate_graph
from flawwalk.sat import random_kcnf, solve_sat


def sat_workload():
    out = []
    for seed in range(10):
        cnf = random_kcnf(400, 1000, 3, random.Random(seed))
        out.append(solve_sat(cnf, seed=seed, max_steps=200_000).steps)
    return out


def aec_workload():
    out = []
    for seed in range(6):
        g = random_degenerate_graph(300, 3, 12, random.Random(seed))
        # a small palette forces the walk to do real work
        out.append(aec_solve(g, seed=seed, q=4).steps)
    return out


WORKLOADS = {"sat 3-cnf n=400 m=1000": sat_workload, "aec n=300 d=3 D=12 q=4": aec_workload}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    before = kernels.BACKEND
    print(f"backends: {', '.join(backends)}")
    try:
        for label, fn in WORKLOADS.items():
            times, outputs = {}, {}
            for name in backends:
                kernels.use_backend(name)
                best = float("inf")
                for _ in range(args.repeat):
                    t0 = time.perf_counter()
                    outputs[name] = fn()
                    best = min(best, time.perf_counter() - t0)
                times[name] = best
            same = len({tuple(v) for v in outputs.values()}) == 1
            row = "  ".join(f"{n}={t:.3f}s" for n, t in times.items())
            if "cython" in times and "python" in times:
                row += f"  speedup={times['python'] / times['cython']:.2f}x"
            print(f"{label:28s} {row}  identical={same}")
    finally:
        kernels.use_backend(before)


if __name__ == "__main__":
    main()
