"""Compare the compiled and pure-Python RK34Q8 loops.

    python benchmarks/bench_backends.py [--t-end 200] [--repeat 3]

Both backends run the same pendulum configuration; the script checks that
their trajectories are bit-identical and reports time per accepted node.
"""

import argparse
import time

import numpy as np

from rkq.controller import ToleranceSpec
from rkq.engine import COMPILED_AVAILABLE, RunConfig, integrate
from rkq.problem import pendulum_problem


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=200.0)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--full", action="store_true", help="also time the 4000-unit run")
    args = ap.parse_args()

    prob = pendulum_problem()
    cfg = RunConfig(t_end=args.t_end, tolerance=ToleranceSpec(1e-6))
    backends = ["python"] + (["compiled"] if COMPILED_AVAILABLE else [])
    results = {}
    for be in backends:
        results[be] = best_of(lambda: integrate(prob, cfg, backend=be), args.repeat)

    print(f"pendulum, t_end={args.t_end:g}, delta=1e-6")
    print(f"{'backend':<10}{'nodes':>8}{'seconds':>10}{'us/node':>10}")
    for be, (sec, traj) in results.items():
        print(f"{be:<10}{len(traj):>8}{sec:>10.3f}{1e6 * sec / len(traj):>10.1f}")
    if len(results) == 2:
        a, b = results["python"][1], results["compiled"][1]
        same = all(np.array_equal(getattr(a, k), getattr(b, k))
                   for k in ("t", "h", "y34", "y8", "eps8", "delta8", "quenched"))
        print(f"speedup: {results['python'][0] / results['compiled'][0]:.0f}x, "
              f"bit-identical: {same}")
    else:
        print("compiled kernel not built; only the Python loop was timed")
    if args.full:
        full = RunConfig(t_end=4000.0, tolerance=ToleranceSpec(1e-6))
        sec, traj = best_of(lambda: integrate(prob, full), 1)
        print(f"full run ({traj.backend}): {len(traj)} nodes in {sec:.2f}s")


if __name__ == "__main__":
    main()
