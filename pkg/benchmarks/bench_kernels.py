"""Compiled vs numpy kernels on the workloads the pipeline actually runs.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from m1bound import _kernels_py, constraints, geometry
from m1bound.constraints import TermSet

try:
    from m1bound import _kernels as compiled
except ImportError:
    compiled = None


def witness_like_termset():
    cfg = [(-0.123996, 1.946331, 0.501521), (-0.157711, 0.542869, 0.499760),
           (0.553873, -0.276937, 0.479669), (-0.424898, 0.382590, 0.490199)]
    parts = [(0.3, constraints.c1r_termset(geometry.build_triangle(geometry.TriangleSpec(*c))))
             for c in cfg]
    parts += [(-0.5, constraints.ct_termset(th)) for th in (1.851176, 1.864223, 1.911210)]
    return TermSet.combine(parts)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    ts = witness_like_termset()
    dists, weights = ts.merged
    grid = np.arange(12001) * 0.05
    scan = np.arange(1, 200001) * 1e-3  # what the verifier sweeps
    x = np.random.default_rng(0).uniform(0, 4000, 1_000_000)
    cases = [
        ("j0, 1e6 random args", lambda k: k.j0(x)),
        (f"row sampling, 12001 t x {dists.size} terms",
         lambda k: k.termset_eval(grid, ts.constant, dists, weights)),
        (f"scattered eval, 2e5 t x {dists.size} terms",
         lambda k: k.termset_eval(scan, ts.constant, dists, weights)),
        (f"uniform scan, 2e5 t x {dists.size} terms",
         lambda k: k.termset_scan(1, scan.size, 1e-3, ts.constant, dists, weights)),
    ]
    print(f"{'workload':44s} {'numpy s':>9s} {'cython s':>9s} {'speedup':>8s}")
    for name, fn in cases:
        tp = best_of(lambda: fn(_kernels_py), args.repeat)
        if compiled is None:
            print(f"{name:44s} {tp:9.4f} {'n/a':>9s}")
            continue
        tc = best_of(lambda: fn(compiled), args.repeat)
        diff = np.max(np.abs(fn(compiled) - fn(_kernels_py)))
        print(f"{name:44s} {tp:9.4f} {tc:9.4f} {tp / tc:7.2f}x   max |diff| {diff:.1e}")
    print(end_to_end(args.repeat))


def end_to_end(repeat):
    """verify_nonneg on a witness from the bundled configuration, per backend."""
    import os
    import subprocess
    import sys
    code = ("import time, m1bound; from m1bound import pipeline, serialize, witness;"
            "c = serialize.load_config(serialize.REFERENCE_CONFIG);"
            "r = pipeline.rows_from_config(c.triangles, c.angles);"
            "t0 = time.perf_counter(); rep, cert, _ = pipeline.refine_until_verified(r);"
            "t1 = time.perf_counter();"
            "print(m1bound.BACKEND, round(t1 - t0, 2), rep.verified, rep.delta_upper)")
    lines = ["full solve (bisection + refinement + verification):"]
    for backend in ("python", "cython"):
        env = dict(os.environ, M1BOUND_BACKEND=backend)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True).stdout.split()
        if out:
            lines.append(f"  {out[0]:8s} {out[1]:>7s} s   verified={out[2]}  delta={out[3]}")
    return "\n".join(lines)


if __name__ == "__main__":
    main()
