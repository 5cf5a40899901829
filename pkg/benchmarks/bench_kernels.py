#!/usr/bin/env python3
"""Compare the jitted and interpreted kernel paths on the hot workloads.

Runs each workload in a subprocess with NUFIX_NUMBA=1 and =0 and prints a
speedup table.  The workloads mirror what the engine actually does: order
closure, capped monotone-table enumeration, capped upset enumeration, and
isomorphism search.
"""

import json
import os
import subprocess
import sys

WORKER = r"""
import json
import time

import numpy as np

from nufix import kernels

rng = np.random.RandomState(1234)


def closed_random(n, p):
    rel = np.triu(rng.rand(n, n) < p, k=1)
    return kernels.transitive_closure(rel)


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


results = {}

dense = np.triu(rng.rand(500, 500) < 0.02, k=1)
results["closure-500"] = timeit(lambda: kernels.transitive_closure(dense))

chain8 = np.triu(np.ones((8, 8), dtype=bool))
results["monotone-chain8-full"] = timeit(
    lambda: kernels.enum_monotone_tables(chain8, chain8, 7000)
)

p10 = closed_random(10, 0.25)
q10 = closed_random(10, 0.25)
results["monotone-random10-cap50k"] = timeit(
    lambda: kernels.enum_monotone_tables(p10, q10, 50000)
)

sparse36 = closed_random(36, 0.08)
results["upsets-random36-cap100k"] = timeit(
    lambda: kernels.enum_upsets(sparse36, 100000)
)

grid = np.kron(chain8[:4, :4], chain8[:4, :4])
perm = rng.permutation(16)
shuffled = grid[perm][:, perm]
results["iso-grid4x4"] = timeit(
    lambda: kernels.find_isomorphism(grid, shuffled), repeat=5
)

kernels.warm_up()
print(json.dumps({"backend": kernels.KERNEL_BACKEND, "results": results}))
"""


def run(numba_flag):
    env = {**os.environ, "NUFIX_NUMBA": numba_flag}
    out = subprocess.run(
        [sys.executable, "-c", WORKER], capture_output=True, text=True, env=env
    )
    if out.returncode != 0:
        raise SystemExit(f"worker failed:\n{out.stderr}")
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    jit = run("1")
    py = run("0")
    print(f"jit backend: {jit['backend']}, fallback backend: {py['backend']}")
    width = max(len(k) for k in jit["results"])
    print(f"{'workload'.ljust(width)}  {'numba':>10}  {'python':>10}  {'speedup':>8}")
    for name in jit["results"]:
        a = jit["results"][name]
        b = py["results"][name]
        print(f"{name.ljust(width)}  {a:>9.4f}s  {b:>9.4f}s  {b / a:>7.1f}x")


if __name__ == "__main__":
    main()
