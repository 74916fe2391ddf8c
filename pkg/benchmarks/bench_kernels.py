#!/usr/bin/env python3
"""Benchmark the numba-JIT kernels against the pure-numpy fallback.

The backend is chosen at import time from ``PREFSTUDY_NO_NUMBA``, so this
script re-executes itself once with the flag set and reports both timings.

Usage: python benchmarks/bench_kernels.py [--repeat 200]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def time_call(fn, repeat):
    fn()  # warmup (JIT compilation, caches)
    start = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - start) / repeat


def run_suite(repeat):
    from prefstudy.numerics import BACKEND
    from prefstudy.numerics.kernels import (
        betainc_reg,
        jacobi_eigh_kernel,
        ols_qr_kernel,
        power_iteration_kernel,
    )

    rng = np.random.default_rng(7)
    pos = np.ascontiguousarray(np.exp(rng.normal(size=(9, 9))))
    sym = rng.normal(size=(9, 9))
    sym = np.ascontiguousarray((sym + sym.T) / 2)
    x = np.column_stack([np.ones(9), rng.normal(size=(9, 4))])
    y = rng.normal(size=9)

    results = {
        "backend": BACKEND,
        "power_iteration_9x9_us": 1e6
        * time_call(lambda: power_iteration_kernel(pos, 1e-12, 10000), repeat),
        "jacobi_eigh_9x9_us": 1e6
        * time_call(lambda: jacobi_eigh_kernel(sym, 1e-14, 64), repeat),
        "ols_qr_9x5_us": 1e6 * time_call(lambda: ols_qr_kernel(x, y), repeat),
        "betainc_us": 1e6
        * time_call(lambda: [betainc_reg(42.5, 0.5, 0.3 + 0.001 * i) for i in range(50)], repeat)
        / 50,
    }
    return results


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--json", action="store_true", help="emit one JSON object (internal)")
    args = parser.parse_args()

    if args.json:
        print(json.dumps(run_suite(args.repeat)))
        return

    mine = run_suite(args.repeat)
    env = dict(os.environ)
    env["PREFSTUDY_NO_NUMBA"] = "" if mine["backend"] == "numpy" else "1"
    if mine["backend"] == "numpy":
        env.pop("PREFSTUDY_NO_NUMBA", None)
        env["PREFSTUDY_NO_NUMBA"] = "0"
    other = json.loads(
        subprocess.run(
            [sys.executable, __file__, "--repeat", str(args.repeat), "--json"],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        ).stdout.strip().splitlines()[-1]
    )

    first, second = (mine, other) if mine["backend"] == "numba" else (other, mine)
    print(f"{'kernel':34s}{'numba (us)':>12s}{'numpy (us)':>12s}{'speedup':>9s}")
    for key in sorted(first):
        if key == "backend":
            continue
        a, b = first[key], second[key]
        print(f"{key:34s}{a:12.2f}{b:12.2f}{b / a:9.2f}x")


if __name__ == "__main__":
    main()
