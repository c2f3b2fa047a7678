"""Benchmark the numba backend against the pure NumPy/Python fallback.

Run as ``python -m skewmorph.bench``. Each backend is timed in a fresh
subprocess (the backend is fixed per process via SKEW_BACKEND), on the same
three hot paths: batch validation, the brute-force oracle scan, and the
backtracking enumerator.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _time(fn, repeat: int = 1) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _worker(include_compile: bool) -> dict[str, float]:
    import numpy as np

    from . import _kernels
    from .enumerate import brute_force_census, clear_census_memo, enumerate_census

    results: dict[str, float] = {}
    t0 = time.perf_counter()
    _kernels.warmup()
    results["warmup"] = time.perf_counter() - t0

    mat = brute_force_census(8).matrix.astype(np.int64)
    big = np.repeat(mat, 200, axis=0)
    results["validate_1200_rows_n8"] = _time(
        lambda: _kernels.validate_rows(big), repeat=3
    )

    results["oracle_n9"] = _time(lambda: _kernels.oracle_rows(9))

    def run_enum():
        clear_census_memo()
        enumerate_census(15)
        clear_census_memo()
        enumerate_census(16)

    results["enumerate_15_and_16"] = _time(run_enum)
    if not include_compile:
        results.pop("warmup")
    return results


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="skewmorph.bench")
    parser.add_argument("--worker", choices=("numba", "python"), default=None,
                        help=argparse.SUPPRESS)
    args = parser.parse_args(argv)

    if args.worker is not None:
        print(json.dumps(_worker(include_compile=args.worker == "numba")))
        return 0

    timings: dict[str, dict[str, float]] = {}
    for backend in ("numba", "python"):
        env = dict(os.environ, SKEW_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, "-m", "skewmorph.bench", "--worker", backend],
            env=env, capture_output=True, text=True,
        )
        if proc.returncode != 0:
            print(f"{backend} worker failed:\n{proc.stderr}", file=sys.stderr)
            return 1
        timings[backend] = json.loads(proc.stdout.strip().splitlines()[-1])

    tasks = [t for t in timings["numba"] if t in timings["python"]]
    width = max(len(t) for t in tasks) + 2
    print(f"{'task':<{width}}{'numba':>12}{'python':>12}{'speedup':>10}")
    for task in tasks:
        a = timings["numba"][task]
        b = timings["python"][task]
        ratio = b / a if a > 0 else float("inf")
        print(f"{task:<{width}}{a:>11.4f}s{b:>11.4f}s{ratio:>9.1f}x")
    if "warmup" in timings["numba"]:
        print(f"\n(numba JIT warmup: {timings['numba']['warmup']:.1f}s, "
              f"cached across runs)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
