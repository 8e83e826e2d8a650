"""Time the Monte-Carlo sweep kernels on both backends.

Runs the intrinsic sweep and both split-evolution sweeps through the
public dispatch layer, once per backend, and prints a wall-time table.
The first numba call is warmed up outside the timed region so JIT
compilation does not pollute the numbers.

Usage:
    python benchmarks/bench_kernels.py [--samples 500] [--steps 100]
                                       [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

from adiafact import kernels
from adiafact.engine import Schedule
from adiafact.noise import NoiseModel, monte_carlo, trotter_monte_carlo

SWEEPS = (
    ("intrinsic", lambda schedule, noise, samples:
        monte_carlo(schedule, noise, samples)),
    ("trotter-plain", lambda schedule, noise, samples:
        trotter_monte_carlo(schedule, noise, samples, splitting="plain")),
    ("trotter-pulse", lambda schedule, noise, samples:
        trotter_monte_carlo(schedule, noise, samples, splitting="pulse")),
)


def time_backend(backend: str, schedule: Schedule, noise: NoiseModel,
                 samples: int, repeats: int) -> dict[str, float]:
    kernels.set_backend(backend)
    timings: dict[str, float] = {}
    for name, sweep in SWEEPS:
        sweep(schedule, noise, min(samples, 8))  # warm caches / JIT
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            report = sweep(schedule, noise, samples)
            best = min(best, time.perf_counter() - start)
        timings[name] = best
        print(f"  {name:<14s} {best * 1e3:9.1f} ms   "
              f"(final std {report.final_std:.6g})")
    return timings


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=500)
    parser.add_argument("--steps", type=int, default=100)
    parser.add_argument("--tau", type=float, default=0.05)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    schedule = Schedule(args.steps, args.tau)
    noise = NoiseModel()
    print(f"samples={args.samples} steps={args.steps} tau={args.tau} "
          f"repeats={args.repeats} (best-of)")

    results: dict[str, dict[str, float]] = {}
    for backend in ("numpy", "numba"):
        try:
            print(f"{backend}:")
            results[backend] = time_backend(backend, schedule, noise,
                                            args.samples, args.repeats)
        except Exception as exc:  # e.g. numba missing in a slim env
            print(f"  skipped ({exc})")

    if len(results) == 2:
        print("speedup (numpy / numba):")
        for name, _ in SWEEPS:
            ratio = results["numpy"][name] / results["numba"][name]
            print(f"  {name:<14s} {ratio:6.2f}x")


if __name__ == "__main__":
    main()
