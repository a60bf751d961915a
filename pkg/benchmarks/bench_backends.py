"""Throughput comparison of the compiled kernels vs the numpy fallback.

Steps a fixed smooth-data problem at several spatial sizes and reports steps
per second for each available backend.  Usage::

    python benchmarks/bench_backends.py [--sizes 64 256 1024 4096] [--steps 400]
"""

import argparse
import time

import numpy as np

from dplheat import (
    AbcStepCoefficients,
    Grid,
    HomogenizedProblem,
    PadeAbc,
    available_backends,
    get_backend,
    init_state,
)
from dplheat.stepping import advance


def make_problem(M_s: int, n_steps: int):
    x_r = 4.0
    hp = HomogenizedProblem(
        a=1.0, b=0.2, K=1.0, x_r=x_r, D=1.0,
        F=lambda x, t: np.sin(2.0 * np.asarray(x)) * np.cos(3.0 * t),
        xi1=lambda x: np.sin(np.pi * np.asarray(x) / x_r),
        eta1=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        Q=lambda t: 0.1 * np.cos(t), R=lambda t: 0.1 * np.sin(t),
        phi=lambda t: 0.0,
    )
    grid = Grid(x_r=x_r, D=1.0, M_s=M_s, M_t=n_steps)
    pade = PadeAbc.make(5, 2.4)
    return hp, grid, pade


def bench(backend_name: str, M_s: int, n_steps: int, repeat: int) -> float:
    hp, grid, pade = make_problem(M_s, n_steps)
    kern = get_backend(backend_name)
    coeffs = AbcStepCoefficients.build(hp, grid, pade)
    best = float("inf")
    for _ in range(repeat):
        state = init_state(hp, grid, pade)
        t0 = time.perf_counter()
        for _ in range(n_steps):
            state = advance(state, hp, grid, pade, coeffs, backend=kern)
        best = min(best, time.perf_counter() - t0)
    assert np.all(np.isfinite(state.T))
    return n_steps / best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[64, 256, 1024, 4096, 16384])
    parser.add_argument("--steps", type=int, default=400)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = available_backends()
    header = f"{'M_s':>8} " + " ".join(f"{b + ' steps/s':>18}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)
    for M_s in args.sizes:
        rates = [bench(b, M_s, args.steps, args.repeat) for b in backends]
        line = f"{M_s:>8} " + " ".join(f"{r:>18.0f}" for r in rates)
        if len(rates) == 2:
            line += f" {rates[1] / rates[0]:>8.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
