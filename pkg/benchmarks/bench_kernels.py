"""Time the Givens coordinate search on both backends.

Usage::

    python benchmarks/bench_kernels.py [--repeats 3] [--steps 2000]

Each case builds the starting stack of a real roof problem (a random
two-qubit state, and a rank-4 two-qubit-by-qubit marginal), runs the same
fixed number of line searches on each backend, and reports the median wall
time, the speedup, and the difference between the final values. The numba
case is warmed up first so compilation is not timed.
"""

import argparse
import statistics
import time

import numpy as np

from qpoly import kernels, set_backend
from qpoly._backend import NUMBA_AVAILABLE
from qpoly.roof import haar_unitary, permute_columns, restart_rng
from qpoly.states import random_mixed
from qpoly.tensor import spectral_data


def roof_stack(dims, side, seed):
    rho = random_mixed(dims, seed)
    values, vectors = spectral_data(rho)
    r = len(values)
    side = rho.layout.labels[:side]
    rest = rho.layout.complement(side)
    da, dc = rho.layout.dim_of(side), rho.layout.dim_of(rest)
    scaled = np.sqrt(values)[:, None] * permute_columns(vectors, rho.layout, side + rest).T
    v = haar_unitary(r * r, restart_rng(seed, 1))[:, :r]
    return (v @ scaled).reshape(r * r, da, dc)


CASES = {
    "2x2 (N=16, 2x2 blocks)": ([2, 2], 1),
    "2x2x2 split A|B1B2 (N=64, 2x4 blocks)": ([2, 2, 2], 1),
}


def time_case(stack0, backend, steps, repeats):
    set_backend(backend)
    times, value = [], None
    for _ in range(repeats):
        stack = stack0.copy()
        track = np.eye(stack.shape[0], dtype=complex)
        start = time.perf_counter()
        value, used, _ = kernels.coordinate_search(stack, track, -1.0, steps, 1e-300)
        times.append(time.perf_counter() - start)
    return statistics.median(times), value, used


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--steps", type=int, default=2000)
    args = parser.parse_args()
    if not NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'case':40s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s} {'|dvalue|':>10s}")
    for name, (dims, side) in CASES.items():
        stack0 = roof_stack(dims, side, seed=7)
        time_case(stack0, "numba", 10, 1)  # compile
        tn, vn, used = time_case(stack0, "numba", args.steps, args.repeats)
        tp, vp, _ = time_case(stack0, "numpy", args.steps, args.repeats)
        print(f"{name:40s} {tn:10.4f} {tp:10.4f} {tp / tn:8.1f} {abs(vn - vp):10.2e}  ({used} line searches)")
    set_backend("numba")


if __name__ == "__main__":
    main()
