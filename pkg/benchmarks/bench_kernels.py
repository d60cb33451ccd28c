"""Compare the compiled and numpy lattice-reduction kernels.

Run with ``python3 benchmarks/bench_kernels.py``.  Each case reduces the same
matrix with both backends, checks that the pivot rows and the logged column
operations are identical, and prints the best wall time of a few repetitions.
Cases whose entries outgrow int64 rerun on Python integers in both backends;
they are marked ``(exact)`` and mostly measure that shared fallback.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from bscat.berstein import LensProduct
from bscat.cohomology import cochain_differential
from bscat.complexes import periodic_resolution
from bscat.groupring import aug_ideal, tensor_power
from bscat.kernels import available_backends, reduce_columns


def cases():
    rng = np.random.default_rng(7)
    yield "sparse random 200x300", (rng.random((200, 300)) < 0.02) * rng.integers(-3, 4, (200, 300))
    W = periodic_resolution(4, 6, homotopy=None)
    yield "delta_4 of W(4), I(4)^5", cochain_differential(W, tensor_power(aug_ideal(4), 5), 4)
    P = LensProduct.build(3, 2, 3)
    yield "delta_3 on L(2,3) x L(3,3), I(6)^4", cochain_differential(P.L, tensor_power(aug_ideal(6), 4), 3)


def bench(A, backend, reps):
    best = float("inf")
    for _ in range(reps):
        t = time.perf_counter()
        out = reduce_columns(A.T, track=True, backend=backend)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'case':44s} " + " ".join(f"{b:>12s}" for b in backends) + "   speedup")
    for name, A in cases():
        A = np.asarray(A, dtype=np.int64)
        times, outs = [], []
        for b in backends:
            t, out = bench(A, b, args.reps)
            times.append(t)
            outs.append(out)
        _, lows0, ops0, _ = outs[0]
        agree = all(np.array_equal(lows0, lows) and np.array_equal(ops0, ops) for _, lows, ops, _ in outs[1:])
        label = name + ("  (exact)" if outs[0][0].dtype == object else "")
        speed = f"{times[-1] / times[0]:8.1f}x" if len(times) == 2 else "     n/a"
        print(f"{label:44s} " + " ".join(f"{t:11.4f}s" for t in times) + f"  {speed}"
              + ("" if agree else "  RESULTS DIFFER"))


if __name__ == "__main__":
    main()
