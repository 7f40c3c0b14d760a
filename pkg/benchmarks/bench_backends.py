#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

The per-frame hot path is one channel-window scan plus a 34-section pose
chain; this times both in isolation and as a combined frame-pipeline rate.

Usage: python benchmarks/bench_backends.py [--frames 2000]
"""
import argparse
import math
import time

import numpy as np

from fbgshape import _kernels_py

KERNELS = {"python": _kernels_py}
try:
    from fbgshape import _kernels_cy

    KERNELS["cython"] = _kernels_cy
except ImportError:
    print("compiled kernels not built; benchmarking the fallback only")

M, LAM, KC = 45, 3.3, 1.0 / 30.0


def make_frames(n, rng):
    frames = []
    for _ in range(n):
        curv = rng.uniform(0.0, 0.04, M)
        curv[10:21] = KC
        taus = rng.uniform(-0.3, 0.3, M)
        frames.append((curv, taus))
    return frames


def bench(fn, reps):
    best = math.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--frames", type=int, default=2000, help="frames per pipeline pass")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    frames = make_frames(args.frames, rng)
    r0 = np.ascontiguousarray(np.eye(3))
    p0 = np.zeros(3)
    rows = {}
    for name, k in KERNELS.items():
        curv, taus = frames[0]
        t_scan = bench(lambda: k.window_costs(curv, 11, KC), 5000)
        t_chain = bench(lambda: k.chain_poses(curv[11:], taus[11:], LAM, r0, p0), 2000)

        def pipeline():
            for curv, taus in frames:
                costs = k.window_costs(curv, 11, KC)
                mu = 10 + int(costs.argmin())
                k.chain_poses(curv[mu + 1 :], taus[mu + 1 :], LAM, r0, p0)

        t_pipe = bench(pipeline, 3) / args.frames
        rows[name] = (t_scan, t_chain, t_pipe)

    print(f"{'backend':<8} {'window scan':>12} {'pose chain':>12} {'frame pipeline':>15} {'frames/s':>10}")
    for name, (t_scan, t_chain, t_pipe) in rows.items():
        print(
            f"{name:<8} {t_scan*1e6:>10.2f} us {t_chain*1e6:>10.2f} us "
            f"{t_pipe*1e6:>13.2f} us {1.0/t_pipe:>10.0f}"
        )
    if len(rows) == 2:
        speedup = rows["python"][2] / rows["cython"][2]
        print(f"\ncompiled frame pipeline is {speedup:.1f}x the fallback")


if __name__ == "__main__":
    main()
