#!/usr/bin/env python3
"""Benchmark the jitted selection kernels against the numpy fallback.

The same comparison can be driven externally by flipping REPSEL_NUMBA;
here both paths are called directly so one process covers both.

Usage: python benchmarks/bench_kernels.py [--T 512] [--d 768] [--repeats 5]
"""

import argparse
import time

import numpy as np

from repsel.kernels import (
    _earlier_rep_max_jit,
    _earlier_rep_max_np,
    _scan_all_earlier_jit,
    _scan_all_earlier_np,
    _scan_reps_only_jit,
    _scan_reps_only_np,
)
from repsel.selector import SelectionConfig
from repsel.synth import SynthConfig, generate_trace
from repsel.trace import row_normalize


def timeit(fn, *args, repeats=5):
    fn(*args)  # warmup (and JIT compile for the numba variants)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--T", type=int, default=512)
    ap.add_argument("--d", type=int, default=768)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    trace = generate_trace(
        SynthConfig(T=args.T, d=args.d, L=2, lambda_block=0.05,
                    num_clusters=max(2, args.T // 8), cluster_spread=0.25,
                    seed=args.seed)
    )
    xhat = np.ascontiguousarray(row_normalize(trace.layers[0]).data)
    thresh = SelectionConfig(tau=0.30).threshold

    print(f"selection kernels at T={args.T}, d={args.d} (best of {args.repeats}):\n")
    pairs = [
        ("reps-only scan", _scan_reps_only_jit, _scan_reps_only_np, (xhat, thresh)),
        ("all-earlier scan", _scan_all_earlier_jit, _scan_all_earlier_np, (xhat, thresh)),
    ]
    for name, jit_fn, np_fn, fargs in pairs:
        t_jit, out_jit = timeit(jit_fn, *fargs, repeats=args.repeats)
        t_np, out_np = timeit(np_fn, *fargs, repeats=args.repeats)
        assert out_jit[0].tolist() == out_np[0].tolist(), f"{name}: paths disagree"
        faster = "numba" if t_jit < t_np else "numpy"
        print(f"  {name:<18} numba {t_jit * 1e3:8.2f} ms   numpy {t_np * 1e3:8.2f} ms"
              f"   ({faster} {max(t_jit, t_np) / min(t_jit, t_np):.1f}x faster)")

    reps, _ = out_jit[0], None
    rep_rows = np.ascontiguousarray(xhat[: max(2, args.T // 3)])
    t_jit, g_jit = timeit(_earlier_rep_max_jit, rep_rows, repeats=args.repeats)
    t_np, g_np = timeit(_earlier_rep_max_np, rep_rows, repeats=args.repeats)
    assert np.allclose(g_jit, g_np, atol=1e-9)
    faster = "numba" if t_jit < t_np else "numpy"
    print(f"  {'rep validation':<18} numba {t_jit * 1e3:8.2f} ms   numpy {t_np * 1e3:8.2f} ms"
          f"   ({faster} {max(t_jit, t_np) / min(t_jit, t_np):.1f}x faster)")


if __name__ == "__main__":
    main()
