"""Compiled vs. pure-Python solver kernels on identical inputs.

    python benchmarks/bench_kernels.py [--repeats 5]

Prints per-kernel wall times and checks that both paths agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from jtlab import _kernels
from jtlab.approximation import Subspace
from jtlab.factors import parse_factor
from jtlab.linalg import realify
from jtlab.sampling import random_element


def _timeit(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _case(shorthand: str, rng):
    f = parse_factor(shorthand)
    x = random_element(f, rng)
    V = Subspace(f, [random_element(f, rng)])
    starts = np.zeros((8, 2 * V.dim))
    starts[1] = realify(V.coordinates(x))
    starts[2:] = rng.standard_normal((6, 2 * V.dim))
    return x.coords, np.ascontiguousarray(V.V), f.blocks, starts


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)
    if not _kernels.USE_NUMBA:
        print("numba disabled (JTLAB_NO_NUMBA set or numba missing); nothing to compare")
        return 0
    rng = np.random.default_rng(0)
    print(f"{'case':<22}{'kernel':<16}{'numba [ms]':>12}{'pure [ms]':>12}{'speedup':>10}  agree")
    for shorthand in ("rect:2,2", "rect:2,3", "spin:6", "sum:3*rect:1,2"):
        x, V, B, starts = _case(shorthand, rng)
        args_ms = (starts, 0.2, x, V, B, 4000, 1e-11, 1e-14, 6)
        _kernels.multistart(*args_ms)  # compile outside the timing
        C = rng.standard_normal((2000, x.size)) + 1j * rng.standard_normal((2000, x.size))
        _kernels.batch_block_norm(C, B)
        jobs = {
            "multistart": (lambda: _kernels.multistart(*args_ms),
                           lambda: _kernels.pure(_kernels.multistart)(*args_ms)),
            "batch_norm": (lambda: _kernels.batch_block_norm(C, B),
                           lambda: _kernels.pure(_kernels.batch_block_norm)(C, B)),
        }
        for name, (fast, slow) in jobs.items():
            tf, of = _timeit(fast, args.repeats)
            ts, os_ = _timeit(slow, max(1, args.repeats // 2))
            if name == "multistart":
                agree = np.allclose(of[1], os_[1], atol=1e-9)
            else:
                agree = np.allclose(of, os_, rtol=1e-12)
            print(f"{shorthand:<22}{name:<16}{1e3 * tf:>12.2f}{1e3 * ts:>12.1f}{ts / tf:>10.1f}  {agree}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
