#!/usr/bin/env python3
"""Benchmark: compiled pair-op kernel vs. the pure-Python backends.

Times the deduplicated pairwise sumset/product-set kernel on three input
shapes (structured grid, random box, 1-D interval) across sizes, checks that
every backend returns identical output, and prints the speedups.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 100,200,400] [--repeat 3]
"""

import argparse
import random
import time

from sumprod import _kernels_py, kernels
from sumprod.kernels import OP_ADD, OP_MUL


def grid_rows(n):
    side = max(2, int(n**0.5))
    rows = [(x, y) for x in range(side) for y in range(side)]
    return rows[:n]


def random_rows(n, seed=0):
    rng = random.Random(seed)
    return sorted({(rng.randint(-n, n), rng.randint(-n, n)) for _ in range(2 * n)})[:n]


def interval_rows(n):
    return [(i,) for i in range(1, n + 1)]


SHAPES = [
    ("grid 2d", grid_rows),
    ("random 2d", random_rows),
    ("interval 1d", interval_rows),
]


def time_call(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="100,200,400")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    info = kernels.backend_info()
    print(f"compiled kernel available: {info['compiled']}")
    header = (
        f"{'shape':>12} {'n':>5} {'op':>4} {'pairs':>9} "
        f"{'py-hash':>9} {'py-merge':>9} {'compiled':>9} {'speedup':>8}"
    )
    print(header)
    print("-" * len(header))

    for shape_name, make in SHAPES:
        for n in sizes:
            rows = make(n)
            dim = len(rows[0])
            for op, op_name in ((OP_ADD, "add"), (OP_MUL, "mul")):
                t_hash, r_hash = time_call(
                    lambda: _kernels_py.pair_op_hash(rows, rows, op), args.repeat
                )
                t_merge, r_merge = time_call(
                    lambda: _kernels_py.pair_op_merge(rows, rows, op), args.repeat
                )
                assert r_hash == r_merge, "backend outputs differ"
                if info["compiled"]:
                    from sumprod import _kernels_c

                    t_c, r_c = time_call(
                        lambda: _kernels_c.pair_op_int64(rows, rows, dim, op),
                        args.repeat,
                    )
                    assert r_c == r_hash, "compiled output differs"
                    c_text = f"{t_c:9.4f}"
                    speedup = f"{min(t_hash, t_merge) / t_c:7.1f}x"
                else:
                    c_text, speedup = "      --", "     --"
                print(
                    f"{shape_name:>12} {len(rows):>5} {op_name:>4} "
                    f"{len(rows)**2:>9} {t_hash:9.4f} {t_merge:9.4f} "
                    f"{c_text} {speedup}"
                )


if __name__ == "__main__":
    main()
