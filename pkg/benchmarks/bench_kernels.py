"""Benchmark the numba kernels against the pure-numpy fallbacks.

Runs both implementations of the tensor contraction (the inner loop of every
exact evaluator) and of the jump-chain simulator, and prints a timing table.
Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from halfline_bethe import _kernels
from halfline_bethe._kernels import (PAIR_ORDER, contract_numba, contract_numpy,
                                     _gillespie_hits_py)


def _time(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_contract(quick: bool):
    rng = np.random.default_rng(7)
    cases = [(2, 128), (2, 512), (3, 64), (3, 192)]
    if not quick:
        cases += [(3, 384), (4, 48)]
    print(f"{'kernel':>18} {'N':>3} {'M':>5} {'numpy [ms]':>12} "
          f"{'numba [ms]':>12} {'ratio':>7}")
    for n, m in cases:
        vectors = [rng.normal(size=m) + 1j * rng.normal(size=m)
                   for _ in range(n)]
        mats = [np.ascontiguousarray(rng.normal(size=(m, m))
                                     + 1j * rng.normal(size=(m, m)))
                for _ in PAIR_ORDER[n]]
        a = contract_numpy(vectors, mats)
        b = contract_numba(vectors, mats)  # also triggers compilation
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))
        t_np = _time(contract_numpy, vectors, mats)
        t_nb = _time(contract_numba, vectors, mats)
        print(f"{'contract':>18} {n:>3} {m:>5} {1e3 * t_np:>12.3f} "
              f"{1e3 * t_nb:>12.3f} {t_np / t_nb:>7.2f}")


def bench_gillespie(quick: bool):
    y = np.array([0, 2], dtype=np.int64)
    x = np.array([1, 3], dtype=np.int64)
    trials = 20_000 if quick else 100_000
    args = (y, x, 1.0, 0.4, 0.6, True, trials, 12345)
    hits_nb = _kernels._gillespie_hits_nb(*args)
    hits_py = _gillespie_hits_py(*args)
    assert hits_nb == hits_py  # identical SplitMix64 substreams
    t_py = _time(_gillespie_hits_py, *args, repeat=2)
    t_nb = _time(_kernels._gillespie_hits_nb, *args, repeat=2)
    print(f"{'gillespie':>18} {2:>3} {trials:>5} {1e3 * t_py:>12.1f} "
          f"{1e3 * t_nb:>12.1f} {t_py / t_nb:>7.1f}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print("ratio > 1 means the numba path is faster\n")
    bench_contract(args.quick)
    bench_gillespie(args.quick)
    print("\nnote: the numpy contraction is BLAS-backed and can win at large "
          "grids;\nset HALFLINE_BETHE_PURE_NUMPY=1 to make the library use it.")


if __name__ == "__main__":
    main()
