"""Compare the compiled and pure-Python Jacobi kernels against numpy.linalg.eigh.

Usage::

    python3 benchmarks/bench_jacobi.py [--sizes 2,4,8,16,32] [--repeat 20]

Prints median time per call and the worst reconstruction residual
``||A V - V diag(w)||`` for each backend and matrix size.
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from submaj._jacobi_py import jacobi_eigh as py_eigh
from submaj.sampling import random_hermitian

try:
    from submaj._jacobi_ext import jacobi_eigh as ext_eigh
except ImportError:  # extension not built
    ext_eigh = None


def _numpy_eigh(a):
    w, v = np.linalg.eigh(a)
    return w, v, 0


def _time(fn, mats, repeat):
    times, resid = [], 0.0
    for _ in range(repeat):
        t0 = time.perf_counter()
        for a in mats:
            w, v, _ = fn(a)
        times.append((time.perf_counter() - t0) / len(mats))
    for a in mats:
        w, v, _ = fn(a)
        resid = max(resid, float(np.linalg.norm(a @ v - v * w)))
    return statistics.median(times), resid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="2,4,8,16,32")
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--batch", type=int, default=10, help="matrices per size")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    kernels = [("numpy", _numpy_eigh), ("python", py_eigh)]
    if ext_eigh is not None:
        kernels.insert(1, ("cython", ext_eigh))
    else:
        print("compiled kernel unavailable; timing the Python fallback only")

    print(f"{'n':>4} {'backend':>8} {'time/call':>12} {'residual':>10} {'vs python':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        mats = [random_hermitian(rng, n) for _ in range(args.batch)]
        # the Python kernel is slow at large n, so cap its repeats
        results = {}
        for name, fn in kernels:
            rep = max(1, args.repeat // 10) if name == "python" and n >= 16 else args.repeat
            results[name] = _time(fn, mats, rep)
        base = results["python"][0]
        for name, _ in kernels:
            t, r = results[name]
            print(f"{n:>4} {name:>8} {t * 1e6:>10.1f}us {r:>10.1e} {base / t:>9.1f}x")


if __name__ == "__main__":
    main()
