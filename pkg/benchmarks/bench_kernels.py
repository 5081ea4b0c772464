#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-numpy fallback.

Times the hot per-chain information kernel on random inputs, then an
end-to-end support-function search with each backend selected.

Usage: python benchmarks/bench_kernels.py [--calls 20000] [--sizes 6,8,2,2,2]
"""

import argparse
import time

import numpy as np

from bbcsec import _core, binary_symmetric, from_marginals
from bbcsec.region import SearchParams, support_function


def bench_kernel(calls: int, nu: int, nv: int, nx: int, ny1: int, ny2: int) -> None:
    rng = np.random.default_rng(0)
    pu = rng.dirichlet(np.ones(nu))
    pvu = rng.dirichlet(np.ones(nv), size=nu)
    pxv = rng.dirichlet(np.ones(nx), size=nv)
    w1 = rng.dirichlet(np.ones(ny1), size=nx)
    w2 = rng.dirichlet(np.ones(ny2), size=nx)

    print(f"kernel chain_info, sizes (|U|,|V|,|X|,|Y1|,|Y2|)=({nu},{nv},{nx},{ny1},{ny2}), "
          f"{calls} calls per backend")
    times = {}
    for name in _core.available_backends():
        mod = _core.set_backend(name)
        mod.chain_info(pu, pvu, pxv, w1, w2)  # warm up
        t0 = time.perf_counter()
        for _ in range(calls):
            mod.chain_info(pu, pvu, pxv, w1, w2)
        times[name] = (time.perf_counter() - t0) / calls
        print(f"  {name:>9}: {times[name] * 1e6:8.2f} us/call")
    if len(times) == 2:
        print(f"  speedup: {times['python'] / times['compiled']:.1f}x")

    ref = None
    for name in _core.available_backends():
        out = np.array(_core.set_backend(name).chain_info(pu, pvu, pxv, w1, w2))
        if ref is None:
            ref = out
        else:
            print(f"  max backend deviation: {np.max(np.abs(out - ref)):.2e}")


def bench_support() -> None:
    ch = from_marginals(binary_symmetric(0.1), binary_symmetric(0.2))
    p = SearchParams(restarts=8, iterations=150, seed=0)
    print("end-to-end support_function, weight (1,0,0,0), 8 restarts x 150 sweeps")
    for name in _core.available_backends():
        _core.set_backend(name)
        t0 = time.perf_counter()
        res = support_function(ch, (1.0, 0.0, 0.0, 0.0), p)
        print(f"  {name:>9}: {time.perf_counter() - t0:6.2f} s  (value {res.value:.6f})")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--calls", type=int, default=20000)
    ap.add_argument("--sizes", default="6,8,2,2,2", help="|U|,|V|,|X|,|Y1|,|Y2|")
    args = ap.parse_args()
    sizes = tuple(int(s) for s in args.sizes.split(","))
    if len(sizes) != 5:
        ap.error("--sizes needs five comma-separated integers")

    print(f"available backends: {_core.available_backends()}")
    bench_kernel(args.calls, *sizes)
    bench_support()
    _core.set_backend("compiled" if "compiled" in _core.available_backends() else "python")


if __name__ == "__main__":
    main()
