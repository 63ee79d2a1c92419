"""Compare the compiled and pure-Python Jacobi kernels.

    python benchmarks/bench_jacobi.py [--repeat N] [--samples N]

Times single eigensolves at the sizes used in the package (3, 9, 27) and a
full TILES sweep, once per available backend.
"""

import argparse
import time

import numpy as np

from choiext import linalg
from choiext.maps import choi_c1
from choiext.upb import tiles, upb_complement_state
from choiext.witness import SweepConfig, sweep


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--samples", type=int, default=721)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    mats = {}
    for n in (3, 9, 27):
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        mats[n] = (m + m.conj().T) / 2
    rho = upb_complement_state(tiles())
    cfg = SweepConfig(samples=args.samples)

    backends = linalg.available_backends()
    results = {}
    prev = linalg.BACKEND
    try:
        for b in backends:
            linalg.set_backend(b)
            row = {f"eigh n={n}": best_of(lambda h=h: linalg.eigh(h), args.repeat) for n, h in mats.items()}
            row[f"sweep {args.samples}"] = best_of(lambda: sweep(choi_c1(), rho, cfg), max(1, args.repeat // 5))
            results[b] = row
    finally:
        linalg.set_backend(prev)

    names = list(next(iter(results.values())))
    print(f"{'case':<16}" + "".join(f"{b:>14}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name in names:
        cells = "".join(f"{results[b][name] * 1e3:>12.3f}ms" for b in backends)
        extra = ""
        if len(backends) > 1:
            extra = f"{results['python'][name] / results['compiled'][name]:>11.1f}x"
        print(f"{name:<16}{cells}{extra}")


if __name__ == "__main__":
    main()
