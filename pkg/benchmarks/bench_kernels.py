"""Compare the compiled and pure-Python chain-limit kernels.

Usage: python3 benchmarks/bench_kernels.py [--points N] [--repeat R]
"""

import argparse
import time

import numpy as np

from loewner_qc import _fallback
from loewner_qc import drivers as D

try:
    from loewner_qc import _kernels
except ImportError:
    _kernels = None

HORIZONS = (10.0, 20.0, 40.0, 80.0)
CASES = {
    "constant-power": D.constant_power(0.5, 0.3, 1),
    "extremal-a3": D.extremal_a3(0.5),
    "blaschke": D.blaschke(0.5, 0.7, [0.3, -0.2j]),
}


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    r = np.sqrt(rng.uniform(0, 1, args.points))
    z = r * np.exp(2j * np.pi * rng.uniform(0, 1, args.points))
    t = rng.uniform(0, 2, args.points)

    print(f"{'driver':<16}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}{'max diff':>12}")
    for name, d in CASES.items():
        spec = d.kernel_spec()
        tp, (vp, _, _) = best_time(
            lambda: _fallback.chain_limits(spec, t, z, HORIZONS, 1e-12, 1e-14, 1e-10), args.repeat)
        if _kernels is None:
            print(f"{name:<16}{tp:>12.4f}{'n/a':>14}{'':>10}{'':>12}")
            continue
        tc, (vc, _, _) = best_time(
            lambda: _kernels.chain_limits(spec, t, z, HORIZONS, 1e-12, 1e-14, 1e-10), args.repeat)
        diff = float(np.max(np.abs(vp - vc)))
        print(f"{name:<16}{tp:>12.4f}{tc:>14.4f}{tp / tc:>9.1f}x{diff:>12.1e}")


if __name__ == "__main__":
    main()
