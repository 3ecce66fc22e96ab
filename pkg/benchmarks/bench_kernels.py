"""Compare the numba and numpy variants of every hot kernel.

    python benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

Kernel timings call ``<name>_nb`` and ``<name>_np`` directly, so one process
measures both. ``--end-to-end`` also times a half-line survival curve in two
subprocesses, one with DECAYKIT_NUMBA=0.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from decaykit import kernels
from decaykit._accel import HAVE_NUMBA

E2E = """
import time
from decaykit import SpectralDensity, FrequencyDomain, TimeGrid, survival
d = SpectralDensity.single(5.0, 1.0)
g = TimeGrid.log(0.01, 1e4, 400)
survival(d, FrequencyDomain.half_line(), TimeGrid.log(1, 2, 2))  # warm-up / jit
t0 = time.perf_counter()
survival(d, FrequencyDomain.half_line(), g)
print(time.perf_counter() - t0)
"""


def cases(rng):
    x = rng.uniform(-50, 50, 200_000)
    centers = rng.uniform(0, 10, 4)
    halfwidths = rng.uniform(0.1, 1, 4)
    weights = np.full(4, 0.25)
    z = x + 1j * rng.uniform(-1, 1, x.size)
    zeros = np.array([2 + 0.5j, -2 + 0.5j, 6 + 1j, -6 + 1j])
    poles = zeros.conjugate()
    phase = np.exp(1j * np.cumsum(rng.uniform(-0.5, 0.5, 200_000)))
    kappa = rng.uniform(0, 60, 20_000)
    return {
        "lorentz_sum": (x, centers, halfwidths, weights),
        "logderiv_sum": (z, zeros, poles),
        "rational_product": (z, zeros, poles),
        "unwrap_phase": (phase,),
        "legendre_fourier_moments": (kappa, 24),
    }


def bench(fn, args, repeat):
    fn(*args)  # compile / warm caches
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def end_to_end():
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, DECAYKIT_NUMBA=flag)
        r = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
        out[flag] = float(r.stdout.strip())
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not HAVE_NUMBA:
        print("numba is not installed: the _nb variants are plain Python loops", file=sys.stderr)
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<28}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, a in cases(rng).items():
        nb = bench(getattr(kernels, name + "_nb"), a, args.repeat)
        np_ = bench(getattr(kernels, name + "_np"), a, args.repeat)
        print(f"{name:<28}{nb * 1e3:12.2f}{np_ * 1e3:12.2f}{np_ / nb:10.1f}x")
    if args.end_to_end:
        t = end_to_end()
        print(f"{'survival (400 t, half-line)':<28}{t['1'] * 1e3:12.1f}{t['0'] * 1e3:12.1f}{t['0'] / t['1']:10.1f}x")


if __name__ == "__main__":
    main()
