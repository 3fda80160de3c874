"""Compare the compiled and pure-Python quadrature kernels.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import importlib
import timeit

import numpy as np

from comoving import _quad_py

try:
    _quad = importlib.import_module("comoving._quad")
except ImportError:
    _quad = None

SHAPE = (7.4e-3, 0.37e-3, 1.2e-3)
TRAIN = (np.array([1.0, 1.5, 1.0]), np.array([0.0, 1e-3, 2e-3]))


def cases():
    w1, d1 = np.array([1.0]), np.array([0.0])
    w3, d3 = TRAIN
    times = np.linspace(0.0, 3.5e-3, 3501)
    return {
        "single pulse, nu=80 Hz, p=0": lambda m: m.train_moments(
            w1, d1, d1, *SHAPE, 80.0, 0, 0.0, 1.2e-3),
        "single pulse, nu=800 Hz, p=1": lambda m: m.train_moments(
            w1, d1, d1, *SHAPE, 800.0, 1, 0.0, 1.2e-3),
        "three pulses, nu=80 Hz, p=1": lambda m: m.train_moments(
            w3, d3, d3, *SHAPE, 80.0, 1, 0.0, 3.2e-3),
        "cumulative, 3501 times": lambda m: m.train_moments_cumulative(
            w3, d3, d3, *SHAPE, 80.0, 1, 0.0, times),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'case':34s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for name, fn in cases().items():
        t_py = min(timeit.repeat(lambda: fn(_quad_py), number=1, repeat=args.repeat))
        if _quad is None:
            print(f"{name:34s} {t_py * 1e3:10.3f}ms {'n/a':>12s}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(_quad), number=1, repeat=args.repeat))
        a, b = np.asarray(fn(_quad_py)), np.asarray(fn(_quad))
        assert np.array_equal(a, b), f"{name}: backends disagree"
        print(f"{name:34s} {t_py * 1e3:10.3f}ms {t_cy * 1e3:10.3f}ms {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
