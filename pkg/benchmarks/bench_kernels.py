"""Time the numba kernels against their numpy counterparts.

    python benchmarks/bench_kernels.py [--repeat 5]

Each pair is checked for agreement before timing; the first jit call
(compilation) is excluded.
"""

import argparse
import timeit

import numpy as np

from planar_bilinear import _kernels
from planar_bilinear._accel import HAVE_NUMBA


def _cases(rng):
    m = rng.normal(size=(2, 2))
    x0 = rng.normal(size=2)
    p, q, r = rng.normal(size=3)
    gens = rng.normal(size=(4, 2, 2))
    return {
        "planar_rk4 (n=100000)": (
            lambda: _kernels.planar_rk4_jit(m, x0, 1e-5, 100_000),
            lambda: _kernels.planar_rk4_numpy(m, x0, 1e-5, 100_000),
            lambda a, b: np.allclose(a[0], b[0], rtol=1e-9, atol=1e-12),
        ),
        "angular_rk4 (n=100000)": (
            lambda: _kernels.angular_rk4_jit(p, q, r, 0.3, 1e-5, 100_000),
            lambda: _kernels.angular_rk4_numpy(p, q, r, 0.3, 1e-5, 100_000),
            lambda a, b: np.allclose(a, b, rtol=0, atol=1e-10),
        ),
        "grid_ranks (720 points)": (
            lambda: _kernels.grid_ranks_jit(gens, 720, 1e-9),
            lambda: _kernels.grid_ranks_numpy(gens, 720, 1e-9),
            lambda a, b: np.array_equal(a, b),
        ),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; the jit variants are plain Python")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<26}{'jit [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}  agree")
    for name, (jit, ref, same) in _cases(rng).items():
        agree = same(jit(), ref())  # also triggers compilation
        t_jit = min(timeit.repeat(jit, number=1, repeat=args.repeat))
        t_ref = min(timeit.repeat(ref, number=1, repeat=args.repeat))
        print(f"{name:<26}{t_jit * 1e3:>12.3f}{t_ref * 1e3:>12.3f}{t_ref / t_jit:>9.1f}x  {agree}")


if __name__ == "__main__":
    main()
