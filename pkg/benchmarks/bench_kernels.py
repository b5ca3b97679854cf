"""Timing of the double-precision kernels: numba vs pure numpy.

Run with ``python3 benchmarks/bench_kernels.py``. Both code paths are imported
from the same module; the numba one is skipped when numba is unavailable or
disabled through ``JKDPOLES_DISABLE_NUMBA``.
"""

import argparse
import time

import numpy as np

from jkdpoles import kernels
from jkdpoles.sampling import RickerSource, ricker


def best_of(fn, repeat):
    fn()  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=40_000)
    ap.add_argument("--poles", type=int, default=10)
    ap.add_argument("--points", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    poles = -np.sort(10.0 ** rng.uniform(3, 8, args.poles))
    residues = 10.0 ** rng.uniform(0, 6, args.poles)
    dt = 1e-9
    q = ricker(RickerSource(1e5), np.arange(args.steps + 1) * dt)
    E, A, B = kernels.step_coefficients(poles, dt)
    s = -1j * np.geomspace(1e-3, 2e6, args.points)

    cases = {
        "theta_recursion": (
            lambda: kernels.theta_recursion_numpy(E, A, B, q, q),
            kernels.theta_recursion_numba and (lambda: kernels.theta_recursion_numba(E, A, B, q, q)),
        ),
        "eval_model": (
            lambda: kernels.eval_model_numpy(1.5, poles, residues, s),
            kernels.eval_model_numba and (lambda: kernels.eval_model_numba(1.5, poles, residues, s)),
        ),
    }
    print(f"{'kernel':<16} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8} {'max diff':>10}")
    for name, (np_fn, nb_fn) in cases.items():
        t_np = best_of(np_fn, args.repeat)
        if nb_fn is None:
            print(f"{name:<16} {t_np * 1e3:>12.2f} {'-':>12} {'-':>8} {'-':>10}")
            continue
        t_nb = best_of(nb_fn, args.repeat)
        diff = np.max(np.abs(np_fn() - nb_fn()))
        print(f"{name:<16} {t_np * 1e3:>12.2f} {t_nb * 1e3:>12.2f} {t_np / t_nb:>8.1f} {diff:>10.2e}")


if __name__ == "__main__":
    main()
