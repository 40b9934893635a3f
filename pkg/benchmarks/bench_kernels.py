"""Compare the numba and numpy paths of the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both paths are called directly (``*_loop`` vs ``*_np``), so the
TANGLEROOF_DISABLE_NUMBA flag is not needed here. The first numba call is
excluded from timing (compilation / cache load). Results are checked for
agreement before timing.
"""
import argparse
import time

import numpy as np

from tangleroof import kernels
from tangleroof._accel import HAS_NUMBA
from tangleroof.roof import _haar_isometries
from tangleroof.spin_model import ModelParams, model_mixture
from tangleroof.threetangle import tangle_quartic


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    mix, _ = model_mixture(ModelParams(0.1, 0.5, 0.15708))
    c = tangle_quartic(mix.psi0, mix.psi1).coeffs
    ps = np.linspace(0.0, 1.0, 20001)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=(200_000, 8)) + 1j * rng.normal(size=(200_000, 8))
    coef = _haar_isometries(rng, 50_000, 4)
    w0 = (mix.psi0 * np.sqrt(0.3)).astype(complex)
    w1 = (mix.psi1 * np.sqrt(0.7)).astype(complex)
    x = np.linspace(0, 1, 200_001)
    y = np.abs(np.sin(7 * x)) + x ** 2
    seg = ((0.98, -0.15), (0.46, 0.89))
    return {
        "hyperdet (2e5 states)": (lambda: kernels.hyperdet_loop(psi), lambda: kernels.hyperdet_np(psi)),
        "anchor_curve (2e4 p)": (lambda: kernels.anchor_curve_loop(c, 0.58, 0.45, ps),
                                 lambda: kernels.anchor_curve_np(c, 0.58, 0.45, ps)),
        "facet_scan (2e3 p)": (lambda: kernels.facet_scan_loop(c, *seg[0], *seg[1], ps[::10], 33, 48),
                               lambda: kernels.facet_scan_np(c, *seg[0], *seg[1], ps[::10], 33, 48)),
        "lower_hull (2e5 pts)": (lambda: kernels.lower_hull_loop(x, y), lambda: kernels.lower_hull_py(x, y)),
        "decompositions (5e4 x 4)": (lambda: kernels.decomposition_values_loop(w0, w1, coef),
                                     lambda: kernels.decomposition_values_np(w0, w1, coef)),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAS_NUMBA:
        print("numba unavailable or disabled: only the numpy path can run")
    print(f"{'kernel':28s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, (fast, slow) in cases().items():
        if HAS_NUMBA:
            a, b = fast(), slow()
            a = a if isinstance(a, tuple) else (a,)
            b = b if isinstance(b, tuple) else (b,)
            # compare values only: tip positions of flat optima may differ
            # between the two search paths without changing the value
            if not np.allclose(a[0], b[0], rtol=1e-7, atol=1e-9):
                raise SystemExit(f"{name}: numba and numpy results differ")
            tf = best_of(fast, args.repeat)
        ts = best_of(slow, args.repeat)
        if HAS_NUMBA:
            print(f"{name:28s} {1e3 * tf:11.2f} {1e3 * ts:11.2f} {ts / tf:8.1f}")
        else:
            print(f"{name:28s} {'-':>11s} {1e3 * ts:11.2f} {'-':>8s}")


if __name__ == "__main__":
    main()
