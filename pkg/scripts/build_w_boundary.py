"""Tabulate the upper boundary of the W-class region in GHZ-symmetric coordinates.

For each x in [0, 3/8] we maximise F+ + F- over W-class states
A (x) A (x) A |W> subject to (F+ - F-)/2 = x. Symmetric real A suffices
(a general complex A (x) B (x) C search gives the same maxima). Warm starts
from the previous grid point keep the curve smooth; a few random restarts
guard against local optima.

Usage: python3 scripts/build_w_boundary.py [out.csv] [npoints]
"""
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

W = np.zeros(8)
W[[1, 2, 4]] = 1.0 / np.sqrt(3.0)
X_END = 0.375


def state(a):
    A = a.reshape(2, 2)
    v = np.kron(np.kron(A, A), A) @ W
    return v / np.linalg.norm(v)


def coords(a):
    v = state(a)
    return v[0] * v[7], v[0] ** 2 + v[7] ** 2


def solve(x, starts):
    best, arg = -np.inf, None
    for a0 in starts:
        res = minimize(lambda a: -coords(a)[1], a0, method="SLSQP",
                       constraints=[{"type": "eq", "fun": lambda a: coords(a)[0] - x}],
                       options={"ftol": 1e-15, "maxiter": 3000})
        if res.success and abs(coords(res.x)[0] - x) < 1e-11 and -res.fun > best:
            best, arg = -res.fun, res.x
    return best, arg


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else \
        Path(__file__).resolve().parents[1] / "src/tangleroof/data/ghz_w_boundary.csv"
    n = int(sys.argv[2]) if len(sys.argv) > 2 else 301
    rng = np.random.default_rng(20240601)
    xs = np.linspace(0.0, X_END, n)
    rows, prev = [], None
    for x in xs:
        starts = [rng.normal(size=4) for _ in range(6)]
        if prev is not None:
            starts.insert(0, prev)
        s, prev = solve(x, starts)
        if x == 0.0:
            s = 1.0  # |000> sits on the top edge
        if x == X_END:
            s = 0.75  # boundary meets the F- = 0 edge
        rows.append((x, s, (s - 0.25) / np.sqrt(3.0)))
    ys = np.array([r[2] for r in rows])
    second = ys[:-2] - 2 * ys[1:-1] + ys[2:]
    if np.any(second > 1e-9):
        raise SystemExit("boundary is not concave; rerun with more restarts")
    with open(out, "w") as fh:
        fh.write("x,f_sum,y\n")
        for r in rows:
            fh.write(f"{r[0]:.12g},{r[1]:.15g},{r[2]:.15g}\n")
    print(f"wrote {len(rows)} points to {out}")


if __name__ == "__main__":
    main()
