"""Self-check suites behind ``tangleroof verify``.

Each suite compares a closed form or a construction against an independent
route (brute-force geometry, direct polynomial evaluation, random
decompositions) and reports pass/fail with the worst deviation seen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bloch
from .ghz import lower_bound
from .roof import compute_profile, random_decomposition_bound, roof_value
from .spin_model import ModelParams, model_mixture
from .threetangle import hyperdet, tangle_quartic, tau3


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tol: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: worst={self.worst:.3e} tol={self.tol:.0e}"


def line_sphere_far(ax, az, p):
    """Brute-force far crossing of the line from (ax, az) through (0, 2p-1)."""
    d = np.array([-ax, 2 * p - 1 - az])
    a = np.array([ax, az])
    roots = np.roots([d @ d, 2 * a @ d, a @ a - 1]).real
    return a + roots.max() * d


def random_su2(rng, det_one_only=False):
    M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    if det_one_only:
        return M / np.sqrt(np.linalg.det(M))
    Q, R = np.linalg.qr(M)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_params(rng):
    return ModelParams(float(rng.uniform(0, 1)), float(rng.uniform(0.05, 1.0)),
                       float(rng.uniform(0, math.pi / 2)))


def suite_geometry(rng, n=10_000):
    worst = 0.0
    for _ in range(n):
        p1, p = rng.uniform(0.01, 0.99, 2)
        tip = line_sphere_far(2 * math.sqrt(p1 * (1 - p1)), 2 * p1 - 1, p)
        worst = max(worst, abs(bloch.second_intersection(p1, p) - 0.5 * (1 + tip[1])))
        l1, l2 = bloch.chord_lengths(p1, p)
        d1 = math.hypot(2 * math.sqrt(p1 * (1 - p1)), 2 * p1 - 1 - (2 * p - 1))
        worst = max(worst, abs(l1 - d1), abs(l2 - np.hypot(tip[0], tip[1] - (2 * p - 1))))
        phi = rng.uniform(0, math.pi / 2)
        xa = 2 * math.sqrt(p1 * (1 - p1)) * math.cos(phi)
        tip = line_sphere_far(xa, 2 * p1 - 1, p)
        worst = max(worst, abs(bloch.general_second_intersection(p1, phi, p) - 0.5 * (1 + tip[1])))
    return SuiteResult("chord formulas vs line-sphere oracle", worst < 1e-10, worst, 1e-10)


def suite_power_of_point(rng, n=10_000):
    p1 = rng.uniform(0.001, 0.999, n)
    p = rng.uniform(0.001, 0.999, n)
    worst = 0.0
    for a, b in zip(p1, p):
        l1, l2 = bloch.chord_lengths(a, b)
        worst = max(worst, abs(l1 * l2 - 4 * b * (1 - b)) / (4 * b * (1 - b)))
    return SuiteResult("power of a point l1*l2 = 4p(1-p)", worst < 1e-12, worst, 1e-12)


def suite_invariance(rng, n=1000):
    lu, sl = 0.0, 0.0
    for _ in range(n):
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi /= np.linalg.norm(psi)
        U = [random_su2(rng) for _ in range(3)]
        A = [random_su2(rng, det_one_only=True) for _ in range(3)]
        ku = np.kron(np.kron(U[0], U[1]), U[2])
        ka = np.kron(np.kron(A[0], A[1]), A[2])
        lu = max(lu, abs(tau3(ku @ psi) - tau3(psi)))
        h0 = abs(complex(hyperdet(psi)))
        sl = max(sl, abs(abs(complex(hyperdet(ka @ psi))) - h0) / max(h0, 1e-300))
    ok = lu < 1e-10 and sl < 1e-8
    return SuiteResult("LU invariance of tau3 / SL invariance of |hyperdet|", ok, max(lu, sl), 1e-8)


def suite_quartic(rng, n=200):
    worst = 0.0
    for _ in range(n):
        a, b = rng.normal(size=8), rng.normal(size=8)
        q = tangle_quartic(a, b)
        for z in rng.normal(size=5) + 1j * rng.normal(size=5):
            direct = complex(hyperdet(a + z * b))
            worst = max(worst, abs(q(z) - direct) / max(1.0, abs(direct)))
    return SuiteResult("quartic vs direct evaluation", worst < 1e-12, worst, 1e-12)


def suite_roof(rng, draws=5, trials=2000):
    conv, zero, sandwich = 0.0, 0.0, 0.0
    for _ in range(draws):
        mix, _ = model_mixture(random_params(rng))
        prof = compute_profile(mix)
        r = prof.roof
        conv = max(conv, float(np.max(r[1:-1] - 0.5 * (r[:-2] + r[2:]), initial=0.0)))
        span = prof.axis_span
        inside = np.zeros(r.size, bool) if span is None else \
            (prof.grid >= span[0]) & (prof.grid <= span[1])
        zero = max(zero, float(np.abs(r[inside]).max(initial=0.0)))
        for p in np.linspace(0.0, 1.0, 6):
            rv = roof_value(prof, p)
            ub = random_decomposition_bound(mix.psi0, mix.psi1, p, trials, seed=int(rng.integers(1 << 31)))
            lb = lower_bound(mix, p, starts=2)
            sandwich = max(sandwich, lb - rv, rv - ub)
    ok = conv < 1e-8 and zero < 1e-9 and sandwich < 1e-9
    return SuiteResult("roof convexity / zero set / sandwich", ok, max(conv, zero, sandwich), 1e-8)


SUITES = (suite_geometry, suite_power_of_point, suite_invariance, suite_quartic, suite_roof)


def run_all(seed: int = 0, trials: int = 2000, quick: bool = False):
    rng = np.random.default_rng(seed)
    out = []
    for suite in SUITES:
        if suite is suite_roof:
            out.append(suite(rng, draws=2 if quick else 5, trials=trials))
        elif quick and suite in (suite_geometry, suite_power_of_point):
            out.append(suite(rng, n=1000))
        elif quick and suite is suite_invariance:
            out.append(suite(rng, n=200))
        else:
            out.append(suite(rng))
    return out
