"""Lower bound on the square-root threetangle from GHZ-symmetric states.

Averaging a three-qubit state over the GHZ symmetry group (qubit
permutations, the simultaneous flip X(x)X(x)X and the phase rotations
exp(i a Z)(x)exp(i b Z)(x)exp(-i(a+b) Z)) leaves a state fixed by two
numbers, the GHZ fidelities F+ and F-. In the coordinates

    x = (F+ - F-) / 2,    y = (F+ + F- - 1/4) / sqrt(3)

the physical states fill the triangle with corners GHZ+ (1/2, sqrt3/4),
GHZ- (-1/2, sqrt3/4) and (0, -1/(4 sqrt3)). Twirling is a mixture of local
unitaries, so it cannot raise a convex-roof measure: the roof at the twirled
point bounds the roof of the original state from below.

On the symmetric family the roof of sqrt(tau3) vanishes on the W region and
equals 2|x| on the top edge (mixtures of GHZ+ and GHZ-). Its value elsewhere
is the convex envelope of these two pieces, evaluated here by a 1-d search
over the top-edge partner.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.optimize import minimize, minimize_scalar

SQRT3 = math.sqrt(3.0)
Y_TOP = SQRT3 / 4.0
Y_BOTTOM = -1.0 / (4.0 * SQRT3)
X_W_END = 0.375

GHZ_P = np.zeros(8)
GHZ_P[[0, 7]] = 1.0 / math.sqrt(2.0)
GHZ_M = np.zeros(8)
GHZ_M[0], GHZ_M[7] = 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)


class InvalidState(ValueError):
    pass


@dataclass(frozen=True)
class GhzSymCoords:
    x: float
    y: float

    @property
    def fidelities(self):
        tot = SQRT3 * self.y + 0.25
        return 0.5 * tot + self.x, 0.5 * tot - self.x

    def inside(self, tol: float = 1e-12) -> bool:
        fp, fm = self.fidelities
        return fp >= -tol and fm >= -tol and fp + fm <= 1.0 + tol


def _check_state(rho, tol=1e-9):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (8, 8):
        raise InvalidState("expected an 8x8 density matrix")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidState("trace differs from one")
    if np.linalg.norm(rho - rho.conj().T) > tol:
        raise InvalidState("matrix is not Hermitian")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
        raise InvalidState("matrix is not positive semidefinite")
    return rho


def twirl(rho) -> GhzSymCoords:
    """Coordinates of the GHZ-symmetrised state (from the GHZ-block entries)."""
    rho = _check_state(rho)
    fp = float(np.real(GHZ_P @ rho @ GHZ_P))
    fm = float(np.real(GHZ_M @ rho @ GHZ_M))
    return GhzSymCoords(0.5 * (fp - fm), (fp + fm - 0.25) / SQRT3)


def symmetric_state(c: GhzSymCoords) -> np.ndarray:
    """Density matrix of the GHZ-symmetric state at ``c``."""
    fp, fm = c.fidelities
    rest = np.eye(8) - np.outer(GHZ_P, GHZ_P) - np.outer(GHZ_M, GHZ_M)
    return fp * np.outer(GHZ_P, GHZ_P) + fm * np.outer(GHZ_M, GHZ_M) + (1.0 - fp - fm) / 6.0 * rest


def _perm_matrix(perm):
    P = np.zeros((8, 8))
    for k in range(8):
        bits = [(k >> (2 - q)) & 1 for q in range(3)]
        new = [bits[perm[q]] for q in range(3)]
        P[4 * new[0] + 2 * new[1] + new[2], k] = 1.0
    return P


def group_average(rho, nphase: int = 12) -> np.ndarray:
    """Explicit average over the GHZ symmetry group.

    The continuous phase subgroup is integrated with an ``nphase`` x
    ``nphase`` uniform grid, which is exact for the trigonometric degrees
    occurring in 8x8 matrix elements once ``nphase > 6``.
    """
    rho = np.asarray(rho, dtype=complex)
    X3 = np.fliplr(np.eye(8))
    disc = [_perm_matrix(p) for p in itertools.permutations(range(3))]
    disc = disc + [X3 @ P for P in disc]
    acc = np.zeros((8, 8), dtype=complex)
    for P in disc:
        acc += P @ rho @ P.T
    acc /= len(disc)
    z = np.array([1.0, -1.0])
    zz = [np.kron(np.kron(z if q == 0 else np.ones(2), z if q == 1 else np.ones(2)),
                  z if q == 2 else np.ones(2)) for q in range(3)]
    out = np.zeros((8, 8), dtype=complex)
    angles = 2.0 * np.pi * np.arange(nphase) / nphase
    for a in angles:
        for b in angles:
            d = np.exp(1j * (a * zz[0] + b * zz[1] - (a + b) * zz[2]))
            out += (d[:, None] * acc) * d.conj()[None, :]
    return out / nphase ** 2


@lru_cache(maxsize=1)
def w_boundary():
    """Tabulated upper edge ``y = s_W(|x|)`` of the W region for ``|x| <= 3/8``."""
    text = resources.files("tangleroof.data").joinpath("ghz_w_boundary.csv").read_text()
    data = np.loadtxt(text.splitlines()[1:], delimiter=",")
    return data[:, 0].copy(), data[:, 2].copy()


@lru_cache(maxsize=1)
def _w_polygon():
    xs, ys = w_boundary()
    # counter-clockwise: bottom corner, right edge up, boundary over the top, left edge down
    upper = list(zip(xs[::-1], ys[::-1])) + list(zip(-xs[1:], ys[1:]))
    return np.array([(0.0, Y_BOTTOM)] + upper)


def in_w_region(c: GhzSymCoords, tol: float = 1e-12) -> bool:
    xs, ys = w_boundary()
    ax = abs(c.x)
    if ax > X_W_END + tol or not c.inside(tol):
        return False
    return c.y <= float(np.interp(ax, xs, ys)) + tol


def _ray_entry(poly, origin, direction):
    """Smallest ``s`` with ``origin + s * direction`` in the convex polygon.

    Returns ``inf`` when the ray misses the polygon.
    """
    edge = np.roll(poly, -1, axis=0) - poly
    normal = np.stack([edge[:, 1], -edge[:, 0]], axis=1)  # outward for ccw order
    num = np.einsum("ij,ij->i", normal, poly - origin)
    den = normal @ direction
    scale = np.hypot(normal[:, 0], normal[:, 1]) * math.hypot(*direction)
    # rays along an edge shared with the triangle are parallel up to rounding
    flat = np.abs(den) <= 1e-12 * scale
    if np.any(flat & (num < -1e-12 * scale)):
        return np.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        s = num / den
    hi = np.min(s[(den > 0) & ~flat], initial=np.inf)
    lo = np.max(s[(den < 0) & ~flat], initial=-np.inf)
    return lo if lo <= hi + 1e-12 else np.inf


def _envelope_via(t, c, poly):
    # mix the top-edge point (t, Y_TOP) with the W point where the ray from
    # it through c enters the W region; nearer W points leave less weight
    # on the tangled top-edge state
    T = np.array([t, Y_TOP])
    P = np.array([c.x, c.y])
    d = P - T
    if np.hypot(*d) < 1e-15:
        return 2.0 * abs(t)
    s = _ray_entry(poly, T, d)
    if not 1.0 - 1e-12 <= s < np.inf:
        return np.inf
    return max(1.0 - 1.0 / s, 0.0) * 2.0 * abs(t)


def sqrt_tau3_symmetric(c: GhzSymCoords, nscan: int = 201) -> float:
    """Roof of sqrt(tau3) at a GHZ-symmetric point (convex-envelope form)."""
    if not c.inside(1e-9):
        raise InvalidState("coordinates outside the physical triangle")
    if in_w_region(c):
        return 0.0
    if c.y >= Y_TOP - 1e-14:
        return 2.0 * abs(c.x)
    poly = _w_polygon()
    ts = np.linspace(-0.5, 0.5, nscan)
    vals = np.array([_envelope_via(t, c, poly) for t in ts])
    k = int(np.argmin(vals))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, nscan - 1)]
    # infeasible partners are capped so the bounded search sees finite values
    res = minimize_scalar(lambda t: min(_envelope_via(t, c, poly), 10.0), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    best = min(vals[k], float(res.fun))
    return float(min(max(best, 0.0), 1.0))


_PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def _su2(theta):
    n = math.sqrt(float(theta @ theta))
    if n < 1e-300:
        return np.eye(2, dtype=complex)
    gen = np.tensordot(theta / n, _PAULI, axes=1)
    return math.cos(n) * np.eye(2) + 1j * math.sin(n) * gen


def local_unitary(params) -> np.ndarray:
    """``U1 (x) U2 (x) U3`` from nine rotation parameters."""
    params = np.asarray(params, dtype=float).reshape(3, 3)
    U = _su2(params[0])
    for k in (1, 2):
        U = np.kron(U, _su2(params[k]))
    return U


def lower_bound_rho(rho, align: bool = True, starts: int = 6, seed: int = 0) -> float:
    """Roof value at the twirled point, maximised over local unitaries.

    Local unitaries leave the roof unchanged and twirling cannot raise it,
    so every aligned twirl gives a valid lower bound. With ``align`` the GHZ
    fidelity is first maximised from ``starts`` deterministic starting
    points and the bound is evaluated at the best alignment found.
    """
    rho = _check_state(rho)
    best = sqrt_tau3_symmetric(twirl(rho))
    if not align:
        return best
    w, V = np.linalg.eigh(rho)
    keep = w > 1e-14
    w, V = w[keep], V[:, keep]

    def fid(theta, sign):
        g = local_unitary(theta).conj().T @ (GHZ_P if sign > 0 else GHZ_M)
        return -float(w @ np.abs(V.conj().T @ g) ** 2)

    rng = np.random.default_rng(seed)
    inits = [np.zeros(9)] + [rng.uniform(-math.pi, math.pi, 9) for _ in range(starts - 1)]
    for x0 in inits:
        res = minimize(fid, x0, args=(1,), method="BFGS", options={"gtol": 1e-10})
        U = local_unitary(res.x)
        rho_u = U @ rho @ U.conj().T
        rho_u = 0.5 * (rho_u + rho_u.conj().T)
        best = max(best, sqrt_tau3_symmetric(twirl(rho_u)))
    return best


def lower_bound(mixture, p: float | None = None, **kw) -> float:
    """GHZ-symmetric lower bound on the roof at ``rho(p)`` of a rank-2 mixture."""
    return lower_bound_rho(mixture.rho(p), **kw)
