"""XY chain in a tilted field: exact diagonalisation and three-site reduction.

Basis convention: site 0 is the most significant bit of the basis index, so
``index = sum_j b_j 2**(L-1-j)`` and bit value 0 is sigma^z = +1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BOUNDARIES = ("periodic", "open")
MAX_SITES = 12
DEGENERACY_GAP = 1e-9
RANK_TOL = 1e-10


class RankError(RuntimeError):
    """The three-site reduced state has a third non-negligible eigenvalue."""


@dataclass(frozen=True)
class ModelParams:
    gamma: float
    h: float
    alpha: float
    L: int = 4
    boundary: str = "periodic"

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 3:
            raise ValueError(f"need an integer L >= 3, got {self.L!r}")
        for name in ("gamma", "h", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.h < 0:
            raise ValueError("field strength h must be non-negative")
        if not -1e-12 <= self.alpha <= math.pi / 2 + 1e-12:
            raise ValueError("tilt angle alpha must lie in [0, pi/2]")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")


@dataclass(frozen=True)
class PureStateVec:
    amplitudes: np.ndarray
    energy: float
    gap: float
    degenerate: bool = False


@dataclass(frozen=True)
class RankTwoMixture:
    """Two real eigenvectors of a rank-2 three-qubit state.

    ``psi1`` carries the larger eigenvalue ``p_model`` and sits at the north
    pole (p = 1) of the Bloch-ball picture.
    """
    psi0: np.ndarray
    psi1: np.ndarray
    p_model: float
    traced_site: int = 0
    eigenvalues: np.ndarray = field(default=None, repr=False)

    def rho(self, p: float | None = None) -> np.ndarray:
        p = self.p_model if p is None else p
        return ((1.0 - p) * np.outer(self.psi0, self.psi0.conj())
                + p * np.outer(self.psi1, self.psi1.conj()))


def _bonds(L, boundary):
    last = L if boundary == "periodic" else L - 1
    return [(j, (j + 1) % L) for j in range(last)]


def build_hamiltonian(params: ModelParams, max_sites: int = MAX_SITES) -> np.ndarray:
    """Dense Hamiltonian matrix in the sigma^z basis.

    All matrix elements are real (sigma^y sigma^y only flips two spins with
    a sign), so a real symmetric array is returned.
    """
    L = params.L
    if L > max_sites:
        raise ValueError(f"L={L} exceeds the dense-diagonalisation cap {max_sites}")
    dim = 1 << L
    states = np.arange(dim)
    bits = (states[:, None] >> (L - 1 - np.arange(L))[None, :]) & 1
    H = np.zeros((dim, dim))
    g = params.gamma
    for i, j in _bonds(L, params.boundary):
        flipped = states ^ (1 << (L - 1 - i)) ^ (1 << (L - 1 - j))
        parallel = bits[:, i] == bits[:, j]
        # xx flips with +1; yy flips with -1 on parallel pairs, +1 otherwise
        H[flipped, states] -= np.where(parallel, g, 1.0)
    spin_z = 1.0 - 2.0 * bits
    H[states, states] -= params.h * math.cos(params.alpha) * spin_z.sum(axis=1)
    hx = params.h * math.sin(params.alpha)
    if hx != 0.0:
        for j in range(L):
            H[states ^ (1 << (L - 1 - j)), states] -= hx
    return H


def _gauge_fix(v):
    v = np.asarray(v)
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    if np.iscomplexobj(v) and np.max(np.abs(v.imag)) < 1e-10:
        v = v.real
    return v / np.linalg.norm(v)


def ground_state(H: np.ndarray) -> PureStateVec:
    """Lowest eigenpair, gauge-fixed to real amplitudes.

    A gap below ``DEGENERACY_GAP`` marks the result as unreliable instead
    of failing: any vector of the ground space may be returned then.
    """
    H = np.asarray(H)
    if np.linalg.norm(H - H.conj().T) > 1e-12 * max(1.0, np.linalg.norm(H)):
        raise ValueError("Hamiltonian is not Hermitian")
    w, V = np.linalg.eigh(H)
    gap = float(w[1] - w[0]) if w.size > 1 else math.inf
    return PureStateVec(_gauge_fix(V[:, 0]), float(w[0]), gap, gap < DEGENERACY_GAP)


def parity_commutator_norm(H: np.ndarray) -> float:
    """Frobenius norm of [H, P] with P the global sigma^z parity."""
    states = np.arange(H.shape[0])
    ones = np.zeros_like(states)
    for k in range(H.shape[0].bit_length()):
        ones += (states >> k) & 1
    par = np.where(ones % 2 == 0, 1.0, -1.0)
    # (H P - P H)_{ab} = H_ab (par_b - par_a)
    return float(np.linalg.norm(H * (par[None, :] - par[:, None])))


def reduce_to_three_sites(state: PureStateVec | np.ndarray, traced_site: int = 0,
                          rank_tol: float = RANK_TOL) -> RankTwoMixture:
    """Three-site reduced state of a chain state as a rank-2 mixture.

    For ``L = 4`` only ``traced_site`` is traced out. For longer chains the
    kept sites are the three following ``traced_site`` (cyclically); their
    reduced state is in general not rank 2 and then ``RankError`` is raised.
    """
    amps = state.amplitudes if isinstance(state, PureStateVec) else np.asarray(state)
    L = amps.size.bit_length() - 1
    if 1 << L != amps.size:
        raise ValueError("state length is not a power of two")
    if not 0 <= traced_site < L:
        raise ValueError(f"traced_site must lie in [0, {L})")
    keep = sorted((traced_site + k) % L for k in (1, 2, 3))
    drop = [s for s in range(L) if s not in keep]
    t = np.transpose(amps.reshape([2] * L), drop + keep).reshape(1 << len(drop), 8)
    rho = t.T @ t.conj()
    w, U = np.linalg.eigh(rho)
    if w.size > 2 and w[-3] > rank_tol:
        raise RankError(f"third eigenvalue {w[-3]:.3e} exceeds {rank_tol:.0e}")
    psi1 = _gauge_fix(U[:, -1])
    psi0 = _gauge_fix(U[:, -2])
    p_model = min(max(float(w[-1]), 0.0), 1.0)
    return RankTwoMixture(psi0, psi1, p_model, traced_site, w[::-1].copy())


def model_mixture(params: ModelParams, traced_site: int = 0):
    """Ground state of ``params`` reduced to three sites.

    Returns ``(mixture, ground)`` so callers can inspect degeneracy flags.
    """
    gs = ground_state(build_hamiltonian(params))
    return reduce_to_three_sites(gs, traced_site), gs
