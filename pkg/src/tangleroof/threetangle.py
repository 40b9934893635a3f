"""Threetangle of pure three-qubit states and its quartic on a 2-d span.

Amplitude ``psi[k]`` belongs to ``|b0 b1 b2>`` with ``k = 4*b0 + 2*b1 + b2``.
The normalisation is ``tau3 = 4 |d1 - 2 d2 + 4 d3| / |psi|^4`` so that the
GHZ state has tangle 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import hyperdet_batch

INTERP_NODES = np.array([0.0, 1.0, -1.0, 1j, -1j])


class ZeroStateError(ValueError):
    pass


# (coefficient, amplitude indices) for every monomial of d1 - 2 d2 + 4 d3
_MONOMIALS = (
    [(1.0, (0, 0, 7, 7)), (1.0, (1, 1, 6, 6)), (1.0, (2, 2, 5, 5)), (1.0, (4, 4, 3, 3))]
    + [(-2.0, idx) for idx in [(0, 7, 3, 4), (0, 7, 5, 2), (0, 7, 6, 1),
                               (3, 4, 5, 2), (3, 4, 6, 1), (5, 2, 6, 1)]]
    + [(4.0, (0, 6, 5, 3)), (4.0, (7, 1, 2, 4))]
)


def hyperdet(psi) -> complex | np.ndarray:
    """Raw polynomial ``d1 - 2 d2 + 4 d3`` (no normalisation, no modulus)."""
    return hyperdet_batch(np.asarray(psi, dtype=np.complex128))


def tau3(psi) -> float:
    psi = np.asarray(psi, dtype=np.complex128)
    nrm2 = float(np.vdot(psi, psi).real)
    if nrm2 == 0.0:
        raise ZeroStateError("threetangle of the zero vector is undefined")
    return 4.0 * abs(complex(hyperdet(psi))) / nrm2 ** 2


def sqrt_tau3(psi) -> float:
    return float(np.sqrt(tau3(psi)))


@dataclass(frozen=True)
class TangleQuartic:
    """``sum_k c_k z^k`` = raw hyperdeterminant of ``psi0 + z psi1``."""
    coeffs: np.ndarray

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], z)

    @property
    def is_real(self) -> bool:
        c = self.coeffs
        return bool(np.all(np.abs(c.imag) <= 1e-12 * max(1.0, np.abs(c).max())))

    @property
    def scale(self) -> float:
        return float(np.abs(self.coeffs).max())

    def tau3_at(self, p, phi=0.0):
        """Threetangle of ``sqrt(1-p) psi0 + e^{i phi} sqrt(p) psi1``."""
        p = np.asarray(p, dtype=float)
        a = np.sqrt(1.0 - p) + 0j
        b = np.sqrt(p) * np.exp(1j * np.asarray(phi, dtype=float))
        c = self.coeffs
        val = sum(c[k] * a ** (4 - k) * b ** k for k in range(5))
        return 4.0 * np.abs(val)


def _expand(psi0, psi1):
    coeffs = np.zeros(5, dtype=np.complex128)
    for weight, idx in _MONOMIALS:
        poly = np.ones(1, dtype=np.complex128)
        for k in idx:
            # ascending-order product with (psi0[k] + z psi1[k])
            poly = np.convolve(poly, [psi0[k], psi1[k]])
        coeffs += weight * poly
    return coeffs


def _interpolate(psi0, psi1):
    vals = np.array([complex(hyperdet(psi0 + z * psi1)) for z in INTERP_NODES])
    V = np.vander(INTERP_NODES, 5, increasing=True)
    return np.linalg.solve(V, vals)


def tangle_quartic(psi0, psi1, method: str = "both", tol: float = 1e-10) -> TangleQuartic:
    """Coefficients of the tangle polynomial on the span of two states.

    ``method`` is ``"expand"`` (exact multilinear expansion), ``"interp"``
    (five-node interpolation at 0, +-1, +-i) or ``"both"``, which computes
    the two and raises if they disagree beyond ``tol`` (relative).
    """
    psi0 = np.asarray(psi0, dtype=np.complex128)
    psi1 = np.asarray(psi1, dtype=np.complex128)
    if method == "expand":
        c = _expand(psi0, psi1)
    elif method == "interp":
        c = _interpolate(psi0, psi1)
    elif method == "both":
        c = _expand(psi0, psi1)
        ci = _interpolate(psi0, psi1)
        if np.abs(c - ci).max() > tol * max(1.0, np.abs(c).max()):
            raise ArithmeticError("quartic expansion and interpolation disagree")
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.all(np.abs(c.imag) <= 1e-14 * max(1.0, np.abs(c).max())):
        c = c.real.astype(np.complex128)
    return TangleQuartic(c)


def tau3_at_bloch(psi0, psi1, p, phi=0.0, quartic: TangleQuartic | None = None):
    q = quartic if quartic is not None else tangle_quartic(psi0, psi1)
    return q.tau3_at(p, phi)


def monomials():
    """Iterate the hyperdeterminant monomials as ``(coefficient, indices)``."""
    return iter(_MONOMIALS)
