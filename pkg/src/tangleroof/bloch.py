"""Chord, weight and crossing formulas in the Bloch ball of a rank-2 state.

A point is given by ``(p, phi)`` with Cartesian vector
``(2 sqrt(p(1-p)) cos phi, 2 sqrt(p(1-p)) sin phi, 2p - 1)``. The polar axis
holds the mixed states ``(1-p) |psi0><psi0| + p |psi1><psi1|``.

Functions taking a single ``p1`` refer to the pure state at ``(p1, phi=0)``
and a chord through the axis point at height ``2p - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    pass


class NoCrossing(GeometryError):
    pass


class DegenerateLine(GeometryError):
    pass


class DegenerateChord(GeometryError):
    pass


@dataclass(frozen=True)
class BlochPoint:
    p: float
    phi: float = 0.0

    @property
    def radius_xy(self) -> float:
        return 2.0 * math.sqrt(max(self.p * (1.0 - self.p), 0.0))

    @property
    def vector(self) -> np.ndarray:
        r = self.radius_xy
        return np.array([r * math.cos(self.phi), r * math.sin(self.phi), 2.0 * self.p - 1.0])

    @property
    def x(self) -> float:
        return self.radius_xy * math.cos(self.phi)

    @property
    def projected(self) -> np.ndarray:
        """Point in the x-z plane (drops the y component)."""
        return np.array([self.x, 2.0 * self.p - 1.0])

    @classmethod
    def from_vector(cls, n) -> "BlochPoint":
        n = np.asarray(n, dtype=float)
        p = min(max(0.5 * (1.0 + n[2]), 0.0), 1.0)
        return cls(p, math.atan2(n[1], n[0]) if abs(n[0]) + abs(n[1]) > 0 else 0.0)


@dataclass(frozen=True)
class ChordSolution:
    P: float
    lam: float
    m1: float
    m2: float


def _pq(p):
    return math.sqrt(max(p * (1.0 - p), 0.0))


def axis_crossing(pt0: BlochPoint, pt1: BlochPoint, tol: float = 1e-15) -> ChordSolution:
    """Where the projected segment between two points crosses the polar axis.

    Works on signed x-coordinates: the points must lie on opposite sides.
    ``lam`` is the weight ratio ``m2 / m1`` of the two-point mixture sitting
    on the axis; ``m1`` belongs to ``pt0``.
    """
    x0, x1 = pt0.x, pt1.x
    if abs(x0) <= tol or abs(x1) <= tol or (x0 > 0) == (x1 > 0):
        raise NoCrossing("points are not on strictly opposite sides of the axis")
    a0, a1 = abs(x0), abs(x1)
    m1 = a1 / (a0 + a1)
    m2 = a0 / (a0 + a1)
    P = m1 * pt0.p + m2 * pt1.p
    return ChordSolution(P, a0 / a1, m1, m2)


def crossing_from_pairs(p1, phi1, p2, phi2):
    """Axis crossing for two projected points on opposite sides, unsigned form."""
    w1 = _pq(p1) * abs(math.cos(phi1))
    w2 = _pq(p2) * abs(math.cos(phi2))
    if w1 + w2 == 0.0:
        raise DegenerateChord("both points lie on the axis")
    return (p2 * w1 + p1 * w2) / (w1 + w2)


def sphere_crossing(pt0: BlochPoint, p: float):
    """Sphere intersections of the line through a projected point and the axis.

    ``pt0`` enters through its x-z projection
    ``(2 sqrt(p0(1-p0)) cos phi0, 2 p0 - 1)``. Returns ``(P_plus, P_minus)``,
    the p-parameters of the two intersections.
    """
    p0 = pt0.p
    c2 = math.cos(pt0.phi) ** 2
    a = p0 * (1.0 - p0) * c2
    d = p - p0
    den = d * d + a
    if den <= 0.0:
        raise DegenerateLine("point coincides with the axis point")
    root = math.sqrt(max(d * d + 4.0 * p * p0 * (1.0 - p0) * (1.0 - p) * c2, 0.0))
    core = d * (1.0 - 2.0 * p0) + 2.0 * a
    return p0 + 0.5 * d * (core + root) / den, p0 + 0.5 * d * (core - root) / den


def chord_lengths(p1: float, p: float):
    """Distances from the pure state at ``p1`` to the axis point and beyond.

    ``l1 * l2 = 4 p (1 - p)`` (power of the axis point).
    """
    l1 = 2.0 * math.sqrt((p - p1) ** 2 + p1 * (1.0 - p1))
    if l1 == 0.0:
        raise DegenerateChord("pure state coincides with the axis point")
    return l1, 4.0 * p * (1.0 - p) / l1


def second_intersection(p1: float, p: float) -> float:
    l1, _ = chord_lengths(p1, p)
    return 4.0 * p * p * (1.0 - p1) / (l1 * l1)


def mix_weight(p1: float, p: float) -> float:
    """Weight of the far pure state in the two-state mixture at height 2p-1."""
    l1, l2 = chord_lengths(p1, p)
    return l1 / (l1 + l2)


def axis_point_from_pair(p1: float, p2: float) -> float:
    """Axis crossing of the chord between (p1, phi=0) and (p2, phi=pi)."""
    w1, w2 = _pq(p1), _pq(p2)
    if w1 + w2 == 0.0:
        if p1 == p2:
            return p1
        raise DegenerateChord("chord between the two poles is the axis itself")
    return p1 + (p2 - p1) * w1 / (w1 + w2)


def split_candidate(p1: float, p: float, phi2: float) -> float:
    """p of the state at azimuth ``phi2`` whose x-z projection stays on the chord.

    The chord runs from the pure state at ``(p1, 0)`` through the axis point;
    ``phi2 = 0`` gives back :func:`second_intersection`.
    """
    q = p1 * (1.0 - p1)
    d = p - p1
    c = math.cos(phi2)
    den = 2.0 * (q + d * d * c * c)
    if den == 0.0:
        raise DegenerateChord("degenerate split geometry")
    root = math.sqrt(max(4.0 * p * (1.0 - p) * q + d * d * c * c, 0.0))
    return p1 + d * (2.0 * q - d * (2.0 * p1 - 1.0) * c * c + c * root) / den


def general_second_intersection(p1: float, phi1: float, p: float) -> float:
    """Far sphere crossing at phi=0 of the line from a projected anchor.

    The anchor is the projection of ``(p1, +-phi1)``; with ``phi1 = 0`` it is
    the pure state itself and the result equals :func:`second_intersection`.
    """
    return sphere_crossing(BlochPoint(p1, phi1), p)[0]


def split_tip(ax: float, az: float, p: float, phi2: float) -> float:
    """Like :func:`split_candidate` for an arbitrary anchor in the x-z plane.

    Solves ``2 sqrt(p'(1-p')) |cos phi2| / |p' - p| = |ax| / |pa - p|`` for
    ``p'`` on the far side of the axis point.
    """
    pa = 0.5 * (1.0 + az)
    if abs(pa - p) < 1e-15:
        return p
    k = abs(ax) / abs(pa - p)
    c2 = math.cos(phi2) ** 2
    A = 4.0 * c2 + k * k
    B = -(4.0 * c2 + 2.0 * k * k * p)
    C = k * k * p * p
    root = math.sqrt(max(B * B - 4.0 * A * C, 0.0))
    r1, r2 = (-B + root) / (2.0 * A), (-B - root) / (2.0 * A)
    return r1 if (r1 - p) * (pa - p) < 0 else r2


def far_tip(anchor, p: float):
    """Far sphere point of the line from a projected anchor through the axis.

    Returns ``(tip_xz, t)`` with ``tip = anchor + t (axis - anchor)``.
    """
    a = np.asarray(anchor, dtype=float)
    r = np.array([0.0, 2.0 * p - 1.0])
    d = r - a
    qa = d @ d
    if qa == 0.0:
        raise DegenerateLine("anchor coincides with the axis point")
    qb = 2.0 * a @ d
    qc = a @ a - 1.0
    t = (-qb + math.sqrt(max(qb * qb - 4.0 * qa * qc, 0.0))) / (2.0 * qa)
    return a + t * d, t
