"""Zero-polytope of the tangle quartic inside the Bloch ball.

The zeros of ``sum_k c_k z^k`` are the tangle-free pure states
``psi0 + z psi1`` of the span. Real roots sit on the great circle y = 0,
complex roots come in conjugate pairs mirrored through that plane, so the
polytope is symmetric under ``y -> -y``. Its section with the plane y = 0
therefore coincides with its projection onto the x-z plane, and every
question about the polar axis reduces to 2-d geometry on projected points.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .bloch import BlochPoint
from .threetangle import TangleQuartic

PAIR_TOL = 1e-7
MERGE_TOL = 1e-7
AXIS_TOL = 1e-12
DEGREE_TOL = 1e-13


class IdenticallyZero(ValueError):
    """Every state of the span is tangle-free."""


class InsidePolytope(ValueError):
    """The axis point lies in the zero polytope, so no facet is needed."""


@dataclass(frozen=True)
class ZeroState:
    z: complex
    bloch: BlochPoint
    is_real: bool

    @property
    def at_infinity(self) -> bool:
        return cmath.isinf(self.z)


@dataclass(frozen=True)
class PolytopeClass:
    n_vertices: int
    orientation: str  # "plus", "minus" or "none"
    crosses_axis: str  # "Y" or "N"

    @property
    def label(self) -> str:
        sign = {"plus": "+", "minus": "-"}.get(self.orientation, "")
        return f"{self.n_vertices}{sign}{self.crosses_axis}"

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class Vertex:
    """A projected vertex: one real root or one merged conjugate pair."""
    x: float
    z: float
    kind: str  # "real", "pair" or "infinity"
    roots: tuple

    @property
    def xz(self):
        return np.array([self.x, self.z])


@dataclass(frozen=True)
class ZeroPolytope:
    roots: list
    vertices: list
    hull_3d: np.ndarray
    axis_span: tuple | None
    cls: PolytopeClass
    quartic: TangleQuartic | None = field(default=None, repr=False)

    @property
    def projected_vertices(self) -> np.ndarray:
        return np.array([v.xz for v in self.vertices]).reshape(-1, 2)

    @property
    def label(self) -> str:
        return self.cls.label


def _root_point(z: complex) -> ZeroState:
    if cmath.isinf(z):
        return ZeroState(complex(math.inf, 0.0), BlochPoint(1.0, 0.0), True)
    a2 = abs(z) ** 2
    p = a2 / (1.0 + a2)
    is_real = abs(z.imag) < PAIR_TOL * (1.0 + abs(z))
    phi = (0.0 if z.real >= 0 else math.pi) if is_real else cmath.phase(z)
    return ZeroState(complex(z.real, 0.0) if is_real else z, BlochPoint(p, phi), is_real)


def _companion_roots(c):
    """Roots of ``sum_k c_k z^k`` (ascending ``c``, nonzero leading term)."""
    n = len(c) - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    M = np.zeros((n, n), dtype=complex)
    M[1:, :-1] = np.eye(n - 1)
    M[:, -1] = -np.asarray(c[:-1]) / c[-1]
    r = np.linalg.eigvals(M)
    # one Newton step on the original polynomial
    asc = np.asarray(c)
    dp = asc[1:] * np.arange(1, n + 1)
    f = np.polyval(asc[::-1], r)
    fp = np.polyval(dp[::-1], r)
    ok = np.abs(fp) > 1e-14 * max(1.0, np.abs(asc).max())
    polished = r - np.where(ok, f / np.where(ok, fp, 1.0), 0.0)
    better = np.abs(np.polyval(asc[::-1], polished)) <= np.abs(f)
    return np.where(better, polished, r)


def solve_zero_states(q: TangleQuartic) -> list:
    """All four roots of the quartic, with missing degree reported as infinity."""
    c = np.asarray(q.coeffs, dtype=complex)
    scale = np.abs(c).max()
    if scale < 1e-14:
        raise IdenticallyZero("tangle quartic vanishes identically")
    deg = 4
    while deg > 0 and abs(c[deg]) < DEGREE_TOL * scale:
        deg -= 1
    r = _companion_roots(c[:deg + 1])
    if q.is_real:
        r = _symmetrise(r)
    zs = [complex(v) for v in r] + [complex(math.inf, 0.0)] * (4 - deg)
    return [_root_point(z) for z in sorted(zs, key=_root_key)]


def _symmetrise(r):
    """Make the roots of a real polynomial exactly conjugation-closed."""
    r = np.array(r, dtype=complex)
    used = np.zeros(r.size, bool)
    for i in range(r.size):
        if used[i]:
            continue
        used[i] = True
        if abs(r[i].imag) < PAIR_TOL * (1 + abs(r[i])):
            r[i] = r[i].real
            continue
        d = np.abs(r - r[i].conjugate())
        d[used] = np.inf
        j = int(np.argmin(d))
        if d[j] < PAIR_TOL * (1 + abs(r[i])):
            used[j] = True
            m = 0.5 * (r[i] + r[j].conjugate())
            r[i], r[j] = m, m.conjugate()
    return r


def _root_key(z):
    if cmath.isinf(z):
        return (1.0, 0.0, 0.0)
    a2 = abs(z) ** 2
    return (a2 / (1 + a2), cmath.phase(z) if abs(z.imag) > 0 else (0.0 if z.real >= 0 else math.pi), 0.0)


def _vertices(roots) -> list:
    verts = []
    for i, r in enumerate(roots):
        if r.at_infinity:
            kind = "infinity"
        elif r.is_real:
            kind = "real"
        elif r.z.imag > 0:
            kind = "pair"
        else:
            continue  # lower half of a conjugate pair
        b = r.bloch
        x, z = b.x, 2.0 * b.p - 1.0
        idx = (i,)
        if kind == "pair":
            mates = [j for j, s in enumerate(roots)
                     if not s.is_real and abs(s.z - r.z.conjugate()) < PAIR_TOL * (1 + abs(r.z))]
            idx = (i,) + tuple(mates[:1])
        for k, v in enumerate(verts):
            if abs(v.x - x) < MERGE_TOL and abs(v.z - z) < MERGE_TOL:
                verts[k] = Vertex(v.x, v.z, v.kind, v.roots + idx)
                break
        else:
            verts.append(Vertex(x, z, kind, idx))
    return verts


def _axis_hits(verts):
    hits = []
    for i, a in enumerate(verts):
        if abs(a.x) <= AXIS_TOL:
            hits.append(a.z)
        for b in verts[i + 1:]:
            if (a.x > AXIS_TOL and b.x < -AXIS_TOL) or (a.x < -AXIS_TOL and b.x > AXIS_TOL):
                hits.append(a.z + (b.z - a.z) * a.x / (a.x - b.x))
    return hits


def axis_span(polytope_or_vertices):
    """Intersection of the zero polytope with the polar axis as a p-interval.

    Every point of the polytope section on the axis lies on a segment between
    two vertices on opposite sides of it, so the extreme crossings of such
    segments (plus vertices on the axis) delimit the span.
    """
    verts = getattr(polytope_or_vertices, "vertices", polytope_or_vertices)
    hits = _axis_hits(verts)
    if not hits:
        return None
    lo, hi = min(hits), max(hits)
    return (min(max(0.5 * (1.0 + lo), 0.0), 1.0), min(max(0.5 * (1.0 + hi), 0.0), 1.0))


def _orientation(verts):
    if len(verts) != 3:
        return "none"
    # plus: the interior (pair) vertex bulges towards the ball centre, so it
    # is a corner seen from the polar axis; minus: it hides behind the chord
    # joining the two other vertices
    inner = [v for v in verts if v.kind == "pair"]
    outer = [v for v in verts if v.kind != "pair"]
    if len(inner) != 1:
        return "none"
    (ax, az), (bx, bz) = outer[0].xz, outer[1].xz
    side = lambda x, z: (bx - ax) * (z - az) - (bz - az) * (x - ax)
    s_in, s_org = side(inner[0].x, inner[0].z), side(0.0, 0.0)
    if abs(s_in) < AXIS_TOL:
        return "none"
    return "plus" if s_in * s_org > 0 else "minus"


def classify(roots) -> PolytopeClass:
    verts = _vertices(roots)
    crosses = "Y" if _axis_hits(verts) else "N"
    return PolytopeClass(len(verts), _orientation(verts), crosses)


def build_polytope(q: TangleQuartic) -> ZeroPolytope:
    roots = solve_zero_states(q)
    verts = _vertices(roots)
    hull = np.array([r.bloch.vector for r in roots])
    span = axis_span(verts)
    cls = PolytopeClass(len(verts), _orientation(verts), "Y" if span is not None else "N")
    return ZeroPolytope(roots, verts, hull, span, cls, q)


def _convex_hull_2d(pts):
    """Counter-clockwise hull indices (monotone chain), collinear points dropped."""
    order = sorted(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1]))
    if len(order) <= 2:
        return order

    def cross(o, a, b):
        return ((pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1])
                - (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]))

    lower, upper = [], []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(i)
    for i in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def visible_facets(polytope: ZeroPolytope, p: float, tol: float = 1e-12) -> list:
    """Hull edges of the projected polytope seen from the axis point at ``p``.

    Returned as tuples of vertex indices. A degenerate polytope (one point or
    a segment) returns itself as the only facet.
    """
    pts = [tuple(v.xz) for v in polytope.vertices]
    q = (0.0, 2.0 * p - 1.0)
    span = polytope.axis_span
    if span is not None and span[0] - tol <= p <= span[1] + tol:
        raise InsidePolytope(f"p={p} lies inside the zero polytope")
    hull = _convex_hull_2d(pts)
    if len(hull) == 1:
        return [(hull[0],)]
    if len(hull) == 2:
        return [tuple(sorted(hull))]
    out = []
    for a, b in zip(hull, hull[1:] + hull[:1]):
        (ax, az), (bx, bz) = pts[a], pts[b]
        if (bx - ax) * (q[1] - az) - (bz - az) * (q[0] - ax) < -tol:
            out.append(tuple(sorted((a, b))))
    return out
