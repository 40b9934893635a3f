"""Convex roof of the square-root threetangle on a rank-2 family.

For every axis point ``rho(p)`` the candidate decompositions put weight on
one zero anchor of the zero polytope (a real zero state, the midpoint of a
conjugate pair, or the pole for a root at infinity) and on one entangled
pure state, the far end of the chord from the anchor through the axis
point. The pointwise minimum of these curves is zero on the axis span and
is then convexified; linear pieces of the result are simplices spanned by a
zero facet and a pinned pure state.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import kernels
from .bloch import BlochPoint, split_tip
from .polytope import (IdenticallyZero, PolytopeClass, ZeroPolytope, build_polytope,
                       visible_facets, InsidePolytope)
from .threetangle import TangleQuartic, tangle_quartic

DEFAULT_GRID = 2001
LINEAR_TOL = 1e-12
PIN_TOL = 1e-3
REFINE_WINDOW = 25


class CoverageGap(RuntimeError):
    """Some grid point outside the axis span has no feasible decomposition."""


@dataclass(frozen=True)
class DecompCurve:
    anchor: int
    kind: str  # "(1,1)" for a single zero state, "(2,1)" for a pair
    anchor_xz: tuple
    grid: np.ndarray
    values: np.ndarray
    tip_p: np.ndarray
    tip_sign: np.ndarray

    def tips(self):
        return [BlochPoint(float(p), 0.0 if s > 0 else math.pi)
                for p, s in zip(self.tip_p, self.tip_sign)]


@dataclass(frozen=True)
class Decomposition:
    """Pure-state decomposition of an axis point, at most four members."""
    members: tuple  # ((weight, BlochPoint), ...)

    def __post_init__(self):
        if len(self.members) > 4:
            raise ValueError("more than four members; reduce first")
        w = np.array([m[0] for m in self.members])
        if np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-10:
            raise ValueError("weights must be non-negative and sum to one")

    @property
    def weights(self):
        return np.array([m[0] for m in self.members])

    def centre(self):
        return sum(w * b.vector for w, b in self.members)

    def value(self, quartic: TangleQuartic) -> float:
        return float(sum(w * math.sqrt(quartic.tau3_at(b.p, b.phi))
                         for w, b in self.members))

    @classmethod
    def reduced(cls, members, quartic: TangleQuartic | None = None):
        """Build from any number of members, dropping affinely dependent ones.

        Each elimination step moves weight along an affine null direction of
        the Bloch vectors, choosing the sign that does not raise the value.
        """
        members = [(float(w), b) for w, b in members if w > 1e-15]
        while len(members) > 4:
            V = np.array([np.append(b.vector, 1.0) for _, b in members]).T
            null = np.linalg.svd(V)[2][-1]
            if quartic is not None:
                vals = np.array([math.sqrt(quartic.tau3_at(b.p, b.phi)) for _, b in members])
                if null @ vals > 0:
                    null = -null
            w = np.array([m[0] for m in members])
            pos = null > 1e-14
            if not np.any(pos):
                null = -null
                pos = null > 1e-14
            step = np.min(w[pos] / null[pos])
            w = w - step * null
            members = [(wi, b) for wi, (_, b) in zip(w, members) if wi > 1e-14]
        tot = sum(w for w, _ in members)
        return cls(tuple((w / tot, b) for w, b in members))


@dataclass
class RoofProfile:
    grid: np.ndarray
    roof: np.ndarray
    raw: np.ndarray
    segment_type: np.ndarray
    curve_id: np.ndarray
    segments: list
    breakpoints: list
    pinned_states: list
    polytope: ZeroPolytope | None
    quartic: TangleQuartic
    curves: list = field(default_factory=list, repr=False)
    p_model: float | None = None

    @property
    def axis_span(self):
        if self.polytope is None:
            return (0.0, 1.0)
        return self.polytope.axis_span

    @property
    def label(self) -> str:
        return "0Y" if self.polytope is None else self.polytope.label


def _anchor_kind(v):
    return "(2,1)" if v.kind == "pair" else "(1,1)"


def candidate_curves(polytope: ZeroPolytope, grid) -> list:
    grid = np.asarray(grid, dtype=float)
    c = polytope.quartic.coeffs
    out = []
    for k, v in enumerate(polytope.vertices):
        val, tp, ts = kernels.anchor_curve(c, v.x, v.z, grid)
        out.append(DecompCurve(k, _anchor_kind(v), (v.x, v.z), grid, val, tp, ts))
    return out


def _in_span(span, p):
    if span is None:
        return np.zeros(np.shape(p), bool)
    return (p >= span[0] - 1e-15) & (p <= span[1] + 1e-15)


def lower_envelope(curves, axis_span, grid=None):
    """Pointwise minimum over the candidate curves, zero on the axis span.

    Returns ``(raw, curve_id)`` with ``curve_id = -1`` on the span.
    """
    if not curves:
        if grid is None:
            raise CoverageGap("no candidate curves")
        grid = np.asarray(grid, dtype=float)
        if not np.all(_in_span(axis_span, grid)):
            raise CoverageGap("no candidate curves outside the axis span")
        return np.zeros_like(grid), -np.ones(grid.size, dtype=np.int64)
    grid = curves[0].grid
    C = np.array([cv.values for cv in curves])
    C = np.where(np.isfinite(C), C, np.inf)
    ids = np.argmin(C, axis=0)
    raw = C[ids, np.arange(grid.size)]
    zero = _in_span(axis_span, grid)
    if np.any(~np.isfinite(raw) & ~zero):
        bad = grid[~np.isfinite(raw) & ~zero][0]
        raise CoverageGap(f"no feasible decomposition at p={bad:.6g}")
    raw = np.where(zero, 0.0, raw)
    return raw, np.where(zero, -1, ids)


class _Envelope:
    """Raw envelope evaluated off the grid, for breakpoint refinement."""

    def __init__(self, polytope):
        self.polytope = polytope
        self.span = polytope.axis_span
        self.c = polytope.quartic.coeffs

    def best(self, p):
        if self.span is not None and self.span[0] <= p <= self.span[1]:
            return 0.0, -1, p, 1.0
        ps = np.array([p])
        best = (math.inf, -1, p, 1.0)
        for k, v in enumerate(self.polytope.vertices):
            val, tp, ts = kernels.anchor_curve(self.c, v.x, v.z, ps)
            if val[0] < best[0]:
                best = (float(val[0]), k, float(tp[0]), float(ts[0]))
        return best

    def __call__(self, p):
        return self.best(p)[0]


def _tangent_point(f, fixed, f_fixed, lo, hi, left):
    # left: maximise the slope from a free point a < fixed; right: minimise
    # the slope towards a free point b > fixed
    if hi - lo <= 0:
        return lo
    if left:
        obj = lambda a: -(f_fixed - f(a)) / (fixed - a)
    else:
        obj = lambda b: (f(b) - f_fixed) / (b - fixed)
    res = minimize_scalar(obj, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-13, "maxiter": 200})
    cands = [lo, hi, float(res.x)]
    return min(cands, key=obj)


def _refine_segment(f, grid, ia, ib, span):
    """Bitangent of the raw curve near the grid hull edge ``ia -> ib``."""
    n = grid.size
    a, b = grid[ia], grid[ib]
    fix_a = span is not None and span[0] <= a <= span[1]
    fix_b = span is not None and span[0] <= b <= span[1]
    if fix_a:
        a = span[1]
    if fix_b:
        b = span[0]
    # nearly straight raw curves make the grid tangency imprecise, so
    # search a window of several cells around each hull vertex
    w = REFINE_WINDOW
    mid = 0.5 * (grid[ia] + grid[ib])
    # keep the two tangent points on their own halves of the edge, which
    # rules out the degenerate solution a = b
    a_lo, a_hi = grid[max(ia - w, 0)], min(grid[min(ia + w, n - 1)], mid)
    b_lo, b_hi = max(grid[max(ib - w, 0)], mid), grid[min(ib + w, n - 1)]
    for _ in range(40):
        a_old, b_old = a, b
        if not fix_a:
            a = _tangent_point(f, b, f(b), a_lo, min(a_hi, b - 1e-12), left=True)
        if not fix_b:
            b = _tangent_point(f, a, f(a), max(b_lo, a + 1e-12), b_hi, left=False)
        if abs(a - a_old) < 1e-13 and abs(b - b_old) < 1e-13:
            break
    return a, b


def convexify(raw, grid, polytope: ZeroPolytope | None = None, curve_id=None,
              refine: bool = True):
    """Greatest convex minorant of the raw envelope.

    Returns ``(roof, segment_type, segments, breakpoints, pinned)`` where
    ``segments`` lists refined ``(p_lo, p_hi)`` linear pieces and
    ``pinned`` holds ``(BlochPoint, (p_lo, p_hi), certified)`` entries.
    """
    grid = np.asarray(grid, dtype=float)
    raw = np.asarray(raw, dtype=float)
    span = polytope.axis_span if polytope is not None else (0.0, 1.0)
    seg = np.where(_in_span(span, grid), "zero", "curve").astype(object)
    roof = raw.copy()
    hull = kernels.lower_hull(grid, raw)
    f = _Envelope(polytope) if (polytope is not None and refine) else None
    segments, breakpoints, pinned = [], [], []
    for ia, ib in zip(hull[:-1], hull[1:]):
        if ib - ia < 2:
            continue
        chord = raw[ia] + (raw[ib] - raw[ia]) * (grid[ia:ib + 1] - grid[ia]) / (grid[ib] - grid[ia])
        if np.max(raw[ia:ib + 1] - chord) <= LINEAR_TOL:
            continue
        a, b, fa, fb = grid[ia], grid[ib], raw[ia], raw[ib]
        if f is not None:
            ra, rb = _refine_segment(f, grid, ia, ib, span)
            fra, frb = f(ra), f(rb)
            # accept the bitangent only if it still supports the raw curve
            # and covers the grid edge
            ins = (grid >= ra) & (grid <= rb)
            line = fra + (frb - fra) * (grid[ins] - ra) / (rb - ra)
            if ra <= grid[ia + 1] and rb >= grid[ib - 1] and np.all(raw[ins] >= line - 1e-12):
                a, b, fa, fb = ra, rb, fra, frb
        inside = (grid >= a) & (grid <= b)
        roof[inside] = fa + (fb - fa) * (grid[inside] - a) / (b - a)
        seg[inside & (seg != "zero")] = "linear"
        segments.append((float(a), float(b)))
        for q in (a, b):
            if span is None or not span[0] <= q <= span[1]:
                breakpoints.append(float(q))
        if f is not None:
            tips = []
            for q in (a, b):
                val, k, tp, ts = f.best(q)
                if k >= 0 and val > 0:
                    tips.append(BlochPoint(tp, 0.0 if ts > 0 else math.pi))
            if tips:
                certified = len(tips) == 2 and abs(tips[0].p - tips[1].p) < PIN_TOL \
                    and tips[0].phi == tips[1].phi
                for t in (tips[:1] if certified else tips):
                    pinned.append((t, (float(a), float(b)), certified))
    roof = np.where(seg == "zero", 0.0, roof)
    return roof, seg.astype(str), segments, sorted(breakpoints), pinned


def facet_tips(profile: RoofProfile, ps=None):
    """Tip position along each linear segment with the anchor sliding on a facet.

    For every axis point of a linear segment the best (n0,1) decomposition
    whose zero part lies on one visible edge of the polytope is found by a
    one-dimensional search. On a simplex over that edge the tip stays fixed,
    so a flat ``tip_p`` certifies a single pinned pure state.

    Returns a list of dicts with keys ``segment``, ``p``, ``value``, ``tip_p``,
    ``edge``.
    """
    poly = profile.polytope
    out = []
    if poly is None:
        return out
    c = poly.quartic.coeffs
    for lo, hi in profile.segments:
        pts = np.linspace(lo, hi, 41)[1:-1] if ps is None else np.asarray(ps)
        pts = pts[(pts > lo) & (pts < hi)]
        try:
            edges = visible_facets(poly, float(pts[len(pts) // 2]))
        except InsidePolytope:
            continue
        best = None
        for e in edges:
            if len(e) != 2:
                continue
            v1, v2 = poly.vertices[e[0]].xz, poly.vertices[e[1]].xz
            val, tp, ts, s = kernels.facet_scan(c, v1, v2, pts)
            if best is None or np.mean(val) < np.mean(best[1]):
                best = (e, val, tp)
        if best is not None:
            out.append({"segment": (lo, hi), "p": pts, "value": best[1],
                        "tip_p": best[2], "edge": best[0]})
    return out


def compute_profile(psi0, psi1=None, grid: int | np.ndarray = DEFAULT_GRID,
                    refine: bool = True, p_model: float | None = None) -> RoofProfile:
    """Full roof profile for the span of two eigenvectors.

    ``psi0`` may also be a mixture object with ``psi0``/``psi1``/``p_model``.
    """
    if psi1 is None:
        mix = psi0
        psi0, psi1, p_model = mix.psi0, mix.psi1, mix.p_model
    ps = np.linspace(0.0, 1.0, grid) if np.isscalar(grid) else np.asarray(grid, float)
    q = tangle_quartic(psi0, psi1)
    try:
        poly = build_polytope(q)
    except IdenticallyZero:
        z = np.zeros_like(ps)
        return RoofProfile(ps, z, z.copy(), np.full(ps.size, "zero"), -np.ones(ps.size, int),
                           [], [], [], None, q, [], p_model)
    curves = candidate_curves(poly, ps)
    raw, ids = lower_envelope(curves, poly.axis_span, ps)
    roof, seg, segments, bps, pinned = convexify(raw, ps, poly, ids, refine)
    ids = np.where(seg == "curve", ids, -1)
    return RoofProfile(ps, roof, raw, seg, ids, segments, bps, pinned, poly, q, curves, p_model)


def roof_value(profile: RoofProfile, p: float) -> float:
    """Roof at ``p``, evaluated off the grid.

    Linear segments use their refined end points and strictly convex parts
    re-evaluate the anchor curves, so the result carries no grid
    interpolation error (which would overestimate a convex function).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    span = profile.axis_span
    if span is not None and span[0] <= p <= span[1]:
        return 0.0
    if profile.polytope is None:
        return float(np.interp(p, profile.grid, profile.roof))
    env = _Envelope(profile.polytope)
    for lo, hi in profile.segments:
        if lo <= p <= hi:
            flo, fhi = env(lo), env(hi)
            return float(flo + (fhi - flo) * (p - lo) / (hi - lo))
    return float(env(p))


def decomposition_at(profile: RoofProfile, p: float) -> Decomposition:
    """An explicit decomposition of ``rho(p)`` realising the roof value."""
    poly = profile.polytope
    if poly is None:
        return Decomposition(((1.0, BlochPoint(p, 0.0)),))
    env = _Envelope(poly)
    span = poly.axis_span
    if span is not None and span[0] <= p <= span[1]:
        return _zero_decomposition(poly, p)
    for lo, hi in profile.segments:
        if lo < p < hi:
            lam = (p - lo) / (hi - lo)
            parts = []
            for q, w in ((lo, 1.0 - lam), (hi, lam)):
                d = decomposition_at_curve(poly, env, q) if env(q) > 0 else _zero_decomposition(poly, q)
                parts += [(w * wi, b) for wi, b in d.members]
            return Decomposition.reduced(_merge(parts), poly.quartic)
    return decomposition_at_curve(poly, env, p)


def _merge(members, tol=1e-12):
    out = []
    for w, b in members:
        for i, (w2, b2) in enumerate(out):
            if np.linalg.norm(b.vector - b2.vector) < tol:
                out[i] = (w + w2, b2)
                break
        else:
            out.append((w, b))
    return out


def _anchor_members(poly, k):
    v = poly.vertices[k]
    roots = [poly.roots[i] for i in v.roots]
    if v.kind == "pair":
        r = roots[0]
        return [(0.5, r.bloch), (0.5, BlochPoint(r.bloch.p, -r.bloch.phi))]
    return [(1.0, roots[0].bloch)]


def decomposition_at_curve(poly, env, p):
    val, k, tp, ts = env.best(p)
    v = poly.vertices[k]
    t, _, _ = kernels._far_tip(v.x, v.z, 2.0 * p - 1.0)
    if t < 0:
        return Decomposition(tuple(_anchor_members(poly, k)))
    tip = BlochPoint(tp, 0.0 if ts > 0 else math.pi)
    wt = 1.0 / t
    members = [((1.0 - wt) * w, b) for w, b in _anchor_members(poly, k)] + [(wt, tip)]
    return Decomposition.reduced(_merge(members), poly.quartic)


def _zero_decomposition(poly, p):
    """Mixture of zero states sitting at the axis point (p inside the span)."""
    zr = 2.0 * p - 1.0
    vs = poly.vertices
    best = None
    for i, a in enumerate(vs):
        if abs(a.x) <= 1e-12 and abs(a.z - zr) <= 1e-12:
            return Decomposition(tuple(_anchor_members(poly, i)))
        for j, b in enumerate(vs):
            if a.x <= 0 or b.x >= 0:
                continue
            zc = a.z + (b.z - a.z) * a.x / (a.x - b.x)
            if best is None or abs(zc - zr) < abs(best[0] - zr):
                best = (zc, i, j)
    # two crossing segments bracketing the axis point
    cross = []
    for i, a in enumerate(vs):
        for j, b in enumerate(vs):
            if a.x > 0 > b.x:
                zc = a.z + (b.z - a.z) * a.x / (a.x - b.x)
                cross.append((zc, i, j, a.x / (a.x - b.x)))
            elif abs(a.x) <= 1e-12 and i == j:
                cross.append((a.z, i, i, 0.0))
    below = max((c for c in cross if c[0] <= zr + 1e-15), key=lambda c: c[0])
    above = min((c for c in cross if c[0] >= zr - 1e-15), key=lambda c: c[0])
    mu = 0.0 if above[0] == below[0] else (zr - below[0]) / (above[0] - below[0])
    parts = []
    for (zc, i, j, s), w in ((below, 1.0 - mu), (above, mu)):
        parts += [(w * (1.0 - s) * wi, b) for wi, b in _anchor_members(poly, i)]
        parts += [(w * s * wi, b) for wi, b in _anchor_members(poly, j)]
    return Decomposition.reduced(_merge(parts), poly.quartic)


# -- (1,2) split probe -------------------------------------------------------

def split_probe(profile: RoofProfile, phis, ps=None) -> dict:
    """Compare tip splittings in the azimuth with the roof.

    The single tip of each anchor curve is replaced by the conjugate pair
    ``(p', +-phi)`` whose projection stays on the same chord. For every
    ``phi`` the returned array holds ``best split value - roof`` on ``ps``;
    negative entries would mean a split beats the roof.
    """
    poly = profile.polytope
    ps = np.linspace(0.02, 0.98, 49) if ps is None else np.asarray(ps, float)
    out = {}
    if poly is None:
        return {float(phi): np.zeros(ps.size) for phi in phis}
    q = poly.quartic
    span = poly.axis_span
    for phi in phis:
        diff = np.full(ps.size, np.nan)
        for i, p in enumerate(ps):
            if span is not None and span[0] <= p <= span[1]:
                diff[i] = 0.0
                continue
            best = math.inf
            for v in poly.vertices:
                pt = split_tip(v.x, v.z, p, phi)
                # the split pair sits across the axis from the anchor
                az = phi if v.x <= 0 else math.pi - phi
                X = np.array([2.0 * math.sqrt(max(pt * (1 - pt), 0.0)) * math.cos(az), 2 * pt - 1])
                A, R = v.xz, np.array([0.0, 2 * p - 1])
                dAX = np.linalg.norm(X - A)
                if dAX == 0.0:
                    continue
                w = np.linalg.norm(R - A) / dAX
                best = min(best, w * math.sqrt(q.tau3_at(pt, az)))
            diff[i] = best - roof_value(profile, p)
        out[float(phi)] = diff
    return out


# -- random decomposition oracle --------------------------------------------

def _haar_isometries(rng, n, m):
    Z = (rng.standard_normal((n, m, m)) + 1j * rng.standard_normal((n, m, m))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=1, axis2=2)
    Q = Q * (d / np.abs(d))[:, None, :]
    return Q[:, :, :2]


def _isometry_from_params(x, m):
    G = (x[:2 * m] + 1j * x[2 * m:]).reshape(m, 2)
    Q, _ = np.linalg.qr(G)
    return Q


def random_decomposition_bound(psi0, psi1, p: float, trials: int = 10_000,
                               seed: int = 0, polish: int = 0, sizes=(2, 3, 4)) -> float:
    """Minimum of ``sum_i w_i sqrt(tau3)`` over random decompositions of ``rho(p)``.

    Decompositions come from right-multiplying the square-root factor
    ``[sqrt(1-p) psi0, sqrt(p) psi1]`` by random ``m x 2`` isometries. The
    ``polish`` best trials are then locally optimised; every value returned
    belongs to an actual decomposition, so the result is an upper bound on
    the convex roof.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    w0 = math.sqrt(max(1.0 - p, 0.0)) * np.asarray(psi0, dtype=complex)
    w1 = math.sqrt(max(p, 0.0)) * np.asarray(psi1, dtype=complex)
    per = [trials // len(sizes) + (1 if i < trials % len(sizes) else 0)
           for i in range(len(sizes))]
    best_val, cands = math.inf, []
    for m, n in zip(sizes, per):
        if n == 0:
            continue
        coef = _haar_isometries(rng, n, m)
        vals = kernels.decomposition_values(w0, w1, coef)
        k = int(np.argmin(vals))
        best_val = min(best_val, float(vals[k]))
        if polish:
            for j in np.argsort(vals)[:polish]:
                cands.append((float(vals[j]), m, coef[j]))
    if polish:
        cands.sort(key=lambda c: c[0])
        for _, m, V in cands[:polish]:
            x0 = np.concatenate([V.real.ravel(), V.imag.ravel()])
            obj = lambda x, m=m: float(kernels.decomposition_values(
                w0, w1, _isometry_from_params(x, m)[None])[0])
            res = minimize(obj, x0, method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
            best_val = min(best_val, obj(res.x))
    return best_val


# -- export ------------------------------------------------------------------

def fmt(x) -> str:
    return format(float(x), ".9g")


def profile_csv(profile: RoofProfile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "roof", "segment_type", "curve_id"])
    for p, r, s, k in zip(profile.grid, profile.roof, profile.segment_type, profile.curve_id):
        w.writerow([fmt(p), fmt(r), s, int(k)])
    return buf.getvalue()


def profile_summary(profile: RoofProfile) -> dict:
    poly = profile.polytope
    roots = []
    if poly is not None:
        for r in poly.roots:
            inf = r.at_infinity
            roots.append({"re": None if inf else float(r.z.real),
                          "im": None if inf else float(r.z.imag),
                          "p": float(r.bloch.p), "phi": float(r.bloch.phi)})
    span = profile.axis_span
    out = {
        "class": profile.label,
        "roots": roots,
        "axis_span": None if span is None else [float(span[0]), float(span[1])],
        "segments": [[float(a), float(b)] for a, b in profile.segments],
        "breakpoints": [float(b) for b in profile.breakpoints],
        "pinned": [{"p": float(b.p), "phi": float(b.phi), "segment": [float(s[0]), float(s[1])],
                    "certified": bool(c)} for b, s, c in profile.pinned_states],
    }
    if profile.p_model is not None:
        out["p_model"] = float(profile.p_model)
        out["roof_at_pmodel"] = roof_value(profile, profile.p_model)
    return out


__all__ = [
    "CoverageGap", "DecompCurve", "Decomposition", "RoofProfile", "PolytopeClass",
    "candidate_curves", "lower_envelope", "convexify", "compute_profile", "roof_value",
    "decomposition_at", "facet_tips", "split_probe", "random_decomposition_bound",
    "profile_csv", "profile_summary",
]
