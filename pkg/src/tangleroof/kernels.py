"""Hot numeric kernels.

Every kernel exists twice: an explicit-loop version that numba compiles and
a vectorised numpy version. ``USE_NUMBA`` selects the public entry points;
both variants stay importable (``*_loop`` / ``*_np``) so tests and the
benchmark can compare them directly.
"""
import numpy as np

from ._accel import HAS_NUMBA, njit

USE_NUMBA = HAS_NUMBA

_INV_PHI = 0.6180339887498949


# -- three-qubit hyperdeterminant ------------------------------------------

def _hyperdet_one(a):
    # a[k] is the amplitude of |k> with k = 4*b0 + 2*b1 + b2
    d1 = (a[0] * a[0] * a[7] * a[7] + a[1] * a[1] * a[6] * a[6]
          + a[2] * a[2] * a[5] * a[5] + a[4] * a[4] * a[3] * a[3])
    d2 = (a[0] * a[7] * a[3] * a[4] + a[0] * a[7] * a[5] * a[2]
          + a[0] * a[7] * a[6] * a[1] + a[3] * a[4] * a[5] * a[2]
          + a[3] * a[4] * a[6] * a[1] + a[5] * a[2] * a[6] * a[1])
    d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4]
    return d1 - 2.0 * d2 + 4.0 * d3


_hyperdet_one_nb = njit(_hyperdet_one)


@njit
def hyperdet_loop(psi):
    n = psi.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        out[i] = _hyperdet_one_nb(psi[i])
    return out


def hyperdet_np(psi):
    a = [psi[..., k] for k in range(8)]
    return _hyperdet_one(a)


def hyperdet_batch(psi):
    """Raw hyperdeterminant ``d1 - 2 d2 + 4 d3`` for each row of ``psi``."""
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    if psi.ndim == 1:
        return hyperdet_np(psi)
    if USE_NUMBA and psi.ndim == 2:
        return hyperdet_loop(psi)
    return hyperdet_np(psi)


# -- quartic on the Bloch sphere -------------------------------------------

def _quartic_homog(c, a, b):
    # sum_k c_k a^(4-k) b^k, Horner in b/a-free form
    return (((c[4] * b + c[3] * a) * b + c[2] * a * a) * b
            + c[1] * a * a * a) * b + c[0] * a * a * a * a


_quartic_homog_nb = njit(_quartic_homog)


def _far_tip(ax, az, zr):
    """Parameter t >= 1 where A + t (R - A) meets the unit circle."""
    dx = -ax
    dz = zr - az
    qa = dx * dx + dz * dz
    if qa < 1e-28:
        return -1.0, ax, az
    qb = 2.0 * (ax * dx + az * dz)
    qc = ax * ax + az * az - 1.0
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        disc = 0.0
    sq = np.sqrt(disc)
    if qb <= 0.0:
        t = (-qb + sq) / (2.0 * qa)
    elif qc < 0.0:
        t = -2.0 * qc / (qb + sq)
    else:
        t = (-qb + sq) / (2.0 * qa)
    return t, ax + t * dx, az + t * dz


_far_tip_nb = njit(_far_tip)


@njit
def anchor_curve_loop(c, ax, az, ps):
    n = ps.shape[0]
    val = np.empty(n)
    tip_p = np.empty(n)
    tip_s = np.empty(n)
    for i in range(n):
        t, tx, tz = _far_tip_nb(ax, az, 2.0 * ps[i] - 1.0)
        if t < 0.0:
            val[i] = 0.0
            tip_p[i] = ps[i]
            tip_s[i] = 1.0
            continue
        pt = 0.5 * (1.0 + tz)
        if pt < 0.0:
            pt = 0.0
        elif pt > 1.0:
            pt = 1.0
        s = 1.0 if tx >= 0.0 else -1.0
        q = _quartic_homog_nb(c, np.sqrt(1.0 - pt) + 0j, s * np.sqrt(pt) + 0j)
        val[i] = np.sqrt(4.0 * abs(q)) / t
        tip_p[i] = pt
        tip_s[i] = s
    return val, tip_p, tip_s


def anchor_curve_np(c, ax, az, ps):
    zr = 2.0 * ps - 1.0
    dx = -ax * np.ones_like(ps)
    dz = zr - az
    qa = dx * dx + dz * dz
    qb = 2.0 * (ax * dx + az * dz)
    qc = ax * ax + az * az - 1.0
    sq = np.sqrt(np.maximum(qb * qb - 4.0 * qa * qc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_plain = (-qb + sq) / (2.0 * qa)
        t_stab = -2.0 * qc / (qb + sq)
    t = np.where((qb > 0.0) & (qc < 0.0), t_stab, t_plain)
    degenerate = qa < 1e-28
    t = np.where(degenerate, 1.0, t)
    tx = ax + t * dx
    tz = az + t * dz
    pt = np.clip(0.5 * (1.0 + tz), 0.0, 1.0)
    s = np.where(tx >= 0.0, 1.0, -1.0)
    q = _quartic_homog(c, np.sqrt(1.0 - pt) + 0j, s * np.sqrt(pt) + 0j)
    val = np.sqrt(4.0 * np.abs(q)) / t
    val = np.where(degenerate, 0.0, val)
    pt = np.where(degenerate, ps, pt)
    s = np.where(degenerate, 1.0, s)
    return val, pt, s


def anchor_curve(c, ax, az, ps):
    """Value of the (n0,1) decomposition through a fixed zero anchor.

    The anchor ``(ax, az)`` lies in the x-z plane of the Bloch ball. For
    each axis point ``(0, 2p-1)`` the chord from the anchor through it hits
    the sphere at a tip state; the returned value is the tip weight times
    its square-root tangle.

    Returns
    -------
    values, tip_p, tip_sign : ndarray
        ``tip_sign`` is +1 for tips at phi=0 and -1 for phi=pi.
    """
    c = np.asarray(c, dtype=np.complex128)
    ps = np.ascontiguousarray(ps, dtype=np.float64)
    if USE_NUMBA:
        return anchor_curve_loop(c, float(ax), float(az), ps)
    return anchor_curve_np(c, float(ax), float(az), ps)


# -- anchor sliding along a zero facet --------------------------------------

@njit
def _edge_value_nb(c, x1, z1, x2, z2, s, zr):
    ax = x1 + s * (x2 - x1)
    az = z1 + s * (z2 - z1)
    t, tx, tz = _far_tip_nb(ax, az, zr)
    if t < 0.0:
        return 0.0, 0.5 * (1.0 + zr), 1.0
    pt = 0.5 * (1.0 + tz)
    if pt < 0.0:
        pt = 0.0
    elif pt > 1.0:
        pt = 1.0
    sg = 1.0 if tx >= 0.0 else -1.0
    q = _quartic_homog_nb(c, np.sqrt(1.0 - pt) + 0j, sg * np.sqrt(pt) + 0j)
    return np.sqrt(4.0 * abs(q)) / t, pt, sg


@njit
def facet_scan_loop(c, x1, z1, x2, z2, ps, nsamp, iters):
    n = ps.shape[0]
    best = np.empty(n)
    tip_p = np.empty(n)
    tip_s = np.empty(n)
    where = np.empty(n)
    for i in range(n):
        zr = 2.0 * ps[i] - 1.0
        kbest = 0
        vbest = np.inf
        for k in range(nsamp):
            v, _, _ = _edge_value_nb(c, x1, z1, x2, z2, k / (nsamp - 1.0), zr)
            if v < vbest:
                vbest = v
                kbest = k
        lo = max(kbest - 1, 0) / (nsamp - 1.0)
        hi = min(kbest + 1, nsamp - 1) / (nsamp - 1.0)
        a = hi - _INV_PHI * (hi - lo)
        b = lo + _INV_PHI * (hi - lo)
        fa, _, _ = _edge_value_nb(c, x1, z1, x2, z2, a, zr)
        fb, _, _ = _edge_value_nb(c, x1, z1, x2, z2, b, zr)
        for _ in range(iters):
            if fa < fb:
                hi = b
                b = a
                fb = fa
                a = hi - _INV_PHI * (hi - lo)
                fa, _, _ = _edge_value_nb(c, x1, z1, x2, z2, a, zr)
            else:
                lo = a
                a = b
                fa = fb
                b = lo + _INV_PHI * (hi - lo)
                fb, _, _ = _edge_value_nb(c, x1, z1, x2, z2, b, zr)
        s = 0.5 * (lo + hi)
        v, pt, sg = _edge_value_nb(c, x1, z1, x2, z2, s, zr)
        if vbest < v:
            s = kbest / (nsamp - 1.0)
            v, pt, sg = _edge_value_nb(c, x1, z1, x2, z2, s, zr)
        best[i] = v
        tip_p[i] = pt
        tip_s[i] = sg
        where[i] = s
    return best, tip_p, tip_s, where


def _edge_values_np(c, x1, z1, x2, z2, s, ps):
    ax = x1 + s * (x2 - x1)
    az = z1 + s * (z2 - z1)
    zr = 2.0 * ps - 1.0
    dx = -ax
    dz = zr - az
    qa = dx * dx + dz * dz
    qb = 2.0 * (ax * dx + az * dz)
    qc = ax * ax + az * az - 1.0
    sq = np.sqrt(np.maximum(qb * qb - 4.0 * qa * qc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where((qb > 0.0) & (qc < 0.0),
                     -2.0 * qc / (qb + sq), (-qb + sq) / (2.0 * qa))
    degenerate = qa < 1e-28
    t = np.where(degenerate, 1.0, t)
    tx = ax + t * dx
    pt = np.clip(0.5 * (1.0 + az + t * dz), 0.0, 1.0)
    sg = np.where(tx >= 0.0, 1.0, -1.0)
    q = _quartic_homog(c, np.sqrt(1.0 - pt) + 0j, sg * np.sqrt(pt) + 0j)
    v = np.where(degenerate, 0.0, np.sqrt(4.0 * np.abs(q)) / t)
    return v, np.where(degenerate, 0.5 * (1.0 + zr), pt), sg


def facet_scan_np(c, x1, z1, x2, z2, ps, nsamp, iters):
    grid = np.linspace(0.0, 1.0, nsamp)
    v, _, _ = _edge_values_np(c, x1, z1, x2, z2, grid[None, :], ps[:, None])
    k = np.argmin(v, axis=1)
    vbest = v[np.arange(ps.size), k]
    lo = grid[np.maximum(k - 1, 0)]
    hi = grid[np.minimum(k + 1, nsamp - 1)]
    a = hi - _INV_PHI * (hi - lo)
    b = lo + _INV_PHI * (hi - lo)
    fa = _edge_values_np(c, x1, z1, x2, z2, a, ps)[0]
    fb = _edge_values_np(c, x1, z1, x2, z2, b, ps)[0]
    for _ in range(iters):
        left = fa < fb
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
        a_new = np.where(left, hi - _INV_PHI * (hi - lo), b)
        b_new = np.where(left, a, lo + _INV_PHI * (hi - lo))
        fa_keep, fb_keep = fa, fb
        a, b = a_new, b_new
        fresh = _edge_values_np(c, x1, z1, x2, z2, np.where(left, a, b), ps)[0]
        fa = np.where(left, fresh, fb_keep)
        fb = np.where(left, fa_keep, fresh)
    s = 0.5 * (lo + hi)
    val, pt, sg = _edge_values_np(c, x1, z1, x2, z2, s, ps)
    worse = vbest < val
    s = np.where(worse, grid[k], s)
    val, pt, sg = _edge_values_np(c, x1, z1, x2, z2, s, ps)
    return val, pt, sg, s


def facet_scan(c, v1, v2, ps, nsamp=33, iters=48):
    """Best (n0,1) value with the zero anchor sliding along segment v1-v2.

    Returns ``(values, tip_p, tip_sign, anchor_fraction)``.
    """
    c = np.asarray(c, dtype=np.complex128)
    ps = np.ascontiguousarray(ps, dtype=np.float64)
    args = (c, float(v1[0]), float(v1[1]), float(v2[0]), float(v2[1]), ps,
            int(nsamp), int(iters))
    if USE_NUMBA:
        return facet_scan_loop(*args)
    return facet_scan_np(*args)


# -- lower convex hull -------------------------------------------------------

@njit
def lower_hull_loop(x, y):
    n = x.shape[0]
    h = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        while m >= 2:
            i1 = h[m - 2]
            i2 = h[m - 1]
            cross = (x[i2] - x[i1]) * (y[i] - y[i1]) - (y[i2] - y[i1]) * (x[i] - x[i1])
            if cross <= 0.0:
                m -= 1
            else:
                break
        h[m] = i
        m += 1
    return h[:m].copy()


def lower_hull_py(x, y):
    h = []
    for i in range(len(x)):
        while len(h) >= 2:
            i1, i2 = h[-2], h[-1]
            if (x[i2] - x[i1]) * (y[i] - y[i1]) - (y[i2] - y[i1]) * (x[i] - x[i1]) <= 0.0:
                h.pop()
            else:
                break
        h.append(i)
    return np.asarray(h, dtype=np.int64)


def lower_hull(x, y):
    """Indices of the lower convex hull of points sorted by ``x``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if USE_NUMBA:
        return lower_hull_loop(x, y)
    return lower_hull_py(x, y)


# -- random decompositions ---------------------------------------------------

@njit
def decomposition_values_loop(w0, w1, coef):
    # coef[t, k, :] mixes the two scaled eigenvectors into member k of trial t
    ntr, m, _ = coef.shape
    out = np.empty(ntr)
    v = np.empty(8, dtype=np.complex128)
    for t in range(ntr):
        acc = 0.0
        for k in range(m):
            for j in range(8):
                v[j] = coef[t, k, 0] * w0[j] + coef[t, k, 1] * w1[j]
            acc += 2.0 * np.sqrt(abs(_hyperdet_one_nb(v)))
        out[t] = acc
    return out


def decomposition_values_np(w0, w1, coef):
    states = coef[..., 0:1] * w0 + coef[..., 1:2] * w1
    return (2.0 * np.sqrt(np.abs(hyperdet_np(states)))).sum(axis=-1)


def decomposition_values(w0, w1, coef):
    """Average square-root tangle of decompositions built from ``coef``.

    Member ``k`` of trial ``t`` is the unnormalised state
    ``coef[t,k,0] w0 + coef[t,k,1] w1``; its weight is its squared norm, so
    weight times square-root tangle equals ``2 sqrt|hyperdet|``.
    """
    w0 = np.ascontiguousarray(w0, dtype=np.complex128)
    w1 = np.ascontiguousarray(w1, dtype=np.complex128)
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    if USE_NUMBA:
        return decomposition_values_loop(w0, w1, coef)
    return decomposition_values_np(w0, w1, coef)
