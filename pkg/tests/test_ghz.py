import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tangleroof.ghz import (GHZ_M, GHZ_P, SQRT3, X_W_END, Y_BOTTOM, Y_TOP, GhzSymCoords,
                            InvalidState, group_average, in_w_region, local_unitary, lower_bound,
                            lower_bound_rho, sqrt_tau3_symmetric, symmetric_state, twirl,
                            w_boundary)
from tangleroof.roof import compute_profile, roof_value
from tangleroof.spin_model import ModelParams, model_mixture

# reduced state of the model at (gamma, h, alpha) = (0.1, 0.5, 0.05 pi),
# frozen from an independent Kronecker-product construction
TWIRL_REF = (0.018316209755592505, -0.03307208841354744)

W = np.zeros(8)
W[[1, 2, 4]] = 1 / math.sqrt(3)


def _ref_state():
    return model_mixture(ModelParams(0.1, 0.5, 0.05 * math.pi))[0].rho()


def _rand_rho(rng, rank=2):
    A = rng.normal(size=(8, rank)) + 1j * rng.normal(size=(8, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def test_twirl_reference():
    rho = _ref_state()
    c = twirl(rho)
    assert (c.x, c.y) == pytest.approx(TWIRL_REF, abs=1e-12)
    ref = twirl(group_average(rho, nphase=16))
    assert (ref.x, ref.y) == pytest.approx(TWIRL_REF, abs=1e-12)


def test_group_average_matches_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(3):
        rho = _rand_rho(rng, 3)
        avg = group_average(rho)
        assert np.allclose(avg, symmetric_state(twirl(rho)), atol=1e-12)


def test_corners():
    assert (twirl(np.outer(GHZ_P, GHZ_P)).x, twirl(np.outer(GHZ_P, GHZ_P)).y) == pytest.approx((0.5, Y_TOP))
    assert twirl(np.outer(GHZ_M, GHZ_M)).x == pytest.approx(-0.5)
    c = twirl(np.eye(8)[[1]].T @ np.eye(8)[[1]])
    assert (c.x, c.y) == pytest.approx((0.0, Y_BOTTOM))
    mixed = twirl(np.eye(8) / 8)
    assert (mixed.x, mixed.y) == pytest.approx((0.0, 0.0), abs=1e-15)


def test_invalid_states():
    with pytest.raises(InvalidState):
        twirl(np.eye(8))
    with pytest.raises(InvalidState):
        twirl(np.eye(4) / 4)
    bad = np.diag([1.2, -0.2, 0, 0, 0, 0, 0, 0])
    with pytest.raises(InvalidState):
        twirl(bad)
    with pytest.raises(InvalidState):
        sqrt_tau3_symmetric(GhzSymCoords(0.6, Y_TOP))


def test_w_boundary_table():
    xs, ys = w_boundary()
    assert xs[0] == 0 and xs[-1] == pytest.approx(X_W_END)
    assert ys[0] == pytest.approx(SQRT3 / 4, abs=1e-4)
    assert ys[-1] == pytest.approx(1 / (2 * SQRT3), abs=1e-6)
    # concave and decreasing
    assert np.all(np.diff(ys) <= 1e-12)
    slopes = np.diff(ys) / np.diff(xs)
    assert np.all(np.diff(slopes) <= 1e-9)


def test_w_state_twirl_in_w_region():
    c = twirl(np.outer(W, W))
    assert in_w_region(c)
    assert sqrt_tau3_symmetric(c) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(-0.5, 0.5))
def test_top_edge(x):
    assert sqrt_tau3_symmetric(GhzSymCoords(x, Y_TOP)) == pytest.approx(2 * abs(x), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_envelope_properties(u, v):
    # points in the triangle via barycentric coordinates
    if u + v > 1:
        u, v = 1 - u, 1 - v
    x = 0.5 * u - 0.5 * v
    y = Y_TOP * (u + v) + Y_BOTTOM * (1 - u - v)
    c = GhzSymCoords(x, y)
    val = sqrt_tau3_symmetric(c)
    assert 0.0 <= val <= 1.0
    assert val <= 2 * abs(x) + 1e-12 or in_w_region(c)
    assert sqrt_tau3_symmetric(GhzSymCoords(-x, y)) == pytest.approx(val, abs=1e-9)


def test_envelope_convex_along_lines():
    rng = np.random.default_rng(1)
    for _ in range(20):
        pts = []
        for _ in range(2):
            u, v = rng.uniform(size=2)
            if u + v > 1:
                u, v = 1 - u, 1 - v
            pts.append(np.array([0.5 * (u - v), Y_TOP * (u + v) + Y_BOTTOM * (1 - u - v)]))
        ts = np.linspace(0, 1, 9)
        vals = np.array([sqrt_tau3_symmetric(GhzSymCoords(*((1 - t) * pts[0] + t * pts[1]))) for t in ts])
        assert np.all(vals[1:-1] <= 0.5 * (vals[:-2] + vals[2:]) + 1e-7)


def test_local_unitary_is_unitary():
    U = local_unitary(np.linspace(-1, 1, 9))
    assert np.allclose(U @ U.conj().T, np.eye(8), atol=1e-13)
    assert np.allclose(local_unitary(np.zeros(9)), np.eye(8))


def test_lower_bound_pure_ghz():
    rho = np.outer(GHZ_P, GHZ_P)
    assert lower_bound_rho(rho, align=False) == pytest.approx(1.0)
    # rotated GHZ: unaligned twirl loses it, alignment recovers it
    U = local_unitary([0.3, 0.1, -0.2, 0.5, 0.0, 0.4, -0.1, 0.2, 0.3])
    rot = U @ rho @ U.conj().T
    assert lower_bound_rho(rot, align=False) < 0.9
    assert lower_bound_rho(rot) == pytest.approx(1.0, abs=1e-6)


def test_lower_bound_below_roof(mix_e, prof_e):
    for p in (0.0, 0.3, mix_e.p_model, 1.0):
        assert lower_bound(mix_e, p, starts=3) <= roof_value(prof_e, p) + 1e-9


def test_lower_bound_zero_for_w():
    assert lower_bound_rho(np.outer(W, W), starts=2) == 0.0


def test_ghz_mixture_tight():
    # GHZ+/GHZ- mixtures already sit on the top edge; the bound is exact
    prof = compute_profile(GHZ_P, GHZ_M, grid=201)

    class Mix:
        def rho(self, p):
            return (1 - p) * np.outer(GHZ_P, GHZ_P) + p * np.outer(GHZ_M, GHZ_M)

    for p in (0.1, 0.35, 0.8):
        assert lower_bound(Mix(), p, starts=2) == pytest.approx(roof_value(prof, p), abs=1e-7)


def test_lower_bound_deterministic():
    rho = _rand_rho(np.random.default_rng(5))
    assert lower_bound_rho(rho, seed=3) == lower_bound_rho(rho, seed=3)
