import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tangleroof.threetangle import (ZeroStateError, hyperdet, monomials, sqrt_tau3, tangle_quartic,
                                    tau3, tau3_at_bloch)

GHZ = np.zeros(8)
GHZ[[0, 7]] = 1 / math.sqrt(2)
W = np.zeros(8)
W[[1, 2, 4]] = 1 / math.sqrt(3)

vec8 = st.lists(st.floats(-1, 1), min_size=16, max_size=16).map(
    lambda v: np.array(v[:8]) + 1j * np.array(v[8:]))


def _rand(rng, n=8):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def _su2(rng):
    Q, R = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def test_monomials_balanced():
    # every monomial uses each qubit value twice as 0 and twice as 1
    for _, idx in monomials():
        for q in range(3):
            bits = Counter((k >> (2 - q)) & 1 for k in idx)
            assert bits[0] == 2 and bits[1] == 2


def test_reference_states():
    assert tau3(GHZ) == pytest.approx(1.0, abs=1e-14)
    assert tau3(W) == pytest.approx(0.0, abs=1e-14)
    assert tau3(np.eye(8)[5]) == 0.0
    bell_x = np.kron([1, 0], np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert tau3(bell_x) == pytest.approx(0.0, abs=1e-14)
    assert sqrt_tau3(GHZ) == pytest.approx(1.0)


def test_zero_vector():
    with pytest.raises(ZeroStateError):
        tau3(np.zeros(8))


def test_scale_invariance():
    rng = np.random.default_rng(1)
    psi = _rand(rng)
    assert tau3(3.7j * psi) == pytest.approx(tau3(psi), rel=1e-12)


def test_generalised_ghz():
    for a in np.linspace(0, 1, 7):
        v = np.zeros(8)
        v[0], v[7] = math.sqrt(a), math.sqrt(1 - a)
        assert tau3(v) == pytest.approx(4 * a * (1 - a), abs=1e-14)


def test_lu_invariance():
    rng = np.random.default_rng(2)
    for _ in range(50):
        psi = _rand(rng)
        psi /= np.linalg.norm(psi)
        U = np.kron(np.kron(_su2(rng), _su2(rng)), _su2(rng))
        assert tau3(U @ psi) == pytest.approx(tau3(psi), abs=1e-12)


def test_batch_matches_single():
    rng = np.random.default_rng(4)
    psi = _rand(rng, 5 * 8).reshape(5, 8)
    batch = hyperdet(psi)
    for k in range(5):
        assert batch[k] == pytest.approx(complex(hyperdet(psi[k])), abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(vec8, vec8, st.complex_numbers(max_magnitude=3))
def test_quartic_routes_agree(a, b, z):
    ce = tangle_quartic(a, b, method="expand").coeffs
    ci = tangle_quartic(a, b, method="interp").coeffs
    scale = max(1.0, np.abs(ce).max())
    assert np.abs(ce - ci).max() <= 1e-10 * scale
    direct = complex(hyperdet(a + z * b))
    q = tangle_quartic(a, b, method="expand")
    assert abs(q(z) - direct) <= 1e-10 * max(1.0, abs(direct), scale * (1 + abs(z)) ** 4)


def test_quartic_disagreement_raises(monkeypatch):
    import tangleroof.threetangle as tt
    monkeypatch.setattr(tt, "_interpolate", lambda a, b: tt._expand(a, b) + 1e-3)
    with pytest.raises(ArithmeticError):
        tt.tangle_quartic(np.ones(8), np.arange(8.0))


def test_unknown_method():
    with pytest.raises(ValueError):
        tangle_quartic(np.ones(8), np.ones(8), method="fft")


def test_tau3_at_bloch_matches_direct():
    rng = np.random.default_rng(5)
    a, b = rng.normal(size=8), rng.normal(size=8)
    a /= np.linalg.norm(a)
    b -= (a @ b) * a
    b /= np.linalg.norm(b)
    for p, phi in [(0.0, 0.0), (0.3, 0.0), (0.7, 1.1), (1.0, 2.0)]:
        psi = math.sqrt(1 - p) * a + math.sqrt(p) * np.exp(1j * phi) * b
        assert tau3_at_bloch(a, b, p, phi) == pytest.approx(tau3(psi), abs=1e-12)


def test_real_inputs_give_real_quartic():
    rng = np.random.default_rng(6)
    q = tangle_quartic(rng.normal(size=8), rng.normal(size=8))
    assert q.is_real
    assert np.all(q.coeffs.imag == 0)
