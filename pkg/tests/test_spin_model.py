import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tangleroof.spin_model import (ModelParams, RankError, build_hamiltonian, ground_state,
                                   model_mixture, parity_commutator_norm, reduce_to_three_sites)

# independent oracle (Kronecker products + dense eigh), frozen
E0_REF = -3.1855344085906467
COMM_REF = 1.2514757203218467
PMODEL_REF = 0.919661155916035
REF = ModelParams(0.1, 0.5, 0.05 * math.pi)

params_st = st.builds(ModelParams, st.floats(-1, 1), st.floats(0, 2), st.floats(0, math.pi / 2))


@pytest.mark.parametrize("kw", [dict(L=2), dict(h=-0.1), dict(alpha=2.0), dict(gamma=math.nan),
                                dict(boundary="twisted")])
def test_params_validation(kw):
    base = dict(gamma=0.1, h=0.5, alpha=0.1)
    base.update(kw)
    with pytest.raises(ValueError):
        ModelParams(**base)


def test_size_cap():
    with pytest.raises(ValueError):
        build_hamiltonian(ModelParams(0.1, 0.5, 0.1, L=13))
    with pytest.raises(ValueError):
        build_hamiltonian(ModelParams(0.1, 0.5, 0.1, L=6), max_sites=5)


def test_ising_point_degenerate():
    gs = ground_state(build_hamiltonian(ModelParams(1.0, 0.0, 0.0)))
    assert gs.energy == pytest.approx(-4.0, abs=1e-12)
    assert gs.degenerate
    plus = np.ones(16) / 4.0
    minus = np.array([(-1) ** bin(k).count("1") for k in range(16)]) / 4.0
    span = np.column_stack([plus, minus])
    resid = gs.amplitudes - span @ np.linalg.lstsq(span, gs.amplitudes, rcond=None)[0]
    assert np.linalg.norm(resid) < 1e-10


def test_strong_field_limit():
    gs = ground_state(build_hamiltonian(ModelParams(1.0, 20.0, 0.0)))
    assert gs.amplitudes[0] > 0.99
    gs = ground_state(build_hamiltonian(ModelParams(0.3, 200.0, 0.0)))
    assert gs.energy == pytest.approx(-800.0, abs=2.0)


def test_open_boundary_drops_one_bond():
    Hp = build_hamiltonian(ModelParams(1.0, 0.0, 0.0, boundary="periodic"))
    Ho = build_hamiltonian(ModelParams(1.0, 0.0, 0.0, boundary="open"))
    assert np.linalg.eigvalsh(Hp)[0] == pytest.approx(-4.0)
    assert np.linalg.eigvalsh(Ho)[0] == pytest.approx(-3.0)


def test_reference_energy_and_parity():
    H = build_hamiltonian(REF)
    gs = ground_state(H)
    assert gs.energy == pytest.approx(E0_REF, abs=1e-10)
    assert np.linalg.norm(H @ gs.amplitudes - gs.energy * gs.amplitudes) < 1e-10
    assert parity_commutator_norm(H) == pytest.approx(COMM_REF, abs=1e-10)


def test_reference_p_model():
    mix, _ = model_mixture(REF)
    assert mix.p_model == pytest.approx(PMODEL_REF, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(params_st)
def test_hamiltonian_properties(params):
    H = build_hamiltonian(params)
    assert np.linalg.norm(H - H.conj().T) < 1e-13
    gs = ground_state(H)
    assert abs(np.linalg.norm(gs.amplitudes) - 1) < 1e-12
    assert np.max(np.abs(np.imag(gs.amplitudes))) < 1e-10
    assert gs.amplitudes[np.argmax(np.abs(gs.amplitudes))] > 0


@pytest.mark.parametrize("gamma", [0.0, 0.4, 1.0])
@pytest.mark.parametrize("h", [0.2, 1.3])
def test_parity_iff_untilted(gamma, h):
    assert parity_commutator_norm(build_hamiltonian(ModelParams(gamma, h, 0.0))) < 1e-12
    for alpha in (0.05, 0.7, math.pi / 2):
        assert parity_commutator_norm(build_hamiltonian(ModelParams(gamma, h, alpha))) > 1e-6


@settings(max_examples=30, deadline=None)
@given(params_st)
def test_reduction_invariants(params):
    gs = ground_state(build_hamiltonian(params))
    mix = reduce_to_three_sites(gs, 0)
    assert abs(mix.psi0 @ mix.psi1) < 1e-10
    for v in (mix.psi0, mix.psi1):
        assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert np.all(mix.eigenvalues > -1e-12)
    assert mix.eigenvalues.sum() == pytest.approx(1.0, abs=1e-12)
    # brute-force partial trace over site 0
    t = gs.amplitudes.reshape(2, 8)
    rho = t.T @ t.conj()
    assert np.max(np.abs(rho - mix.rho())) < 1e-10


def test_periodic_sites_equivalent():
    gs = ground_state(build_hamiltonian(REF))
    ref = reduce_to_three_sites(gs, 0).eigenvalues
    for s in range(1, 4):
        assert np.allclose(reduce_to_three_sites(gs, s).eigenvalues, ref, atol=1e-10)


def test_rank_error_for_long_chain():
    gs = ground_state(build_hamiltonian(ModelParams(0.3, 0.6, 0.2, L=6)))
    with pytest.raises(RankError):
        reduce_to_three_sites(gs, 0)


def test_random_four_qubit_state_rank_two():
    rng = np.random.default_rng(3)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    mix = reduce_to_three_sites(v / np.linalg.norm(v), 2)
    assert np.count_nonzero(mix.eigenvalues > 1e-10) <= 2
