import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entcap.capability import rate_zero_general, rate_zero_schmidt, entropy_rate_fd
from entcap.numerics import random_unitary
from entcap.self_inverse import boson_parity, h1, make_factor, parity, pauli_z, ProductHamiltonian
from entcap.states import (
    BipartiteState,
    binomial_state,
    concurrence_two_term,
    ecs,
    ecs_branch_overlap,
    entropy,
    max_entangled,
    number_parity,
    optimal_input,
    parity_cat,
    random_state,
    schmidt,
    schmidt_concurrence,
    spin_coherent,
    spin_operators,
)

X0 = 0.9167782798003703  # bisection root of ln(x/(1-x)) = 2/(2x-1)


def _h2(lam):
    return -lam * math.log2(lam) - (1 - lam) * math.log2(1 - lam)


def _rate(x):
    return 2 * math.sqrt(x * (1 - x)) * math.log2(x / (1 - x))


def test_state_must_be_normalized():
    with pytest.raises(ValueError):
        BipartiteState(2, 2, np.array([1, 1, 0, 0]))


def test_schmidt_examples():
    assert np.allclose(schmidt(BipartiteState(2, 2, [1, 0, 0, 0])).coefficients, [1])
    assert np.allclose(schmidt(max_entangled(2)).coefficients, [0.5, 0.5])
    s = BipartiteState.from_vector([1, 1, 0, 1], 2, 2)
    # eigenvalues of [[2/3, 1/3], [1/3, 1/3]]: (1 ± sqrt(5)/3) / 2
    lam = (1 + math.sqrt(5) / 3) / 2
    assert np.allclose(schmidt(s).coefficients, [lam, 1 - lam], atol=1e-12)
    assert abs(lam - 0.8727) < 1e-4


def test_entropy_examples():
    assert entropy(BipartiteState.product([1, 0], [0, 1])) == 0
    assert abs(entropy(max_entangled(2)) - 1) < 1e-12
    assert abs(entropy(max_entangled(3)) - math.log2(3)) < 1e-12
    s = BipartiteState.from_vector([1, 1, 0, 1], 2, 2)
    lam = (1 + math.sqrt(5) / 3) / 2
    assert abs(entropy(s) - _h2(lam)) < 1e-12
    assert abs(entropy(s) - 0.5501) < 1e-4


def test_schmidt_round_trip_random():
    rng = np.random.default_rng(10)
    for _ in range(200):
        dA, dB = (int(v) for v in rng.integers(1, 7, size=2))
        s = random_state(dA, dB, rng)
        sd = schmidt(s)
        assert abs(sd.coefficients.sum() - 1) < 1e-10
        assert np.allclose(sd.vectors_a.conj().T @ sd.vectors_a, np.eye(sd.rank), atol=1e-9)
        assert abs(np.vdot(s.amplitudes, sd.reconstruct())) > 1 - 1e-9


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dA=st.integers(2, 4), dB=st.integers(2, 4))
def test_entropy_symmetric_and_locally_invariant(seed, dA, dB):
    rng = np.random.default_rng(seed)
    s = random_state(dA, dB, rng)
    assert abs(entropy(s) - entropy(s.swapped())) < 1e-10
    local = np.kron(random_unitary(dA, rng), random_unitary(dB, rng))
    assert abs(entropy(s.apply(local)) - entropy(s)) < 1e-9


def test_reduced_densities():
    s = BipartiteState.from_vector([1, 1, 0, 1], 2, 2)
    assert np.allclose(s.reduced("A"), [[2 / 3, 1 / 3], [1 / 3, 1 / 3]])
    assert np.allclose(max_entangled(3).reduced("A"), np.eye(3) / 3)
    assert np.allclose(s.reduced("B"), s.swapped().reduced("A"))


def test_concurrence_examples():
    assert abs(concurrence_two_term(0, 0, math.pi / 4) - 1) < 1e-15
    for t in np.linspace(0, 3, 7):
        assert concurrence_two_term(1, 0, t) == 0
        assert abs(concurrence_two_term(0, 0, t) - abs(math.sin(2 * t))) < 1e-15


def test_concurrence_matches_spin_flip():
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    for t in np.linspace(-2, 2, 50):
        psi = np.array([math.cos(t), 0, 0, -1j * math.sin(t)])
        brute = abs(np.vdot(psi, yy @ psi.conj()))
        assert abs(concurrence_two_term(0, 0, t) - brute) < 1e-10


def test_optimal_input_schmidt_form():
    z = pauli_z()
    s = optimal_input(z, z, 0.5)
    assert np.allclose(schmidt(s).coefficients, [0.5, 0.5])
    assert abs(entropy(s) - 1) < 1e-12
    s = optimal_input(parity(1), parity(1), 0.7)
    assert np.allclose(schmidt(s).coefficients, [0.7, 0.3])


def test_optimal_input_rates():
    expected = 2 * math.sqrt(0.21) * math.log2(7 / 3)
    assert abs(expected - 1.1205) < 2e-4  # quoted value is rounded; exact 1.12034
    p1 = parity(1)
    s = optimal_input(p1, p1, 0.7)
    assert abs(rate_zero_general(h1(1), s) - expected) < 1e-9
    assert abs(entropy_rate_fd(h1(1), s) - expected) < 1e-4
    for x in (0.6, 0.75, 0.9, X0):
        for xa, xb in ((pauli_z(), pauli_z()), (p1, p1), (parity("1/2"), boson_parity(8))):
            s = optimal_input(xa, xb, x)
            assert abs(rate_zero_schmidt(xa, xb, schmidt(s)) - _rate(x)) < 1e-9


def test_optimal_input_phase_orientation():
    z = pauli_z()
    plus = rate_zero_general(h1("1/2"), optimal_input(z, z, X0, phase=-1j))
    minus = rate_zero_general(h1("1/2"), optimal_input(z, z, X0, phase=1j))
    assert abs(plus + minus) < 1e-12
    assert plus > 1.9


def test_optimal_input_rejects_bad_weight():
    with pytest.raises(ValueError):
        optimal_input(pauli_z(), pauli_z(), 1.0)


def test_spin_operators_algebra():
    for j in ("1/2", 1, "3/2", 2):
        jz, jp, jm = spin_operators(j)
        assert np.allclose(jz @ jp - jp @ jz, jp)
        assert np.allclose(jp @ jm - jm @ jp, 2 * jz)


def test_spin_coherent_examples():
    assert np.allclose(spin_coherent(1, 0), [1, 0, 0])
    for j in ("1/2", 1, "3/2", 2):
        for eta in (0.3, 1.0, 0.8 * np.exp(1.1j)):
            v = spin_coherent(j, eta)
            assert abs(np.linalg.norm(v) - 1) < 1e-12
            assert np.max(np.abs(number_parity(v.size) * v - spin_coherent(j, -eta))) < 1e-10
    assert abs(ecs_branch_overlap("1/2", math.pi / 4)) < 1e-12


def test_spin_coherent_overlap_closed_form():
    for j, tj in (("1/2", 1), (1, 2), ("3/2", 3)):
        for r in (0.2, 0.7, 1.0):
            assert abs(ecs_branch_overlap(j, r * np.exp(0.4j)) - math.cos(2 * r) ** tj) < 1e-10


def test_spin_coherent_is_a_binomial_state_in_modulus():
    for tj in (1, 2, 5):
        for r in (0.3, 1.0):
            scs = spin_coherent(f"{tj}/2", r)
            b = binomial_state(tj, math.sin(r) ** 2, tj + 1)
            assert np.allclose(np.abs(scs), np.abs(b), atol=1e-12)


def test_ecs_properties():
    # orthogonal branches at |eta| = pi/4 reproduce the two-branch rate (with the +i branch phase, negative)
    e = ecs(1, math.pi / 4, X0)
    assert abs(rate_zero_general(h1(1), e) + _rate(X0)) < 1e-6
    e = ecs(1, math.pi / 4, X0, phase=-1j)
    assert abs(rate_zero_general(h1(1), e) - _rate(X0)) < 1e-6
    assert abs(entropy_rate_fd(h1(1), e) - _rate(X0)) < 1e-4
    assert np.allclose(schmidt(ecs(1, math.pi / 4, 0.5)).coefficients, [0.5, 0.5])
    for eta in (0.4, 1.0, 0.9 * np.exp(0.5j)):
        assert abs(rate_zero_general(h1(1), ecs(1, eta, 0.5))) < 1e-12


def test_ecs_degenerate_rejected():
    with pytest.raises(ValueError):
        ecs(1, 0.0, 0.5)


def test_binomial_state_examples():
    assert np.allclose(binomial_state(4, 0.0, 6), [1, 0, 0, 0, 0, 0])
    assert np.allclose(binomial_state(4, 1.0, 6), [0, 0, 0, 0, 1, 0])
    b = binomial_state(4, 0.3, 8)
    assert abs(np.linalg.norm(b) - 1) < 1e-12
    assert abs(np.sum(np.arange(8) * np.abs(b) ** 2) - 1.2) < 1e-12
    with pytest.raises(ValueError):
        binomial_state(8, 0.3, 8)


def test_binomial_cat_is_optimal_for_oscillator_parities():
    # p = 1/2 makes the parity-flipped branch orthogonal, as the SCS at |eta| = pi/4
    D = 10
    b = binomial_state(6, 0.5, D)
    state, overlap = parity_cat(b, b, X0, phase=-1j)
    assert abs(overlap) < 1e-12
    h3 = ProductHamiltonian(boson_parity(D), boson_parity(D))
    assert abs(rate_zero_general(h3, state) - _rate(X0)) < 1e-9
    scs = spin_coherent(1, math.pi / 4)
    mixed, _ = parity_cat(scs, b, X0, phase=-1j)
    h2 = ProductHamiltonian(parity(1), boson_parity(D))
    assert abs(rate_zero_general(h2, mixed) - _rate(X0)) < 1e-9


def test_max_entangled():
    m = max_entangled(2)
    assert np.allclose(m.amplitudes, np.array([1, 0, 0, 1]) / math.sqrt(2))
    with pytest.raises(ValueError):
        max_entangled(1)


def test_schmidt_concurrence_two_qubit():
    for t in np.linspace(0, 1.5, 11):
        s = BipartiteState(2, 2, [math.cos(t), 0, 0, -1j * math.sin(t)])
        assert abs(schmidt_concurrence(s) - abs(math.sin(2 * t))) < 1e-12


def test_make_factor_used_for_states():
    x = make_factor(np.array([[0, 1], [1, 0]]))
    s = optimal_input(x, x, 0.8)
    assert abs(rate_zero_general(ProductHamiltonian(x, x), s) - _rate(0.8)) < 1e-9
