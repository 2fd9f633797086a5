import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import random_pure, teleport_bruteforce
from qlink.errors import ValidationError
from qlink.qstate import DensityMatrix, PureState, fidelity, partial_trace, von_neumann_entropy
from qlink.teleport import (OUTCOME_ORDER, BellKind, Delta, GaussianPhase, Samples, bell_vector,
                            correction_unitary, dephase, make_bell, random_qubit, run_trials,
                            spin_decoherence, teleport, uniform_phase)

S2 = math.sqrt(2)
# Bell states written out by hand in the |+>, |-> basis
HAND = {
    BellKind.PsiMinus: np.array([0, 1, -1, 0]) / S2,
    BellKind.PsiPlus: np.array([0, 1, 1, 0]) / S2,
    BellKind.PhiMinus: np.array([1, 0, 0, -1]) / S2,
    BellKind.PhiPlus: np.array([1, 0, 0, 1]) / S2,
}


def _same_up_to_phase(a, b):
    return abs(abs(np.vdot(a, b)) - 1.0) < 1e-12


@pytest.mark.parametrize("kind", list(BellKind))
def test_bell_states(kind):
    assert _same_up_to_phase(make_bell(kind).amplitudes, HAND[kind])
    red = partial_trace(make_bell(kind), "A")
    assert np.allclose(red.matrix, np.eye(2) / 2, atol=1e-15)


def test_exactly_four_kinds_and_bits():
    assert len(BellKind) == 4
    assert {k.bits for k in BellKind} == {(0, 0), (0, 1), (1, 0), (1, 1)}
    with pytest.raises(ValidationError):
        BellKind.from_bits((2, 0))
    with pytest.raises(ValidationError):
        BellKind.parse("Omega")


def test_corrections_unitary():
    for s in BellKind:
        for m in BellKind:
            u = correction_unitary(m.bits, s)
            assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-12)


def test_psiminus_correction_table():
    X = np.array([[0, 1], [1, 0]])
    Z = np.diag([1, -1])
    expect = {BellKind.PsiMinus: np.eye(2), BellKind.PsiPlus: Z, BellKind.PhiMinus: X,
              BellKind.PhiPlus: Z @ X}
    for m, op in expect.items():
        u = correction_unitary(m, BellKind.PsiMinus)
        # equal up to global phase
        phase = np.trace(op.conj().T @ u) / 2
        assert abs(abs(phase) - 1) < 1e-12
        assert np.allclose(u, phase * op, atol=1e-12)


@pytest.mark.parametrize("shared", list(BellKind))
def test_correction_table_bruteforce(shared):
    rng = np.random.default_rng(11)
    bells = [HAND[k] for k in OUTCOME_ORDER]
    for _ in range(20):
        chi = random_pure(rng, 2)
        for (p, bob), kind in zip(teleport_bruteforce(chi, HAND[shared], bells), OUTCOME_ORDER):
            assert p == pytest.approx(0.25, abs=1e-12)
            u = correction_unitary(kind, shared)
            fixed = u @ bob @ u.conj().T
            assert np.vdot(chi, fixed @ chi).real == pytest.approx(1.0, abs=1e-12)


def test_teleport_every_outcome_recovers_input():
    rng = np.random.default_rng(3)
    chi = PureState(random_pure(rng, 2))
    seen = set()
    for seed in range(64):
        out = teleport(chi, BellKind.PsiMinus, seed)
        seen.add(out.outcome)
        assert out.fidelity_with_input == pytest.approx(1.0, abs=1e-10)
        assert fidelity(out.bob_corrected, chi) == pytest.approx(1.0, abs=1e-10)
    assert seen == set(BellKind)


def test_teleport_basis_state_any_kind():
    for kind in BellKind:
        assert teleport(PureState([1, 0]), kind, 9).fidelity_with_input == pytest.approx(1.0, abs=1e-12)


def test_teleport_rejects_bad_input():
    with pytest.raises(ValidationError):
        teleport([1, 1], BellKind.PsiMinus, 0)
    with pytest.raises(ValidationError):
        teleport(PureState([1, 0]), BellKind.PsiMinus, 0, dephase_p=1.5)


def test_noiseless_fidelity_property():
    rng = np.random.default_rng(7)
    worst = 1.0
    for _ in range(1000):
        chi = random_qubit(rng)
        for kind in BellKind:
            worst = min(worst, teleport(chi, kind, rng).fidelity_with_input)
    assert worst == pytest.approx(1.0, abs=1e-10)


def test_outcomes_uniform():
    summary = run_trials(40000, seed=12345)
    for count in summary.histogram.values():
        assert abs(count / 40000 - 0.25) <= 0.011


def test_outcomes_input_independent_fixed_state():
    chi = PureState.normalized([0.95, 0.1 + 0.3j])
    summary = run_trials(40000, seed=99, chi=chi)
    for count in summary.histogram.values():
        assert abs(count / 40000 - 0.25) <= 0.011


def test_seed_reproducible():
    a = [teleport(PureState([0.6, 0.8]), BellKind.PhiPlus, np.random.default_rng(5)).classical_bits
         for _ in range(1)]
    rng1, rng2 = np.random.default_rng(77), np.random.default_rng(77)
    seq1 = [teleport(random_qubit(rng1), BellKind.PsiMinus, rng1).classical_bits for _ in range(200)]
    seq2 = [teleport(random_qubit(rng2), BellKind.PsiMinus, rng2).classical_bits for _ in range(200)]
    assert seq1 == seq2 and a
    assert run_trials(500, seed=4) == run_trials(500, seed=4)


def test_random_qubit_recipe():
    rng = np.random.default_rng(2024)
    u1, u2 = np.random.default_rng(2024).random(2)
    chi = random_qubit(rng).amplitudes
    theta = math.acos(1 - 2 * u1)
    assert chi[0] == pytest.approx(math.cos(theta / 2), abs=1e-15)
    assert chi[1] == pytest.approx(np.exp(2j * math.pi * u2) * math.sin(theta / 2), abs=1e-15)


def test_dephase_examples():
    plus_x = PureState.normalized([1, 1])
    rho = plus_x.density()
    assert np.array_equal(dephase(rho, 0.0).matrix, rho.matrix)
    full = dephase(rho, 1.0)
    assert np.allclose(full.matrix, np.eye(2) / 2)
    assert fidelity(full, plus_x) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValidationError):
        dephase(rho, -0.1)


@given(st.floats(0, 1), st.floats(0, 1))
def test_dephase_entropy_monotone(p1, p2):
    rho = PureState.normalized([1, 0.4 + 0.2j]).density()
    lo, hi = sorted((p1, p2))
    assert von_neumann_entropy(dephase(rho, lo)) <= von_neumann_entropy(dephase(rho, hi)) + 1e-12


def test_mean_fidelity_decreases_with_dephasing():
    means = [run_trials(400, seed=31, dephase_p=p).mean_fidelity for p in (0.0, 0.25, 0.5, 0.75, 1.0)]
    assert all(a > b for a, b in zip(means, means[1:]))


def test_spin_decoherence_delta():
    r = spin_decoherence(Delta(0.7))
    assert r.mixing == pytest.approx(0.0, abs=1e-15) and r.entropy_bits == pytest.approx(0.0, abs=1e-9)


def test_spin_decoherence_uniform():
    r = spin_decoherence(uniform_phase(360))
    assert r.mixing == pytest.approx(0.5, abs=1e-12)
    assert r.entropy_bits == pytest.approx(1.0, abs=1e-9)


def test_spin_decoherence_gaussian_closed_form():
    r = spin_decoherence(GaussianPhase(0.0, 1.0))
    p = 0.5 * (1 - math.exp(-0.5))
    assert r.mixing == pytest.approx(p, rel=1e-14)
    assert r.mixing == pytest.approx(0.1967, abs=1e-4)
    h = -p * math.log2(p) - (1 - p) * math.log2(1 - p)
    assert r.entropy_bits == pytest.approx(h, rel=1e-14)


def test_spin_decoherence_gaussian_monte_carlo():
    rng = np.random.default_rng(8)
    phases = rng.normal(0.0, 1.0, 400_000)
    weights = np.full(phases.size, 1.0 / phases.size)
    mc = spin_decoherence(Samples(tuple(zip(phases, weights))))
    exact = spin_decoherence(GaussianPhase(0.0, 1.0))
    assert mc.entropy_bits == pytest.approx(exact.entropy_bits, abs=1e-3)


@given(st.lists(st.tuples(st.floats(-20, 20), st.floats(0.01, 1.0)), min_size=1, max_size=12))
def test_spin_entropy_matches_spectral(points):
    total = sum(w for _, w in points)
    spread = Samples(tuple((p, w / total) for p, w in points))
    r = spin_decoherence(spread)
    assert 0.0 <= r.entropy_bits <= 1.0
    assert r.entropy_bits == pytest.approx(von_neumann_entropy(r.rho_f), abs=1e-9)


def test_samples_validation():
    with pytest.raises(ValidationError):
        Samples(((0.0, 0.5),))
    with pytest.raises(ValidationError):
        Samples(((0.0, 1.5), (1.0, -0.5)))
