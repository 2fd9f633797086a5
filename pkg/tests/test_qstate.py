import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import entropy_bits, fidelity_sqrtm, random_density, random_pure, random_unitary
from qlink.errors import ValidationError
from qlink.qstate import (DensityMatrix, PureState, apply_helicity_phase, fidelity,
                          partial_trace, von_neumann_entropy)

seeds = st.integers(0, 2 ** 32 - 1)
PLUS = PureState([1, 0])
MINUS = PureState([0, 1])


def test_pure_state_validation():
    with pytest.raises(ValidationError):
        PureState([1, 1])
    with pytest.raises(ValidationError):
        PureState(np.ones(17) / math.sqrt(17))
    assert PureState.normalized([1, 1]).dim == 2


def test_density_validation():
    with pytest.raises(ValidationError, match="Hermitian"):
        DensityMatrix([[0.5, 0.1], [0.2, 0.5]])
    with pytest.raises(ValidationError, match="trace"):
        DensityMatrix(np.eye(2))
    with pytest.raises(ValidationError, match="negative"):
        DensityMatrix([[1.5, 0], [0, -0.5]])
    with pytest.raises(ValidationError):
        DensityMatrix(np.ones((2, 3)))


def test_fidelity_examples():
    rho = DensityMatrix(random_density(np.random.default_rng(1), 3))
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
    assert fidelity(PLUS, MINUS) == pytest.approx(0.0, abs=1e-12)
    assert fidelity(PLUS, PureState.normalized([1, 1])) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_dimension_mismatch():
    with pytest.raises(ValidationError, match="mismatch"):
        fidelity(PLUS, DensityMatrix.maximally_mixed(3))


@given(seeds, st.integers(2, 6))
def test_fidelity_symmetric_and_matches_sqrtm(seed, dim):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, dim), random_density(rng, dim)
    f_ab = fidelity(DensityMatrix(a), DensityMatrix(b))
    assert f_ab == pytest.approx(fidelity(DensityMatrix(b), DensityMatrix(a)), abs=1e-10)
    assert f_ab == pytest.approx(fidelity_sqrtm(a, b), abs=1e-8)
    assert 0.0 <= f_ab <= 1.0


def test_fidelity_pure_pairs_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(500):
        dim = int(rng.integers(2, 9))
        psi, phi = random_pure(rng, dim), random_pure(rng, dim)
        expected = abs(np.vdot(psi, phi)) ** 2
        assert fidelity(PureState(psi), PureState(phi)) == pytest.approx(expected, abs=1e-9)


def test_entropy_examples():
    assert von_neumann_entropy(PureState.normalized([1, 2j, 3])) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(DensityMatrix.maximally_mixed(2)) == pytest.approx(1.0, abs=1e-12)
    rho = DensityMatrix(np.diag([0.9, 0.1]))
    assert von_neumann_entropy(rho) == pytest.approx(0.4690, abs=5e-5)
    assert von_neumann_entropy(rho) == pytest.approx(entropy_bits([0.9, 0.1]), abs=1e-12)


@given(seeds, st.integers(2, 8))
def test_entropy_bounds_and_unitary_invariance(seed, dim):
    rng = np.random.default_rng(seed)
    m = random_density(rng, dim)
    u = random_unitary(rng, dim)
    s = von_neumann_entropy(DensityMatrix(m))
    assert -1e-12 <= s <= math.log2(dim) + 1e-12
    rotated = u @ m @ u.conj().T
    assert von_neumann_entropy(DensityMatrix(rotated)) == pytest.approx(s, abs=1e-9)
    assert s == pytest.approx(entropy_bits(np.linalg.eigvalsh(m)), abs=1e-9)


def test_partial_trace_product():
    rng = np.random.default_rng(5)
    a, b = random_density(rng, 2), random_density(rng, 3)
    prod = DensityMatrix(np.kron(a, b))
    assert np.allclose(partial_trace(prod, "A", (2, 3)).matrix, a, atol=1e-12)
    assert np.allclose(partial_trace(prod, "B", (2, 3)).matrix, b, atol=1e-12)


def test_partial_trace_singlet():
    singlet = PureState(np.array([0, 1, -1, 0]) / math.sqrt(2))
    for keep in ("A", "B"):
        assert np.allclose(partial_trace(singlet, keep).matrix, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_errors():
    with pytest.raises(ValidationError):
        partial_trace(DensityMatrix.maximally_mixed(6), "A", (4, 2))
    with pytest.raises(ValidationError):
        partial_trace(DensityMatrix.maximally_mixed(3), "A")
    with pytest.raises(ValidationError):
        partial_trace(DensityMatrix.maximally_mixed(4), "C")


@given(seeds)
def test_partial_trace_unit_trace(seed):
    rng = np.random.default_rng(seed)
    rho = DensityMatrix(random_density(rng, 8))
    for keep, dims in (("A", (2, 4)), ("B", (2, 4)), ("A", (4, 2))):
        assert np.trace(partial_trace(rho, keep, dims).matrix).real == pytest.approx(1.0, abs=1e-12)


def test_helicity_phase_examples():
    diag = DensityMatrix(np.diag([0.3, 0.7]))
    out = apply_helicity_phase(diag, 1.234)
    assert out is diag
    assert np.max(np.abs(out.matrix - diag.matrix)) < 1e-12
    rho = DensityMatrix([[0.5, 0.5], [0.5, 0.5]])
    assert np.array_equal(apply_helicity_phase(rho, 0.0).matrix, rho.matrix)
    out = apply_helicity_phase(rho, math.pi / 4)
    assert out.matrix[0, 1] == pytest.approx(0.5 * np.exp(-1j * math.pi / 2), abs=1e-15)
    # explicit U rho U^dagger with U = diag(e^{-i alpha}, e^{+i alpha})
    u = np.diag([np.exp(-1j * math.pi / 4), np.exp(1j * math.pi / 4)])
    assert np.allclose(out.matrix, u @ rho.matrix @ u.conj().T, atol=1e-15)


def test_helicity_phase_dimension():
    with pytest.raises(ValidationError):
        apply_helicity_phase(DensityMatrix.maximally_mixed(3), 0.1)


@given(seeds, st.floats(-10, 10))
def test_helicity_phase_properties(seed, alpha):
    rho = DensityMatrix(random_density(np.random.default_rng(seed), 2))
    out = apply_helicity_phase(rho, alpha)
    m = out.matrix
    assert np.trace(m).real == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(m, m.conj().T, atol=1e-15)
    assert np.allclose(np.linalg.eigvalsh(m), rho.eigenvalues(), atol=1e-12)
    assert np.allclose(np.diag(m), np.diag(rho.matrix), atol=0)
    back = apply_helicity_phase(out, -alpha)
    assert np.max(np.abs(back.matrix - rho.matrix)) < 1e-12
