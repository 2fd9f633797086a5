"""Small-dimension quantum states: density matrices, fidelity, entropy,
partial trace and the helicity phase of a massless particle.

Qubit basis ordering is ``(|+>, |->)`` (helicity +1 first), and multi-qubit
states use the Kronecker ordering of numpy.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError

MAX_DIM = 16
TOL = 1e-10
ENTROPY_CUTOFF = 1e-12


def _check_dim(dim):
    if not 1 <= dim <= MAX_DIM:
        raise ValidationError(f"dimension {dim} outside 1..{MAX_DIM}")


class PureState:
    """Normalised state vector.

    Parameters
    ----------
    amplitudes : array_like of complex
        Must satisfy ``sum |a_i|^2 = 1`` within 1e-10.
    """

    __slots__ = ("_amps",)

    def __init__(self, amplitudes):
        a = np.array(amplitudes, dtype=complex).reshape(-1)
        _check_dim(a.size)
        norm = float(np.vdot(a, a).real)
        if abs(norm - 1.0) > TOL:
            raise ValidationError(f"state is not normalised (|psi|^2 = {norm:.12g})")
        a.setflags(write=False)
        self._amps = a

    @classmethod
    def normalized(cls, amplitudes):
        a = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = np.linalg.norm(a)
        if n == 0:
            raise ValidationError("cannot normalise the zero vector")
        return cls(a / n)

    @property
    def amplitudes(self):
        return self._amps

    @property
    def dim(self):
        return self._amps.size

    def density(self):
        return DensityMatrix(np.outer(self._amps, self._amps.conj()))

    def __repr__(self):
        return f"PureState({self._amps!r})"


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix (tolerance 1e-10)."""

    __slots__ = ("_m",)

    def __init__(self, entries, check=True):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {m.shape}")
        _check_dim(m.shape[0])
        if check:
            if np.max(np.abs(m - m.conj().T)) > TOL:
                raise ValidationError("density matrix is not Hermitian")
            tr = np.trace(m)
            if abs(tr - 1.0) > TOL:
                raise ValidationError(f"density matrix trace is {tr.real:.12g}, not 1")
            if np.linalg.eigvalsh(m).min() < -TOL:
                raise ValidationError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        self._m = m

    @classmethod
    def from_state(cls, state):
        if isinstance(state, PureState):
            return state.density()
        return PureState(state).density()

    @classmethod
    def maximally_mixed(cls, dim):
        return cls(np.eye(dim) / dim)

    @property
    def matrix(self):
        return self._m

    @property
    def dim(self):
        return self._m.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self._m)

    def allclose(self, other, atol=1e-10):
        return self.dim == other.dim and bool(np.allclose(self._m, other._m, rtol=0, atol=atol))

    def __repr__(self):
        return f"DensityMatrix({self._m!r})"


def as_density(x):
    if isinstance(x, DensityMatrix):
        return x
    if isinstance(x, PureState):
        return x.density()
    arr = np.asarray(x)
    if arr.ndim == 1:
        return PureState(arr).density()
    return DensityMatrix(arr)


def _psd_sqrt(m):
    w, v = np.linalg.eigh(m)
    w = np.where(w < TOL, np.clip(w, 0.0, None), w)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma):
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``.

    Reduces to ``|<psi|phi>|^2`` for pure states. Symmetric in its arguments
    and clamped to [0, 1].
    """
    vec_a = rho.amplitudes if isinstance(rho, PureState) else None
    vec_b = sigma.amplitudes if isinstance(sigma, PureState) else None
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dim != sigma.dim:
        raise ValidationError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    if vec_a is None:
        vec_a = _pure_vector(rho)
    if vec_a is None and vec_b is None:
        vec_b = _pure_vector(sigma)
    # sqrt of a rank-1 matrix amplifies rounding to ~1e-8; use <psi|other|psi>
    if vec_a is not None:
        return _clamp(np.vdot(vec_a, sigma.matrix @ vec_a).real)
    if vec_b is not None:
        return _clamp(np.vdot(vec_b, rho.matrix @ vec_b).real)
    s = _psd_sqrt(rho.matrix)
    inner = s @ sigma.matrix @ s
    inner = 0.5 * (inner + inner.conj().T)
    w = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return _clamp(float(np.sum(np.sqrt(w))) ** 2)


def _clamp(f):
    return min(max(float(f), 0.0), 1.0)


def _pure_vector(rho):
    """Dominant eigenvector when ``rho`` is pure to within 1e-12, else None."""
    w, v = np.linalg.eigh(rho.matrix)
    if w[-1] > 1.0 - 1e-12:
        return v[:, -1]
    return None


def binary_entropy(p):
    """``-p log2 p - (1-p) log2 (1-p)`` with ``0 log 0 = 0``."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"probability {p} outside [0, 1]")
    return 0.0 - sum(x * math.log2(x) for x in (p, 1.0 - p) if x > ENTROPY_CUTOFF)


def von_neumann_entropy(rho):
    """``-Tr rho log2 rho`` in bits; eigenvalues below 1e-12 contribute 0."""
    w = as_density(rho).eigenvalues()
    w = w[w > ENTROPY_CUTOFF]
    s = -float(np.sum(w * np.log2(w)))
    return max(s, 0.0)


def _split_dims(dim, dims):
    if dims is None:
        if dim % 2 or dim < 4:
            raise ValidationError(f"dimension {dim} does not factor as qubit x subsystem")
        dims = (2, dim // 2)
    da, db = (int(d) for d in dims)
    if da < 1 or db < 1 or da * db != dim:
        raise ValidationError(f"dimension {dim} does not factor as {da} x {db}")
    return da, db


def partial_trace(rho, keep="A", dims=None):
    """Reduced state of one side of a bipartite system.

    Parameters
    ----------
    rho : DensityMatrix
        State on A (x) B.
    keep : {"A", "B"}
    dims : (int, int), optional
        Subsystem dimensions; defaults to a qubit A and whatever remains for B.
    """
    rho = as_density(rho)
    da, db = _split_dims(rho.dim, dims)
    t = rho.matrix.reshape(da, db, da, db)
    if keep == "A":
        out = np.einsum("ijkj->ik", t)
    elif keep == "B":
        out = np.einsum("ijil->jl", t)
    else:
        raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")
    return DensityMatrix(out)


def apply_helicity_phase(rho, alpha):
    """Transport phase of a massless helicity qubit.

    Each helicity component picks up ``exp(-i lambda alpha)``, so the
    ``(+,-)`` coherence rotates by ``exp(-2i alpha)`` and ``(-,+)`` by
    ``exp(+2i alpha)``. Populations are untouched, and a helicity-diagonal
    state is returned unchanged.
    """
    rho = as_density(rho)
    if rho.dim != 2:
        raise ValidationError(f"helicity phase acts on a qubit, got dimension {rho.dim}")
    m = rho.matrix
    if m[0, 1] == 0 and m[1, 0] == 0:
        return rho
    out = m.copy()
    phase = complex(math.cos(2 * alpha), -math.sin(2 * alpha))
    out[0, 1] = m[0, 1] * phase
    out[1, 0] = m[1, 0] * phase.conjugate()
    return DensityMatrix(out, check=False)
