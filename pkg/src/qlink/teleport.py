"""Qubit teleportation through a shared Bell pair, a dephasing channel, and
the spin-decoherence toy model for a massive particle with a momentum spread.

Qubits use the basis ``(|+>, |->)``. Registers are ordered ``(A', A, B)``:
A' holds the unknown state, (A, B) the shared pair.

Random numbers come from ``numpy.random.default_rng(seed)`` (PCG64). A
random input state consumes two uniforms ``u1, u2``:
``cos(theta) = 1 - 2 u1``, ``phi = 2 pi u2``,
``|chi> = cos(theta/2)|+> + exp(i phi) sin(theta/2)|->``.
A Bell measurement consumes one uniform ``u`` and picks the first outcome
(in the order PhiPlus, PhiMinus, PsiPlus, PsiMinus) whose cumulative
probability exceeds ``u``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .qstate import DensityMatrix, PureState, binary_entropy

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
XZ = X @ Z


class BellKind(enum.Enum):
    """The four Bell states, each written as ``(1 (x) P) |PhiPlus>``."""

    PhiPlus = (0, 0)
    PhiMinus = (0, 1)
    PsiPlus = (1, 0)
    PsiMinus = (1, 1)

    @property
    def bits(self):
        return self.value

    @property
    def pauli(self):
        return _PAULI[self]

    @classmethod
    def from_bits(cls, bits):
        try:
            return cls(tuple(int(b) for b in bits))
        except (ValueError, TypeError):
            raise ValidationError(f"invalid outcome bits {bits!r}")

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls[name]
        except KeyError:
            raise ValidationError(
                f"unknown Bell state {name!r}; choose from {[k.name for k in cls]}")


_PAULI = {BellKind.PhiPlus: I2, BellKind.PhiMinus: Z,
          BellKind.PsiPlus: X, BellKind.PsiMinus: XZ}
OUTCOME_ORDER = tuple(BellKind)

_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


def bell_vector(kind):
    return np.kron(I2, BellKind.parse(kind).pauli) @ _PHI_PLUS


_BELL = {k: bell_vector(k) for k in BellKind}
_BELL_BRAS = np.array([_BELL[k].conj() for k in OUTCOME_ORDER])


def make_bell(kind):
    """Bell state as a two-qubit :class:`PureState`.

    PsiMinus is ``(|+-> - |-+>)/sqrt 2`` and PhiPlus ``(|++> + |-->)/sqrt 2``.
    """
    return PureState(bell_vector(kind))


def correction_unitary(outcome_bits, shared):
    """Unitary Bob applies after learning the measurement outcome.

    With shared pair ``(1 (x) P_s)|PhiPlus>`` and outcome
    ``(1 (x) P_m)|PhiPlus>``, Bob holds ``P_s P_m |chi>`` (up to a factor
    1/2, since every Pauli here is real), so the correction is
    ``(P_s P_m)^dagger``. Defined up to global phase.
    """
    m = BellKind.from_bits(outcome_bits) if not isinstance(outcome_bits, BellKind) else outcome_bits
    s = BellKind.parse(shared)
    return (s.pauli @ m.pauli).conj().T


_CORRECTIONS = {(m, s): correction_unitary(m, s) for m in BellKind for s in BellKind}


def dephase(rho, p):
    """Phase-damping channel: off-diagonals scaled by ``1 - p``."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"dephasing probability {p} outside [0, 1]")
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    if rho.dim != 2:
        raise ValidationError("dephasing acts on a qubit")
    m = rho.matrix.copy()
    m[0, 1] *= 1.0 - p
    m[1, 0] *= 1.0 - p
    return DensityMatrix(m, check=False)


@dataclass(frozen=True)
class TeleportOutcome:
    classical_bits: tuple
    bob_raw: DensityMatrix
    bob_corrected: DensityMatrix
    fidelity_with_input: float

    @property
    def outcome(self):
        return BellKind.from_bits(self.classical_bits)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def branches(chi, shared):
    """Unnormalised Bob states for every measurement outcome.

    Computed by projecting the full three-qubit product state onto each Bell
    state of (A', A).
    """
    chi = chi if isinstance(chi, PureState) else PureState(chi)
    if chi.dim != 2:
        raise ValidationError("teleportation input must be a qubit")
    full = np.kron(chi.amplitudes, _BELL[BellKind.parse(shared)]).reshape(4, 2)
    rows = _BELL_BRAS @ full
    return dict(zip(OUTCOME_ORDER, rows))


def teleport(chi, shared=BellKind.PsiMinus, rng_seed=None, dephase_p=0.0):
    """Run the protocol once.

    Parameters
    ----------
    chi : PureState
        Qubit to send.
    shared : BellKind
        Pair shared by Alice (A) and Bob (B).
    rng_seed : int or numpy.random.Generator
        Source of the Bell-measurement randomness.
    dephase_p : float
        Dephasing applied to Bob's qubit before the correction.
    """
    chi = chi if isinstance(chi, PureState) else PureState(chi)
    if chi.dim != 2:
        raise ValidationError("teleportation input must be a qubit")
    shared = BellKind.parse(shared)
    if not 0.0 <= dephase_p <= 1.0:
        raise ValidationError(f"dephasing probability {dephase_p} outside [0, 1]")
    rows = _BELL_BRAS @ np.kron(chi.amplitudes, _BELL[shared]).reshape(4, 2)
    probs = np.einsum("ij,ij->i", rows.conj(), rows).real
    u = _rng(rng_seed).random()
    cum = np.cumsum(probs) / probs.sum()
    idx = min(int(np.searchsorted(cum, u, side="right")), 3)
    outcome = OUTCOME_ORDER[idx]
    vec = rows[idx] / math.sqrt(probs[idx])
    raw = np.outer(vec, vec.conj())
    if dephase_p:
        raw[0, 1] *= 1.0 - dephase_p
        raw[1, 0] *= 1.0 - dephase_p
    u_corr = _CORRECTIONS[outcome, shared]
    corrected = u_corr @ raw @ u_corr.conj().T
    a = chi.amplitudes
    # Uhlmann fidelity against a pure state is <chi|rho|chi>
    f = min(max(float(np.vdot(a, corrected @ a).real), 0.0), 1.0)
    return TeleportOutcome(outcome.bits, DensityMatrix(raw, check=False),
                           DensityMatrix(corrected, check=False), f)


def random_qubit(rng):
    """Haar-uniform qubit from two uniforms (see module notes)."""
    rng = _rng(rng)
    u1, u2 = rng.random(), rng.random()
    cos_t = 1.0 - 2.0 * u1
    c = math.sqrt(max(0.0, (1.0 + cos_t) / 2.0))
    s = math.sqrt(max(0.0, (1.0 - cos_t) / 2.0))
    phi = 2.0 * math.pi * u2
    return PureState.normalized([c, complex(math.cos(phi), math.sin(phi)) * s])


@dataclass(frozen=True)
class TrialSummary:
    count: int
    seed: int | None
    dephase_p: float
    mean_fidelity: float
    min_fidelity: float
    histogram: dict  # BellKind name -> count


def run_trials(count, seed=None, dephase_p=0.0, shared=BellKind.PsiMinus, chi=None):
    """Teleport ``count`` states (random unless ``chi`` is given) with one
    seeded generator; identical seeds replay identical sequences."""
    if count < 1:
        raise ValidationError("trial count must be at least 1")
    rng = _rng(seed)
    hist = {k.name: 0 for k in OUTCOME_ORDER}
    fids = np.empty(count)
    for i in range(count):
        state = chi if chi is not None else random_qubit(rng)
        out = teleport(state, shared, rng, dephase_p)
        hist[out.outcome.name] += 1
        fids[i] = out.fidelity_with_input
    return TrialSummary(count, seed if not isinstance(seed, np.random.Generator) else None,
                        dephase_p, math.fsum(fids) / count, float(fids.min()), hist)


# -- momentum-spread decoherence ------------------------------------------------

class MomentumSpread:
    """Distribution of the accumulated phase ``Omega tau_p``."""

    def characteristic(self):
        """``<exp(i theta)>``."""
        raise NotImplementedError


@dataclass(frozen=True)
class Delta(MomentumSpread):
    phase: float = 0.0

    def characteristic(self):
        return complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class GaussianPhase(MomentumSpread):
    mean: float
    std: float

    def __post_init__(self):
        if self.std < 0:
            raise ValidationError("phase spread must be non-negative")

    def characteristic(self):
        r = math.exp(-0.5 * self.std ** 2)
        return complex(r * math.cos(self.mean), r * math.sin(self.mean))


@dataclass(frozen=True)
class Samples(MomentumSpread):
    """Discrete ``(phase, weight)`` pairs with weights summing to 1."""

    points: tuple

    def __post_init__(self):
        pts = tuple((float(p), float(w)) for p, w in self.points)
        if not pts:
            raise ValidationError("empty phase sample list")
        if any(w < 0 for _, w in pts):
            raise ValidationError("phase weights must be non-negative")
        total = math.fsum(w for _, w in pts)
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"phase weights sum to {total:.12g}, not 1")
        object.__setattr__(self, "points", pts)

    def characteristic(self):
        re = math.fsum(w * math.cos(p) for p, w in self.points)
        im = math.fsum(w * math.sin(p) for p, w in self.points)
        return complex(re, im)


def uniform_phase(n=64):
    """Equal weights on ``n`` evenly spaced phases over [0, 2 pi)."""
    if n < 2:
        raise ValidationError("need at least two phases")
    return Samples(tuple((2.0 * math.pi * k / n, 1.0 / n) for k in range(n)))


@dataclass(frozen=True)
class SpinDecoherence:
    rho_f: DensityMatrix
    mixing: float  # P
    entropy_bits: float


def spin_decoherence(spread):
    """Final spin state after averaging the relative phase over ``spread``.

    ``rho_f = 1/2 [[1 + <cos>, <sin>], [<sin>, 1 - <cos>]]`` and the entropy
    is the binary entropy of ``P = (1 - |<exp(i theta)>|) / 2``.
    """
    chi = spread.characteristic()
    c, s = chi.real, chi.imag
    rho = DensityMatrix(0.5 * np.array([[1 + c, s], [s, 1 - c]], dtype=complex), check=False)
    p = 0.5 * (1.0 - min(abs(chi), 1.0))
    return SpinDecoherence(rho, p, binary_entropy(p))
