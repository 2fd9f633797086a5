"""Gravitational redshift between two static observers and its effect on the
overlap of Gaussian single-photon frequency profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .quadrature import DEFAULT_QUADRATURE, integrate
from .quantities import Quantity, as_quantity, convert

EFFECTIVELY_ZERO = 1e-30
MARGINAL_FRACTION = 0.1


@dataclass(frozen=True)
class SchwarzschildBody:
    name: str
    schwarzschild_radius: Quantity

    def __post_init__(self):
        rs = convert(as_quantity(self.schwarzschild_radius, "m"), "m")
        if not rs.value > 0:
            raise ValidationError(f"body {self.name!r}: Schwarzschild radius must be positive")
        object.__setattr__(self, "schwarzschild_radius", rs)

    @property
    def rs(self):
        return self.schwarzschild_radius.value


EARTH = SchwarzschildBody("earth", Quantity(8.87e-3, "m"))
SUN = SchwarzschildBody("sun", Quantity(2.95e3, "m"))
BODIES = {b.name: b for b in (EARTH, SUN)}


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian frequency profile with amplitude width ``width`` (the sigma of
    ``exp(-(w - w0)^2 / (4 sigma^2))``). Peak and width may be given as
    frequencies or energies; only their ratio matters."""

    peak: Quantity
    width: Quantity

    def __post_init__(self):
        peak = as_quantity(self.peak, "Hz")
        width = as_quantity(self.width, "Hz")
        if peak.dimension != width.dimension or peak.dimension not in ("energy", "inverse_time"):
            raise ValidationError("pulse peak and width must both be frequencies or both energies")
        if not (peak.value > 0 and width.value > 0):
            raise ValidationError("pulse peak and width must be positive")
        width = convert(width, peak.unit)
        if not peak.value / width.value > 10:
            raise ValidationError(
                f"pulse peak/width = {peak.value / width.value:.3g}; the Gaussian overlap "
                "approximation needs peak/width > 10")
        object.__setattr__(self, "peak", peak)
        object.__setattr__(self, "width", width)

    @property
    def quality(self):
        """peak / width."""
        return self.peak.value / self.width.value


def _radius(r, body, label):
    r_m = convert(as_quantity(r, "m"), "m").value
    if not r_m > body.rs:
        raise DomainError(f"{label} = {r_m:.6g} m is not outside the horizon of {body.name} "
                          f"(r_S = {body.rs:.6g} m)")
    return r_m


def redshift_factor(body, r_a, r_b, motion_factor=False):
    """Frequency ratio ``sqrt((1 - r_S/r_A) / (1 - r_S/r_B))`` between static
    observers at ``r_a`` and ``r_b``.

    ``motion_factor`` multiplies the ``r_S/r_B`` term by 3/2, the usual
    correction when B is on a circular orbit rather than static.
    """
    a = _radius(r_a, body, "r_a")
    b = _radius(r_b, body, "r_b")
    k = 1.5 if motion_factor else 1.0
    if k * body.rs >= b:
        raise DomainError("3/2 r_S/r_B >= 1: no circular orbit at r_b")
    # log1p keeps 1e-11-level differences exact
    return math.exp(0.5 * (math.log1p(-body.rs / a) - math.log1p(-k * body.rs / b)))


def shift_parameter(upsilon):
    """``delta = |sqrt(Upsilon) - 1|``."""
    return abs(math.expm1(0.5 * math.log(upsilon)))


def _overlap_log(quality, delta):
    k = 1.0 - delta
    log_pref = 0.5 * math.log(2.0 * k / (1.0 + k * k))
    return log_pref - (delta * quality) ** 2 / (4.0 * (1.0 + k * k))


def gaussian_overlap(pulse, delta):
    """Closed-form overlap of a Gaussian profile with its redshifted copy.

    Parameters
    ----------
    pulse : GaussianPulse
        Profile at the receiver (peak Omega_B0, width sigma).
    delta : float
        ``|sqrt(Upsilon) - 1|`` in [0, 1).

    Returns
    -------
    float
        ``sqrt(2(1-d)/(1+(1-d)^2)) exp(-d^2 Omega^2 / (4 (1+(1-d)^2) sigma^2))``;
        underflows to 0.0 for very narrow lines.
    """
    if not 0.0 <= delta < 1.0:
        raise ValidationError(f"delta must lie in [0, 1), got {delta}")
    return math.exp(_overlap_log(pulse.quality, delta))


def _profile(x, centre, width):
    # L2-normalised Gaussian amplitude in units where the receiver width is 1
    return (2.0 * math.pi * width ** 2) ** -0.25 * np.exp(-((x - centre) ** 2) / (4.0 * width ** 2))


def gaussian_overlap_numeric(pulse, delta, quadrature=DEFAULT_QUADRATURE):
    """Overlap integral evaluated by quadrature.

    The emitted profile is the received one rescaled in frequency by
    ``1 - delta`` (peak ``(1-delta) Omega_0``, width ``(1-delta) sigma``), and
    the product is integrated over positive frequencies. Frequencies are
    measured in units of sigma from the received peak.
    """
    if not 0.0 <= delta < 1.0:
        raise ValidationError(f"delta must lie in [0, 1), got {delta}")
    q = pulse.quality
    k = 1.0 - delta
    c_b, w_b = 0.0, 1.0
    c_a, w_a = -delta * q, k
    # product is Gaussian; integrate +-40 widths around its centre, clipped at zero frequency
    centre = (c_a * w_b ** 2 + c_b * w_a ** 2) / (w_a ** 2 + w_b ** 2)
    spread = math.sqrt(2.0) * w_a * w_b / math.sqrt(w_a ** 2 + w_b ** 2)
    lo = max(-q, centre - 40.0 * spread)
    hi = centre + 40.0 * spread
    if hi <= lo:
        return 0.0
    f = lambda x: _profile(x, c_a, w_a) * _profile(x, c_b, w_b)
    value, _ = integrate(f, lo, hi, quadrature, points=[centre])
    return max(value, 0.0)


def max_coherent_path(body, closest_approach):
    """Bound ``l^2 / r_S`` on the distance a photon can spend near a body
    before its phase corrections become unrecoverable."""
    ell = _radius(closest_approach, body, "closest approach")
    return Quantity(ell * ell / body.rs, "m")


def coherence_status(path_length, bound):
    """``"violated"`` above the bound, ``"marginal"`` above 10% of it, else ``"ok"``."""
    L = convert(as_quantity(path_length, "m"), "m").value
    B = convert(as_quantity(bound, "m"), "m").value
    if L > B:
        return "violated"
    if L > MARGINAL_FRACTION * B:
        return "marginal"
    return "ok"


@dataclass(frozen=True)
class FidelityReport:
    upsilon: float
    delta: float
    overlap: float | None
    overlap_sq: float | None
    log_overlap_sq: float | None = None

    @property
    def effectively_zero(self):
        return self.overlap_sq is not None and self.overlap_sq < EFFECTIVELY_ZERO


def fidelity_report(body, r_a, r_b, pulse=None, motion_factor=False):
    upsilon = redshift_factor(body, r_a, r_b, motion_factor)
    delta = shift_parameter(upsilon)
    if pulse is None:
        return FidelityReport(upsilon, delta, None, None)
    log_d = _overlap_log(pulse.quality, delta)
    return FidelityReport(upsilon, delta, math.exp(log_d), math.exp(2.0 * log_d), 2.0 * log_d)
