"""Interaction rates, mean free paths and survival over a piecewise path.

Conventions: for a target density n, the rate is ``c n sigma`` and the mean
free path ``1 / (n sigma)``; for a directed flux Phi, the rate is
``Phi sigma`` and the mean free path ``c / (Phi sigma)``. A scattering event
is counted as a lost (decohered) photon, so survival is ``exp(-tau)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants as const
from .environments import Blackbody, Tabulated, cmb_mean_energy, cmb_number_density
from .errors import DomainError, ValidationError
from .quadrature import DEFAULT_QUADRATURE, integrate
from .quantities import Quantity, as_quantity, convert
from .xsec import (ISOTROPIC_MEAN, AngleModel, com_energy, com_energy_ev,
                   photon_photon_cross_section, photon_photon_sigma_m2, thomson_cross_section)

C_CM = const.C_LIGHT * 100.0


def _value(q, unit):
    return convert(as_quantity(q, unit), unit).value


@dataclass(frozen=True)
class MeanFreePath:
    """Mean free path with an explicit non-interacting flag for the
    zero-rate case (``length`` is then infinite)."""

    length: Quantity
    non_interacting: bool = False

    @property
    def meters(self):
        return self.length.value


INFINITE = MeanFreePath(Quantity(math.inf, "m"), True)


def mean_free_path_density(n, sigma):
    """``1 / (n sigma)`` in metres."""
    n_cm3 = _value(n, "cm^-3")
    s_cm2 = _value(sigma, "cm^2")
    if n_cm3 < 0 or s_cm2 < 0:
        raise ValidationError("density and cross section must be non-negative")
    if n_cm3 == 0 or s_cm2 == 0:
        return INFINITE
    return MeanFreePath(Quantity(1.0 / (n_cm3 * s_cm2) / 100.0, "m"))


def rate_from_density(n, sigma):
    return Quantity(C_CM * _value(n, "cm^-3") * _value(sigma, "cm^2"), "s^-1")


def rate_from_flux(phi, sigma):
    """``Phi sigma`` in s^-1."""
    phi_v = _value(phi, "cm^-2 s^-1")
    s_v = _value(sigma, "cm^2")
    if phi_v < 0 or s_v < 0:
        raise ValidationError("flux and cross section must be non-negative")
    return Quantity(phi_v * s_v, "s^-1")


def mfp_from_flux(phi, sigma):
    """``c / (Phi sigma)`` in metres."""
    return mfp_from_rate(rate_from_flux(phi, sigma))


def mfp_from_rate(rate):
    r = _value(rate, "s^-1")
    if r < 0:
        raise ValidationError("rate must be non-negative")
    if r == 0:
        return INFINITE
    return MeanFreePath(Quantity(const.C_LIGHT / r, "m"))


# -- spectral backgrounds ----------------------------------------------------

def _check_test_energy(test_energy):
    e = _value(test_energy, "eV")
    if not 0 < e < const.ELECTRON_MASS:
        raise DomainError(
            f"test photon energy {e:.6g} eV must lie in (0, m_e = {const.ELECTRON_MASS:.6g} eV)")
    return e


def rate_spectral(test_energy, bg, angle_model=ISOTROPIC_MEAN, quadrature=DEFAULT_QUADRATURE):
    """Light-by-light interaction rate of a test photon with a background.

    The integrand is ``sigma_gg(omega(E_test, E)) dN/dE`` over the background
    support, cut off at the electron mass. For per-steradian backgrounds the
    result is multiplied by ``quadrature.solid_angle_factor`` (the cos-weighted
    solid angle, pi for the forward hemisphere).

    Power laws and blackbodies are integrated over ln E, the log-quadratic
    fit over ln nu, and tabulated spectra over wavelength with breakpoints at
    every sample.

    Returns
    -------
    Quantity
        Rate in s^-1.

    Raises
    ------
    ConvergenceError
        When the quadrature misses its tolerance; the error carries the
        achieved estimate.
    """
    e_test = _check_test_energy(test_energy)
    model = AngleModel.parse(angle_model)

    def sigma_cm2(e):
        return photon_photon_sigma_m2(com_energy_ev(e_test, e, model)) * 1e4

    lo, hi = bg.support_ev()
    hi = min(hi, const.ELECTRON_MASS)
    if isinstance(bg, Blackbody):
        lo = bg.kT * 1e-8
        hi = min(hi, bg.kT * 200.0)
    if not hi > lo:
        return Quantity(0.0, "s^-1")

    if isinstance(bg, Tabulated):
        wl_lo = const.HC_EV_NM / hi
        wl_hi = const.HC_EV_NM / lo
        wl_lo = max(wl_lo, bg.wavelength_nm[0])
        wl_hi = min(wl_hi, bg.wavelength_nm[-1])

        def integrand(wl):
            e = const.HC_EV_NM / wl
            return sigma_cm2(e) * bg.photon_flux_per_nm(wl)

        value, _ = integrate(integrand, wl_lo, wl_hi, quadrature, points=bg.wavelength_nm)
    else:
        def integrand(ln_e):
            e = np.exp(ln_e)
            return sigma_cm2(e) * bg.photon_flux(e) * e

        value, _ = integrate(integrand, math.log(lo), math.log(hi), quadrature)
    if bg.per_steradian:
        value *= quadrature.solid_angle_factor
    return Quantity(max(value, 0.0), "s^-1")


def mean_free_path_cmb(test_energy=None, T_cmb=None, angle_model=ISOTROPIC_MEAN,
                       omega=None, n_gamma=None):
    """``1 / (sigma_gg(omega) n_gamma)`` for a thermal photon bath.

    By default omega is the collision energy of the test photon with a
    mean-energy CMB photon under ``angle_model`` and n_gamma the blackbody
    density at ``T_cmb``; either may be fixed directly with ``omega`` /
    ``n_gamma``.
    """
    if omega is None:
        if test_energy is None or T_cmb is None:
            raise ValidationError("need omega, or both test_energy and T_cmb")
        omega = com_energy(test_energy, cmb_mean_energy(T_cmb), angle_model)
    if n_gamma is None:
        if T_cmb is None:
            raise ValidationError("need n_gamma or T_cmb")
        n_gamma = cmb_number_density(T_cmb)
    return mean_free_path_density(n_gamma, photon_photon_cross_section(omega))


# -- link budget ---------------------------------------------------------------

@dataclass(frozen=True)
class PathSegment:
    label: str
    length: Quantity
    populations: tuple = ()
    backgrounds: tuple = ()
    mfp_overrides: tuple = ()  # (label, Quantity length) pairs

    def __post_init__(self):
        length = convert(as_quantity(self.length, "m"), "m")
        if not length.value > 0:
            raise ValidationError(f"segment {self.label!r}: length must be positive")
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "populations", tuple(self.populations))
        object.__setattr__(self, "backgrounds", tuple(self.backgrounds))
        overrides = []
        for label, mfp in self.mfp_overrides:
            mfp = convert(as_quantity(mfp, "m"), "m")
            if not mfp.value > 0:
                raise ValidationError(f"segment {self.label!r}: override {label!r} must be positive")
            overrides.append((label, mfp))
        object.__setattr__(self, "mfp_overrides", tuple(overrides))


@dataclass(frozen=True)
class Contribution:
    label: str
    kind: str  # "density" | "flux" | "background" | "override"
    rate: Quantity
    mfp: MeanFreePath
    optical_depth: float


@dataclass(frozen=True)
class SegmentReport:
    label: str
    length: Quantity
    contributions: tuple

    @property
    def optical_depth(self):
        return math.fsum(c.optical_depth for c in self.contributions)


@dataclass(frozen=True)
class LinkBudgetReport:
    test_energy: Quantity
    segments: tuple
    total_optical_depth: float
    survival: float


def population_contribution(pop, length_m):
    sigma = thomson_cross_section(pop.species)
    if pop.density is not None:
        mfp = mean_free_path_density(pop.density, sigma)
        rate = rate_from_density(pop.density, sigma)
        kind = "density"
    else:
        rate = rate_from_flux(pop.flux, sigma)
        mfp = mfp_from_rate(rate)
        kind = "flux"
    tau = 0.0 if mfp.non_interacting else length_m / mfp.meters
    return Contribution(pop.name, kind, rate, mfp, tau)


def background_contribution(bg, length_m, test_energy, angle_model, quadrature):
    rate = rate_spectral(test_energy, bg, angle_model, quadrature)
    mfp = mfp_from_rate(rate)
    tau = 0.0 if mfp.non_interacting else length_m / mfp.meters
    return Contribution(bg.name, "background", rate, mfp, tau)


def link_budget(segments, test_energy, angle_model=ISOTROPIC_MEAN, quadrature=DEFAULT_QUADRATURE):
    """Sum optical depths along ``segments`` for a photon of ``test_energy``.

    Every population contributes through its Thomson cross section, every
    background through its spectral light-by-light rate, and every override
    as ``length / mfp``.
    """
    e = as_quantity(test_energy, "eV")
    _check_test_energy(e)
    reports = []
    for seg in segments:
        L = seg.length.value
        contribs = [population_contribution(p, L) for p in seg.populations]
        contribs += [background_contribution(b, L, e, angle_model, quadrature)
                     for b in seg.backgrounds]
        for label, mfp in seg.mfp_overrides:
            contribs.append(Contribution(label, "override", mfp_rate(mfp),
                                         MeanFreePath(mfp), L / mfp.value))
        reports.append(SegmentReport(seg.label, seg.length, tuple(contribs)))
    tau = math.fsum(c.optical_depth for r in reports for c in r.contributions)
    return LinkBudgetReport(convert(e, "eV"), tuple(reports), tau, math.exp(-tau))


def mfp_rate(mfp):
    return Quantity(const.C_LIGHT / _value(mfp, "m"), "s^-1")
