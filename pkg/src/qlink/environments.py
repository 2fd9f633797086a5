"""Particle populations and radiation backgrounds.

Spectral photon fluxes are returned in photons cm^-2 s^-1 eV^-1, with an
extra sr^-1 for the backgrounds whose ``per_steradian`` flag is set.
"""

from __future__ import annotations

import functools
import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import constants as const
from .errors import CatalogError, DomainError, SpectrumFormatError, ValidationError
from .quadrature import DEFAULT_QUADRATURE, integrate
from .quantities import Quantity, as_quantity, convert, photon_energy
from .xsec import ALPHA_PARTICLE, ELECTRON, HELIUM_ATOM, HYDROGEN_ATOM, PROTON, ChargedSpecies

CSV_HEADER = "wavelength_nm,irradiance_W_m2_nm"
CATALOG_ENV = "QLINK_CATALOG_DIR"


@dataclass(frozen=True)
class ParticlePopulation:
    """A charged-particle background given either as a number density or as a
    directed flux (exactly one of the two).

    ``flux_range`` keeps the quoted span when a flux is only known as a range;
    ``flux`` then holds the value used in rate calculations (the upper bound).
    """

    name: str
    species: ChargedSpecies
    density: Quantity | None = None
    flux: Quantity | None = None
    energy_range: tuple | None = None
    radial_scaling_exponent: float | None = None
    flux_range: tuple | None = None

    def __post_init__(self):
        if (self.density is None) == (self.flux is None):
            raise ValidationError(f"population {self.name!r}: give exactly one of density, flux")
        if self.density is not None:
            d = convert(as_quantity(self.density, "cm^-3"), "cm^-3")
            if d.value < 0:
                raise ValidationError(f"population {self.name!r}: density must be non-negative")
            object.__setattr__(self, "density", d)
        else:
            f = convert(as_quantity(self.flux, "cm^-2 s^-1"), "cm^-2 s^-1")
            if f.value < 0:
                raise ValidationError(f"population {self.name!r}: flux must be non-negative")
            object.__setattr__(self, "flux", f)


class RadiationBackground:
    """Common interface of the background variants."""

    name: str
    per_steradian: bool

    def support_ev(self):
        raise NotImplementedError

    def photon_flux(self, energy_ev):
        """Vectorised photons cm^-2 s^-1 eV^-1 (sr^-1) at ``energy_ev``."""
        raise NotImplementedError

    def in_support(self, energy_ev):
        lo, hi = self.support_ev()
        return lo <= energy_ev <= hi


@dataclass(frozen=True)
class Blackbody(RadiationBackground):
    name: str
    temperature: Quantity
    per_steradian: bool = True

    def __post_init__(self):
        t = photon_energy(as_quantity(self.temperature, "eV"))
        if not t.value > 0:
            raise ValidationError(f"blackbody {self.name!r}: temperature must be positive")
        object.__setattr__(self, "temperature", t)

    @property
    def kT(self):
        return self.temperature.value

    def support_ev(self):
        return (0.0, math.inf)

    def photon_flux(self, energy_ev):
        e = np.asarray(energy_ev, dtype=float)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            x = e / self.kT
            occ = np.where(x > 700.0, 0.0, 1.0 / np.expm1(np.minimum(x, 700.0)))
            n_per_ev = e ** 2 * occ / (math.pi ** 2 * const.HBAR_C ** 3)  # m^-3 eV^-1
        n_per_ev = np.where(e > 0, n_per_ev, 0.0)
        return const.C_LIGHT * n_per_ev / (4.0 * math.pi) * 1e-4


@dataclass(frozen=True)
class DoublePowerLaw(RadiationBackground):
    """``A / ((E/E_b)^a1 + (E/E_b)^a2)`` photons cm^-2 s^-1 sr^-1 keV^-1."""

    name: str
    norm: float
    break_energy: Quantity
    index1: float
    index2: float
    e_min: Quantity = field(default_factory=lambda: Quantity(2.0, "keV"))
    e_max: Quantity = field(default_factory=lambda: Quantity(2.0, "MeV"))
    per_steradian: bool = True

    def __post_init__(self):
        for attr in ("break_energy", "e_min", "e_max"):
            object.__setattr__(self, attr, convert(as_quantity(getattr(self, attr), "eV"), "eV"))
        if not self.norm > 0:
            raise ValidationError(f"{self.name!r}: normalisation A must be positive")
        if not self.break_energy.value > 0:
            raise ValidationError(f"{self.name!r}: break energy must be positive")
        if not self.index2 > self.index1:
            raise ValidationError(f"{self.name!r}: need a2 > a1")
        if not 0 < self.e_min.value < self.e_max.value:
            raise ValidationError(f"{self.name!r}: need 0 < e_min < e_max")

    def support_ev(self):
        return (self.e_min.value, self.e_max.value)

    def photon_flux(self, energy_ev):
        x = np.asarray(energy_ev, dtype=float) / self.break_energy.value
        per_kev = self.norm / (x ** self.index1 + x ** self.index2)
        return per_kev * 1e-3


@dataclass(frozen=True)
class LogQuadraticEBL(RadiationBackground):
    """``ln(nu I_nu) = c0 + c1 ln nu + c2 ln^2 nu`` with nu in GHz.

    ``brightness_unit`` is the SI power unit of the fitted ``nu I_nu`` in
    watts (per m^2 per sr); the published optical constants evaluate to
    ~1e-8, i.e. watts, which is what reproduces the quoted 21 nW m^-2 sr^-1.
    """

    name: str
    c0: float
    c1: float
    c2: float
    nu_min: Quantity
    nu_max: Quantity
    brightness_unit: float = 1.0
    per_steradian: bool = True

    def __post_init__(self):
        for attr in ("nu_min", "nu_max"):
            q = as_quantity(getattr(self, attr), "Hz")
            if q.dimension != "inverse_time":
                raise ValidationError(f"{self.name!r}: {attr} must be a frequency")
            object.__setattr__(self, attr, convert(q, "Hz"))
        if not 0 < self.nu_min.value < self.nu_max.value:
            raise ValidationError(f"{self.name!r}: need 0 < nu_min < nu_max")

    def nu_i_nu(self, nu_ghz):
        """Fitted nu I_nu in W m^-2 sr^-1."""
        ln = np.log(np.asarray(nu_ghz, dtype=float))
        return np.exp(self.c0 + self.c1 * ln + self.c2 * ln ** 2) * self.brightness_unit

    def support_ev(self):
        return (const.PLANCK_EV * self.nu_min.value, const.PLANCK_EV * self.nu_max.value)

    def photon_flux(self, energy_ev):
        e = np.asarray(energy_ev, dtype=float)
        nu_ghz = e / const.PLANCK_EV * 1e-9
        # I_nu / (E h): photons per m^2 s sr eV
        per_m2 = self.nu_i_nu(nu_ghz) / (e * const.ELEMENTARY_CHARGE * e)
        return per_m2 * 1e-4


@dataclass(frozen=True)
class Tabulated(RadiationBackground):
    """Directed spectral irradiance F_lambda sampled on a wavelength grid.

    Between samples F_lambda is interpolated linearly in wavelength; there is
    no extrapolation.
    """

    name: str
    wavelength_nm: np.ndarray
    irradiance: np.ndarray  # W m^-2 nm^-1
    per_steradian: bool = False

    def __post_init__(self):
        wl = np.asarray(self.wavelength_nm, dtype=float)
        irr = np.asarray(self.irradiance, dtype=float)
        if wl.ndim != 1 or wl.shape != irr.shape:
            raise ValidationError(f"{self.name!r}: wavelength and irradiance must be equal-length 1-D")
        if wl.size < 2:
            raise ValidationError(f"{self.name!r}: need at least 2 samples")
        if not np.all(np.diff(wl) > 0):
            raise ValidationError(f"{self.name!r}: wavelengths must be strictly increasing")
        if np.any(irr < 0) or not np.all(np.isfinite(irr)) or wl[0] <= 0:
            raise ValidationError(f"{self.name!r}: irradiance must be finite and >= 0, wavelengths > 0")
        wl.setflags(write=False)
        irr.setflags(write=False)
        object.__setattr__(self, "wavelength_nm", wl)
        object.__setattr__(self, "irradiance", irr)

    def __hash__(self):
        return hash((self.name, self.wavelength_nm.tobytes(), self.irradiance.tobytes()))

    def __eq__(self, other):
        return (isinstance(other, Tabulated) and self.name == other.name
                and np.array_equal(self.wavelength_nm, other.wavelength_nm)
                and np.array_equal(self.irradiance, other.irradiance))

    @property
    def span_nm(self):
        return float(self.wavelength_nm[0]), float(self.wavelength_nm[-1])

    def support_ev(self):
        return (const.HC_EV_NM / self.wavelength_nm[-1], const.HC_EV_NM / self.wavelength_nm[0])

    def irradiance_at(self, wavelength_nm):
        wl = np.asarray(wavelength_nm, dtype=float)
        lo, hi = self.span_nm
        if np.any((wl < lo) | (wl > hi)):
            raise DomainError(f"{self.name!r}: wavelength outside tabulated span {lo}-{hi} nm")
        return np.interp(wl, self.wavelength_nm, self.irradiance)

    def photon_flux_per_nm(self, wavelength_nm):
        """F_lambda / E_lambda in photons cm^-2 s^-1 nm^-1."""
        wl = np.asarray(wavelength_nm, dtype=float)
        e_joule = const.HC_EV_NM / wl * const.ELEMENTARY_CHARGE
        return self.irradiance_at(wl) / e_joule * 1e-4

    def photon_flux(self, energy_ev):
        e = np.asarray(energy_ev, dtype=float)
        wl = const.HC_EV_NM / e
        return self.photon_flux_per_nm(wl) * wl / e  # |d lambda / dE| = lambda / E

    def total_irradiance(self, spec=DEFAULT_QUADRATURE):
        """Integrated irradiance in W m^-2 over the tabulated span."""
        # exact for piecewise-linear data
        del spec
        return float(np.trapezoid(self.irradiance, self.wavelength_nm))


def spectral_photon_flux(bg, at):
    """Photon flux density of ``bg`` at an energy, wavelength or frequency.

    Returns photons cm^-2 s^-1 eV^-1, per steradian when
    ``bg.per_steradian`` is true.

    Raises
    ------
    DomainError
        If ``at`` lies outside the background's support.
    """
    e = photon_energy(as_quantity(at, "eV")).value
    lo, hi = bg.support_ev()
    # tolerate round-off at the support edges from unit conversion
    if not (lo * (1 - 1e-12) <= e <= hi * (1 + 1e-12)) or e <= 0:
        raise DomainError(f"{bg.name!r}: {e:.6g} eV outside support [{lo:.6g}, {hi:.6g}] eV")
    e = min(max(e, lo), hi)
    return float(bg.photon_flux(np.array([e]))[0])


def ebl_brightness(bg, spec=DEFAULT_QUADRATURE):
    """Integral of nu I_nu over ln nu across the fit's range, in nW m^-2 sr^-1."""
    value, _ = integrate(lambda ln_nu: bg.nu_i_nu(np.exp(ln_nu) * 1e-9),
                         math.log(bg.nu_min.value), math.log(bg.nu_max.value), spec)
    return Quantity(value * 1e9, "nW m^-2 sr^-1")


# -- CMB ---------------------------------------------------------------------

def _temperature_ev(T):
    t = photon_energy(as_quantity(T, "eV")).value
    if not t > 0:
        raise ValidationError("temperature must be positive")
    return t


def cmb_number_density(T):
    """Blackbody photon number density ``2 zeta(3) T^3 / pi^2`` in cm^-3."""
    t = _temperature_ev(T)
    n_m3 = 2.0 * const.ZETA3 / math.pi ** 2 * (t / const.HBAR_C) ** 3
    return Quantity(n_m3 * 1e-6, "cm^-3")


def cmb_mean_energy(T):
    """Mean blackbody photon energy ``pi^4 T / (30 zeta(3))``."""
    t = _temperature_ev(T)
    return Quantity(math.pi ** 4 * t / (30.0 * const.ZETA3), "eV")


def cmb_energy_density(T):
    """``pi^2 T^4 / 15`` in eV cm^-3 (returned as a bare float)."""
    t = _temperature_ev(T)
    return math.pi ** 2 / 15.0 * t ** 4 / const.HBAR_C ** 3 * 1e-6


# -- spectrum CSV ----------------------------------------------------------------

def _read_text(source):
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, (str, os.PathLike)):
        data = Path(source).read_bytes()
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SpectrumFormatError(f"not valid UTF-8 ({exc.reason})",
                                  data[:exc.start].count(b"\n") + 1)


def _parse_number(token, what, lineno):
    token = token.strip()
    try:
        value = float(token)
    except ValueError:
        raise SpectrumFormatError(f"malformed {what} {token!r}", lineno)
    if not math.isfinite(value) or token.lower().lstrip("+-") in ("inf", "infinity", "nan"):
        raise SpectrumFormatError(f"non-finite {what} {token!r}", lineno)
    return value


def load_solar_spectrum(source, name="solar"):
    """Parse a spectrum CSV into a :class:`Tabulated` background.

    ``source`` may be bytes, a path, or a binary/text stream. The format is a
    ``wavelength_nm,irradiance_W_m2_nm`` header followed by one sample per
    line; lines starting with ``#`` and blank lines are ignored.
    """
    text = _read_text(source)
    wavelengths, values = [], []
    header_seen = False
    for lineno, raw in enumerate(io.StringIO(text, newline=None), start=1):
        line = raw.rstrip("\n").rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if not header_seen:
            if stripped.lstrip("﻿") != CSV_HEADER:
                raise SpectrumFormatError(f"expected header {CSV_HEADER!r}, got {stripped!r}", lineno)
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise SpectrumFormatError(f"expected 2 comma-separated fields, got {len(fields)}", lineno)
        wl = _parse_number(fields[0], "wavelength", lineno)
        irr = _parse_number(fields[1], "irradiance", lineno)
        if wl <= 0:
            raise SpectrumFormatError(f"wavelength must be positive, got {wl}", lineno)
        if wavelengths and wl <= wavelengths[-1]:
            raise SpectrumFormatError(
                f"wavelength {wl} nm does not increase (previous {wavelengths[-1]} nm)", lineno)
        if irr < 0:
            raise SpectrumFormatError(f"negative irradiance {irr}", lineno)
        wavelengths.append(wl)
        values.append(irr)
    if not header_seen:
        raise SpectrumFormatError("missing header line", 1)
    if len(wavelengths) < 2:
        raise SpectrumFormatError(f"need at least 2 samples, found {len(wavelengths)}",
                                  text.count("\n") + 1)
    return Tabulated(name, np.array(wavelengths), np.array(values))


def planck_irradiance(wavelength_nm, temperature_k=const.SOLAR_TEFF,
                      radius_m=const.SOLAR_RADIUS, distance_m=const.ASTRONOMICAL_UNIT):
    """Blackbody-sphere spectral irradiance at ``distance_m`` in W m^-2 nm^-1."""
    lam = np.asarray(wavelength_nm, dtype=float) * 1e-9
    x = const.PLANCK_J * const.C_LIGHT / (lam * const.BOLTZMANN_J * temperature_k)
    with np.errstate(over="ignore"):
        radiance = 2.0 * const.PLANCK_J * const.C_LIGHT ** 2 / lam ** 5 / np.expm1(np.minimum(x, 700.0))
    radiance = np.where(x > 700.0, 0.0, radiance)
    return math.pi * radiance * (radius_m / distance_m) ** 2 * 1e-9


def synthetic_solar_csv(n_samples=4000, lo_nm=0.1, hi_nm=2400.0, temperature_k=const.SOLAR_TEFF):
    """CSV text of a 5778 K blackbody Sun seen from 1 AU on a log grid.

    Stands in for a measured reference spectrum over the same span.
    """
    wl = np.geomspace(lo_nm, hi_nm, n_samples)
    irr = planck_irradiance(wl, temperature_k)
    lines = [f"# synthetic {temperature_k:g} K blackbody Sun at 1 AU, {lo_nm:g}-{hi_nm:g} nm",
             CSV_HEADER]
    lines += [f"{w!r},{f!r}" for w, f in zip(wl.tolist(), irr.tolist())]
    return "\n".join(lines) + "\n"


@functools.lru_cache(maxsize=None)
def solar_blackbody_spectrum():
    return load_solar_spectrum(synthetic_solar_csv().encode(), name="solar_blackbody")


# -- catalog -------------------------------------------------------------------

def _density(name, species, n, **kw):
    return ParticlePopulation(name, species, density=Quantity(n, "cm^-3"), **kw)


def _flux(name, species, phi, **kw):
    return ParticlePopulation(name, species, flux=Quantity(phi, "cm^-2 s^-1"), **kw)


@functools.lru_cache(maxsize=None)
def _builtin_entries():
    ev = lambda v: Quantity(v, "eV")
    return (
        _density("ism_electrons", ELECTRON, 1.0),
        _density("hii_electrons", ELECTRON, 1e4),
        _density("lic_hydrogen", HYDROGEN_ATOM, 0.24),
        _density("lic_electrons", ELECTRON, 0.09),
        _density("lic_protons", PROTON, 0.07),
        _density("lic_helium", HELIUM_ATOM, 0.014),
        _density("local_bubble_protons", PROTON, 0.005),
        _density("solar_wind_protons", PROTON, 6.6, energy_range=(ev(1.0), ev(1e4))),
        _density("solar_wind_electrons", ELECTRON, 7.1, energy_range=(ev(1.0), ev(1e4))),
        _density("solar_wind_alphas", ALPHA_PARTICLE, 0.25, energy_range=(ev(1.0), ev(1e4))),
        _flux("spe_protons", PROTON, 1e5, energy_range=(ev(1e6), ev(3e9)),
              radial_scaling_exponent=2.0),
        _flux("gcr_protons", PROTON, 10.0,
              flux_range=(Quantity(1.0, "cm^-2 s^-1"), Quantity(10.0, "cm^-2 s^-1"))),
        _flux("van_allen_protons", PROTON, 1e8, energy_range=(ev(1e3), ev(3e8))),
        _flux("van_allen_electrons", ELECTRON, 1e7, energy_range=(ev(1e3), ev(1e8))),
        Blackbody("cmb", Quantity(const.CMB_TEMPERATURE_K, "K")),
        DoublePowerLaw("cxb", 10.15e-2, Quantity(29.99, "keV"), 1.32, 2.88),
        LogQuadraticEBL("ebl_optical", -111.231, 15.2089, -0.623,
                        Quantity(4e4, "GHz"), Quantity(1e6, "GHz")),
    )


def builtin_catalog():
    """All builtin populations and backgrounds (the solar spectrum is built lazily)."""
    return list(_builtin_entries()) + [solar_blackbody_spectrum()]


def catalog_dir():
    path = os.environ.get(CATALOG_ENV)
    return Path(path) if path else None


def _user_spectrum(name):
    root = catalog_dir()
    if root is None:
        return None
    for candidate in (root / "spectra" / f"{name}.csv", root / f"{name}.csv"):
        if candidate.is_file():
            return load_solar_spectrum(candidate, name=name)
    return None


def lookup(name):
    """Find a catalog entry by name, including spectra under ``$QLINK_CATALOG_DIR``."""
    for entry in _builtin_entries():
        if entry.name == name:
            return entry
    if name == "solar_blackbody":
        return solar_blackbody_spectrum()
    entry = _user_spectrum(name)
    if entry is not None:
        return entry
    known = [e.name for e in _builtin_entries()] + ["solar_blackbody"]
    raise CatalogError(f"no catalog entry named {name!r}; known: {', '.join(known)}")
