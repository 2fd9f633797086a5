"""Photon scattering cross sections below the electron mass."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants as const
from .errors import DomainError, ValidationError
from .quantities import Quantity, as_quantity, convert


@dataclass(frozen=True)
class ChargedSpecies:
    """A scatterer. ``charge_magnitude`` counts elementary charges; neutral
    species (charge 0) have no Thomson cross section."""

    name: str
    mass: Quantity
    charge_magnitude: int = 1

    def __post_init__(self):
        mass = convert(as_quantity(self.mass, "eV"), "eV")
        object.__setattr__(self, "mass", mass)
        if not mass.value > 0:
            raise ValidationError(f"species {self.name!r}: mass must be positive")
        if self.charge_magnitude < 0 or int(self.charge_magnitude) != self.charge_magnitude:
            raise ValidationError(f"species {self.name!r}: charge must be a non-negative integer")


ELECTRON = ChargedSpecies("electron", Quantity(const.ELECTRON_MASS, "eV"), 1)
PROTON = ChargedSpecies("proton", Quantity(const.PROTON_MASS, "eV"), 1)
ALPHA_PARTICLE = ChargedSpecies("alpha", Quantity(const.ALPHA_PARTICLE_MASS, "eV"), 2)
HYDROGEN_ATOM = ChargedSpecies("hydrogen", Quantity(const.HYDROGEN_MASS, "eV"), 0)
HELIUM_ATOM = ChargedSpecies("helium", Quantity(const.HELIUM_MASS, "eV"), 0)

SPECIES = {s.name: s for s in (ELECTRON, PROTON, ALPHA_PARTICLE, HYDROGEN_ATOM, HELIUM_ATOM)}


def thomson_cross_section(species):
    """Thomson cross section ``(8 pi / 3) (Z^2 alpha)^2 / m^2`` in m^2.

    For unit charge this is the familiar ``(8 pi / 3) alpha^2 / m^2``; the
    ``Z^4`` factor generalises the classical charge radius to ions.
    """
    m = species.mass.value
    z2 = species.charge_magnitude ** 2
    return Quantity(8.0 * math.pi / 3.0 * (z2 * const.ALPHA) ** 2 * (const.HBAR_C / m) ** 2, "m^2")


_GG_COEFF = 937.0 * const.ALPHA ** 4 / (10125.0 * math.pi * const.ELECTRON_MASS ** 8)


def photon_photon_sigma_m2(omega_ev):
    """Vectorised low-energy light-by-light cross section in m^2 (no domain check)."""
    omega_ev = np.asarray(omega_ev, dtype=float)
    return _GG_COEFF * omega_ev ** 6 * const.HBAR_C ** 2


def photon_photon_cross_section(omega_com):
    """Euler-Heisenberg cross section for gamma gamma -> gamma gamma.

    Parameters
    ----------
    omega_com : Quantity or str
        Photon energy in the centre-of-momentum frame.

    Returns
    -------
    Quantity
        ``937 alpha^4 omega^6 / (10125 pi m_e^8)`` expressed in m^2.

    Raises
    ------
    DomainError
        If ``omega_com >= m_e``, where the low-energy expansion is invalid.
    """
    w = convert(as_quantity(omega_com, "eV"), "eV").value
    if w < 0:
        raise DomainError(f"centre-of-momentum energy must be non-negative, got {w} eV")
    if w >= const.ELECTRON_MASS:
        raise DomainError(
            f"centre-of-momentum energy {w:.6g} eV is not below the electron mass "
            f"({const.ELECTRON_MASS:.6g} eV); the low-energy cross section does not apply"
        )
    return Quantity(float(photon_photon_sigma_m2(w)), "m^2")


# -- two-photon kinematics -----------------------------------------------------

@dataclass(frozen=True)
class AngleModel:
    """How the collision angle between test and background photons is chosen.

    ``kind`` is ``"head_on"`` (theta = pi), ``"isotropic_mean"`` (the
    isotropic average <1 - cos theta> = 1) or ``"fixed"`` with ``theta`` in
    radians.
    """

    kind: str = "isotropic_mean"
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in ("head_on", "isotropic_mean", "fixed"):
            raise ValidationError(f"unknown angle model {self.kind!r}")
        if self.kind == "fixed" and self.theta is None:
            raise ValidationError("fixed angle model needs theta")

    def one_minus_cos(self):
        if self.kind == "head_on":
            return 2.0
        if self.kind == "isotropic_mean":
            return 1.0
        return 1.0 - math.cos(self.theta)

    @classmethod
    def parse(cls, text):
        """``head_on`` | ``isotropic_mean`` | ``fixed:<radians>``."""
        if isinstance(text, AngleModel):
            return text
        if text.startswith("fixed"):
            _, _, theta = text.partition(":")
            try:
                return cls("fixed", float(theta))
            except ValueError:
                raise ValidationError(f"bad fixed angle {text!r}; expected fixed:<radians>")
        return cls(text)


HEAD_ON = AngleModel("head_on")
ISOTROPIC_MEAN = AngleModel("isotropic_mean")


def com_energy_ev(e1, e2, angle_model=ISOTROPIC_MEAN):
    """Vectorised ``sqrt(E1 E2 (1 - cos theta) / 2)`` in eV."""
    return np.sqrt(np.asarray(e1, dtype=float) * np.asarray(e2, dtype=float)
                   * angle_model.one_minus_cos() / 2.0)


def com_energy(e1, e2, angle_model=ISOTROPIC_MEAN):
    """Centre-of-momentum photon energy of a two-photon collision."""
    a = convert(as_quantity(e1, "eV"), "eV").value
    b = convert(as_quantity(e2, "eV"), "eV").value
    if not (a > 0 and b > 0):
        raise ValidationError("photon energies must be positive")
    return Quantity(float(com_energy_ev(a, b, AngleModel.parse(angle_model))), "eV")
