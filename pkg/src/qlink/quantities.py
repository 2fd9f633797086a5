"""Unit-tagged scalars over a closed list of units.

Only the units needed by the link-budget calculations are supported. A
:class:`Quantity` always stores one of the canonical unit tokens listed in
:data:`UNITS`; metric prefixes (``keV``, ``nm``, ``THz`` ...) are accepted on
input and folded into the value, so ``Quantity(14.4, "keV")`` is stored as
``Quantity(14400.0, "eV")``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from . import constants as const
from .errors import ParseError, UnitError

# unit -> (dimension, factor to the dimension's reference unit)
UNITS = {
    "eV": ("energy", 1.0),
    "J": ("energy", 1.0 / const.ELEMENTARY_CHARGE),
    "m": ("length", 1.0),
    "cm": ("length", 1e-2),
    "km": ("length", 1e3),
    "pc": ("length", const.PARSEC),
    "AU": ("length", const.ASTRONOMICAL_UNIT),
    "ly": ("length", const.LIGHT_YEAR),
    "s": ("time", 1.0),
    "Hz": ("inverse_time", 1.0),
    "s^-1": ("inverse_time", 1.0),
    "K": ("temperature", 1.0),
    "m^-3": ("number_density", 1.0),
    "cm^-3": ("number_density", 1e6),
    "m^-2 s^-1": ("particle_flux", 1.0),
    "cm^-2 s^-1": ("particle_flux", 1e4),
    "m^2": ("area", 1.0),
    "cm^2": ("area", 1e-4),
    "W m^-2 nm^-1": ("spectral_irradiance", 1.0),
    "nW m^-2 sr^-1": ("radiance", 1.0),
}

PREFIXES = {
    "f": -15, "p": -12, "n": -9, "u": -6, "µ": -6, "m": -3,
    "k": 3, "M": 6, "G": 9, "T": 12, "P": 15,
}
_PREFIXABLE = ("eV", "J", "m", "s", "Hz")

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def _resolve(unit):
    """Return ``(canonical_unit, exact power-of-ten)`` for a unit token."""
    unit = " ".join(unit.split())
    if unit in UNITS:
        return unit, 0
    for base in _PREFIXABLE:
        if unit.endswith(base) and unit[:-len(base)] in PREFIXES:
            return base, PREFIXES[unit[:-len(base)]]
    raise UnitError(
        f"unknown unit {unit!r}; accepted units: {', '.join(UNITS)} "
        f"(metric prefixes allowed on {', '.join(_PREFIXABLE)})"
    )


def dimension_of(unit):
    return UNITS[_resolve(unit)[0]][0]


@dataclass(frozen=True)
class Quantity:
    """A real value with a unit from :data:`UNITS`."""

    value: float
    unit: str

    def __post_init__(self):
        canonical, power = _resolve(self.unit)
        value = self.value
        if power:
            value = _scale_exact(value, power)
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "unit", canonical)

    @property
    def dimension(self):
        return UNITS[self.unit][0]

    def to(self, unit):
        """Magnitude of this quantity expressed in ``unit`` (prefixes allowed)."""
        canonical, power = _resolve(unit)
        value = convert(self, canonical).value
        return _scale_exact(value, -power) if power else value

    def _compatible(self, other):
        if not isinstance(other, Quantity):
            raise UnitError(f"cannot combine Quantity with {type(other).__name__}")
        if other.dimension != self.dimension:
            raise UnitError(
                f"incompatible dimensions: {self.unit} ({self.dimension}) "
                f"and {other.unit} ({other.dimension})"
            )
        return convert(other, self.unit).value

    def __add__(self, other):
        return Quantity(self.value + self._compatible(other), self.unit)

    def __sub__(self, other):
        return Quantity(self.value - self._compatible(other), self.unit)

    def __neg__(self):
        return Quantity(-self.value, self.unit)

    def __mul__(self, k):
        if isinstance(k, Quantity):
            raise UnitError(f"product {self.unit} * {k.unit} is outside the supported unit list")
        return Quantity(self.value * k, self.unit)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, Quantity):
            if k.dimension == self.dimension:
                return self.value / self._compatible(k)
            raise UnitError(f"quotient {self.unit} / {k.unit} is outside the supported unit list")
        return Quantity(self.value / k, self.unit)

    def __lt__(self, other):
        return self.value < self._compatible(other)

    def __le__(self, other):
        return self.value <= self._compatible(other)

    def __gt__(self, other):
        return self.value > self._compatible(other)

    def __ge__(self, other):
        return self.value >= self._compatible(other)

    def __str__(self):
        return f"{self.value:.6g} {self.unit}"


def _scale_exact(value, power):
    # Decimal keeps metric-prefix scaling correctly rounded ("14.4 keV" -> 14400.0)
    if not math.isfinite(value):
        return value
    return float(Decimal(repr(float(value))).scaleb(power))


def convert(q, target_unit):
    """Re-express ``q`` in ``target_unit``.

    Raises
    ------
    UnitError
        If the target unit is unknown or has a different dimension.
    """
    target, power = _resolve(target_unit)
    if power:
        raise UnitError(
            f"target {target_unit!r} is prefixed; use Quantity.to() for a bare magnitude"
        )
    src_dim, src_factor = UNITS[q.unit]
    dst_dim, dst_factor = UNITS[target]
    if src_dim != dst_dim:
        raise UnitError(
            f"cannot convert {q.unit} ({src_dim}) to {target} ({dst_dim})"
        )
    if q.unit == target:
        return q
    return Quantity(q.value * src_factor / dst_factor, target)


def parse_quantity(text):
    """Parse ``"<number><optional whitespace><unit>"``.

    >>> parse_quantity("14.4 keV")
    Quantity(value=14400.0, unit='eV')
    """
    if not isinstance(text, str):
        raise ParseError(f"expected a quantity string, got {type(text).__name__}", 0)
    raw = text.encode("utf-8")
    start = len(text) - len(text.lstrip())
    m = _NUMBER.match(text, start)
    if m is None:
        raise ParseError(f"expected a number in {text!r}", len(text[:start].encode()))
    unit = text[m.end():].strip()
    if not unit:
        raise ParseError(f"missing unit in {text!r}", len(raw))
    try:
        number = Decimal(m.group())
    except InvalidOperation:  # pragma: no cover - regex guarantees a literal
        raise ParseError(f"bad number {m.group()!r}", start)
    canonical, power = _resolve(unit)
    return Quantity(float(number.scaleb(power)), canonical)


def as_quantity(value, default_unit=None):
    """Coerce a string, Quantity or bare number (with ``default_unit``)."""
    if isinstance(value, Quantity):
        return value
    if isinstance(value, str):
        return parse_quantity(value)
    if default_unit is not None and isinstance(value, (int, float)):
        return Quantity(float(value), default_unit)
    raise UnitError(f"cannot interpret {value!r} as a quantity")


# -- spectroscopic equivalences ------------------------------------------------

def photon_energy(q):
    """Photon energy in eV from an energy, frequency, wavelength or temperature."""
    dim = q.dimension
    if dim == "energy":
        return convert(q, "eV")
    if dim == "inverse_time":
        return Quantity(const.PLANCK_EV * q.value, "eV")
    if dim == "length":
        return Quantity(const.PLANCK_EV * const.C_LIGHT / convert(q, "m").value, "eV")
    if dim == "temperature":
        return Quantity(const.BOLTZMANN_EV * q.value, "eV")
    raise UnitError(f"{q.unit} has no photon-energy equivalent")


def photon_frequency(q):
    return Quantity(photon_energy(q).value / const.PLANCK_EV, "Hz")


def photon_wavelength(q):
    return Quantity(const.PLANCK_EV * const.C_LIGHT / photon_energy(q).value, "m")
