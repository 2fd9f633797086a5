"""Published reference numbers recomputed from first principles.

Each case carries a reference value, a computation and a tolerance rule.
Where the reference geometry states its own Schwarzschild radius for the Sun
(3 km) the case uses it instead of the builtin body.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import constants as const
from . import environments as env
from .gravity import EARTH, GaussianPulse, SchwarzschildBody, fidelity_report, max_coherent_path
from .propagation import mean_free_path_cmb, mean_free_path_density, mfp_from_rate, rate_from_flux, rate_spectral
from .quantities import Quantity
from .xsec import ELECTRON, ISOTROPIC_MEAN, PROTON, photon_photon_cross_section, thomson_cross_section

SUN_3KM = SchwarzschildBody("sun", Quantity(3.0, "km"))
OPTICAL = GaussianPulse(Quantity(600.0, "THz"), Quantity(7.0, "MHz"))
MOSSBAUER = GaussianPulse(Quantity(14.4, "keV"), Quantity(5.0, "neV"))
TEST_ENERGY = Quantity(100.0, "keV")


@dataclass(frozen=True)
class Tolerance:
    """``kind`` is one of ``rel``, ``abs``, ``range``, ``factor`` or ``flag``."""

    kind: str
    a: float = 0.0
    b: float = 0.0

    def check(self, computed, reference):
        if self.kind == "rel":
            return abs(computed - reference) <= self.a * abs(reference)
        if self.kind == "abs":
            return abs(computed - reference) <= self.a
        if self.kind == "range":
            return self.a <= computed <= self.b
        if self.kind == "factor":
            return reference / self.a <= computed <= reference * self.a
        if self.kind == "flag":
            return computed < self.a
        raise ValueError(self.kind)

    def describe(self):
        return {
            "rel": lambda: f"+-{self.a:.3g} rel",
            "abs": lambda: f"+-{self.a:.3g} abs",
            "range": lambda: f"in [{self.a:.4g}, {self.b:.4g}]",
            "factor": lambda: f"within x{self.a:g}",
            "flag": lambda: f"< {self.a:.3g}",
        }[self.kind]()


@dataclass(frozen=True)
class Case:
    id: str
    description: str
    reference: float
    unit: str
    tolerance: Tolerance
    compute: Callable[[], float]


@dataclass(frozen=True)
class CaseResult:
    case: Case
    computed: float
    passed: bool

    @property
    def deviation(self):
        ref = self.case.reference
        if ref == 0:
            return math.nan
        return (self.computed - ref) / ref


def _leo(pulse=None):
    return fidelity_report(EARTH, Quantity(6371.0, "km"), Quantity(7500.0, "km"), pulse)


def _proxima(pulse=None):
    return fidelity_report(SUN_3KM, Quantity(1e8, "km"), Quantity(4e13, "km"), pulse)


def _sun_1au(pulse=None):
    return fidelity_report(SUN_3KM, Quantity(1.0, "AU"), Quantity(1.01, "AU"), pulse)


def _mfp(n):
    return mean_free_path_density(Quantity(n, "cm^-3"), thomson_cross_section(ELECTRON)).meters


def _flux_case(name):
    pop = env.lookup(name)
    return rate_from_flux(pop.flux, thomson_cross_section(pop.species))


def _bg_rate(name):
    return rate_spectral(TEST_ENERGY, env.lookup(name), ISOTROPIC_MEAN).value


def _tmax():
    return max_coherent_path(SUN_3KM, Quantity(6e7, "km"))


CMB_T_LITERAL = Quantity(2e-4, "eV")
CMB_T_FIRAS = Quantity(const.CMB_TEMPERATURE_K, "K")


def _cases():
    rel, ab, rng, fac = (lambda a: Tolerance("rel", a)), (lambda a: Tolerance("abs", a)), \
        (lambda a, b: Tolerance("range", a, b)), (lambda a: Tolerance("factor", a))
    return (
        Case("sigma_thomson_electron", "Thomson cross section, electron", 6.65e-25, "cm^2",
             rel(0.005), lambda: thomson_cross_section(ELECTRON).to("cm^2")),
        Case("mfp_ism_thomson", "Thomson mean free path, n_e = 1 cm^-3", 1e22, "m",
             rng(1e22, 2e22), lambda: _mfp(1.0)),
        Case("mfp_ism_thomson_order_pc", "same, decimal order in pc", 6.0, "log10 pc",
             ab(0.0), lambda: float(round(math.log10(_mfp(1.0) / const.PARSEC)))),
        Case("mfp_hii_thomson", "Thomson mean free path, n_e = 1e4 cm^-3", 150.0, "pc",
             rng(100.0, 200.0), lambda: _mfp(1e4) / const.PARSEC),
        Case("cmb_number_density", "CMB photon density at T = 2e-4 eV", 411.0, "cm^-3",
             rel(0.01), lambda: env.cmb_number_density(CMB_T_LITERAL).value),
        Case("cmb_mean_energy", "CMB mean photon energy at T = 2e-4 eV", 6.34e-4, "eV",
             rel(0.01), lambda: env.cmb_mean_energy(CMB_T_LITERAL).value),
        Case("cmb_number_density_2p7255K", "CMB photon density at T = 2.7255 K", 411.0, "cm^-3",
             rel(0.01), lambda: env.cmb_number_density(CMB_T_FIRAS).value),
        Case("cmb_mean_energy_2p7255K", "CMB mean photon energy at T = 2.7255 K", 6.34e-4, "eV",
             rel(0.01), lambda: env.cmb_mean_energy(CMB_T_FIRAS).value),
        Case("sigma_gg_5p07eV", "light-by-light cross section at omega = 5.07 eV", 1.19e-61, "cm^2",
             rel(0.02), lambda: photon_photon_cross_section(Quantity(5.07, "eV")).to("cm^2")),
        Case("mfp_cmb_gg", "CMB light-by-light mean free path, omega = 5.07 eV", 2e58, "cm",
             fac(1.5), lambda: mean_free_path_cmb(omega=Quantity(5.07, "eV"),
                                                  T_cmb=CMB_T_FIRAS).length.to("cm")),
        Case("delta_leo", "shift parameter, Earth 6371 -> 7500 km", 5e-11, "1",
             rng(4.5e-11, 6e-11), lambda: _leo().delta),
        Case("delta2_optical_leo", "overlap^2, 600 THz / 7 MHz, Earth", 0.9999948, "1",
             ab(1e-6), lambda: _leo(OPTICAL).overlap_sq),
        Case("delta2_xray_leo", "overlap^2, 14.4 keV / 5 neV, Earth (effectively zero)", 0.0, "1",
             Tolerance("flag", 1e-30), lambda: _leo(MOSSBAUER).overlap_sq),
        Case("delta_proxima", "shift parameter, Sun 1e8 km -> 4e13 km", 7.5e-9, "1",
             rng(7.2e-9, 7.8e-9), lambda: _proxima().delta),
        Case("delta2_optical_proxima", "overlap^2, 600 THz / 7 MHz, Sun to Proxima", 0.901842, "1",
             ab(0.002), lambda: _proxima(OPTICAL).overlap_sq),
        Case("delta2_optical_sun_1au", "overlap^2, 600 THz / 7 MHz, Sun 1 AU -> 1.01 AU", 0.9999948, "1",
             ab(1e-5), lambda: _sun_1au(OPTICAL).overlap_sq),
        Case("tmax_sun_ly", "coherent path bound, Sun, l = 6e7 km", 127.0, "ly",
             rel(0.01), lambda: _tmax().to("ly")),
        Case("tmax_sun_pc", "coherent path bound, Sun, l = 6e7 km", 39.0, "pc",
             rel(0.03), lambda: _tmax().to("pc")),
        Case("rate_spe", "Thomson rate in a solar particle event", 1e-26, "s^-1",
             fac(2.0), lambda: _flux_case("spe_protons").value),
        Case("mfp_spe", "mean free path in a solar particle event", 1e34, "m",
             fac(2.0), lambda: mfp_from_rate(_flux_case("spe_protons")).meters),
        Case("rate_van_allen", "Thomson rate in the Van Allen electron belt", 1e-18, "s^-1",
             fac(2.0), lambda: _flux_case("van_allen_electrons").value),
        Case("mfp_van_allen", "mean free path in the Van Allen electron belt", 1e25, "m",
             fac(2.0), lambda: mfp_from_rate(_flux_case("van_allen_electrons")).meters),
        Case("rate_cxb", "100 keV rate against the cosmic X-ray background", 8e-52, "s^-1",
             fac(10.0), lambda: _bg_rate("cxb")),
        Case("rate_ebl", "100 keV rate against the optical EBL", 5e-44, "s^-1",
             fac(10.0), lambda: _bg_rate("ebl_optical")),
        Case("ebl_brightness", "integrated optical EBL brightness", 21.0, "nW m^-2 sr^-1",
             ab(1.0), lambda: env.ebl_brightness(env.lookup("ebl_optical")).value),
        Case("rate_solar", "100 keV rate against sunlight at 1 AU (blackbody stand-in)", 7e-33, "s^-1",
             fac(10.0), lambda: _bg_rate("solar_blackbody")),
    )


CASES = {c.id: c for c in _cases()}


def case_ids():
    return list(CASES)


def run_case(case_id):
    case = CASES[case_id]
    value = float(case.compute())
    return CaseResult(case, value, bool(case.tolerance.check(value, case.reference)))


def run_all(ids=None):
    return [run_case(i) for i in (ids or case_ids())]
