"""Physical constants (CODATA 2018) and astronomical length units.

Everything derives from the exact SI defining constants where possible so
that E = h*nu = h*c/lambda holds to rounding error. Values are module-level
floats and should be treated as read-only.
"""

import math
from types import MappingProxyType

# exact SI defining constants
C_LIGHT = 299_792_458.0  # m / s
PLANCK_J = 6.626_070_15e-34  # J s
ELEMENTARY_CHARGE = 1.602_176_634e-19  # C, also J per eV
BOLTZMANN_J = 1.380_649e-23  # J / K

ALPHA = 7.297_352_5693e-3  # fine-structure constant
ELECTRON_MASS = 0.510_998_950_00e6  # eV
PROTON_MASS = 938.272_088_16e6  # eV
ALPHA_PARTICLE_MASS = 3727.379_4066e6  # eV
HYDROGEN_MASS = 938.783_066_3e6  # eV, 1H atom (electron included)
HELIUM_MASS = 3728.401_3e6  # eV, 4He atom

PLANCK_EV = PLANCK_J / ELEMENTARY_CHARGE  # eV s
HBAR_EV = PLANCK_EV / (2.0 * math.pi)  # eV s
HBAR_C = HBAR_EV * C_LIGHT  # eV m  (197.3269804 MeV fm)
HC_EV_NM = PLANCK_EV * C_LIGHT * 1e9  # eV nm
BOLTZMANN_EV = BOLTZMANN_J / ELEMENTARY_CHARGE  # eV / K
STEFAN_BOLTZMANN = 5.670_374_419e-8  # W m^-2 K^-4
ZETA3 = 1.202_056_903_159_594_3  # Apery's constant

PARSEC = 3.085_677_581_491_3673e16  # m (IAU 2015)
ASTRONOMICAL_UNIT = 1.495_978_707e11  # m (IAU 2012, exact)
LIGHT_YEAR = 9_460_730_472_580_800.0  # m (Julian year)

SOLAR_RADIUS = 6.957e8  # m (IAU nominal)
SOLAR_TEFF = 5778.0  # K
CMB_TEMPERATURE_K = 2.7255  # K (FIRAS)

CONSTANTS = MappingProxyType({
    "alpha": ALPHA,
    "m_e": ELECTRON_MASS,
    "m_p": PROTON_MASS,
    "hbar_c": HBAR_C,
    "c": C_LIGHT,
    "k_B": BOLTZMANN_EV,
    "h": PLANCK_EV,
    "zeta3": ZETA3,
    "pc_in_m": PARSEC,
    "AU_in_m": ASTRONOMICAL_UNIT,
    "ly_in_m": LIGHT_YEAR,
})
