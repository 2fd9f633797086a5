"""qlink: feasibility of photonic quantum channels over interstellar paths.

Cross sections, interaction rates and survival probabilities along a path,
gravitational frequency-shift fidelity, and an exact small-matrix simulation
of qubit teleportation.
"""

from .errors import (CatalogError, ConvergenceError, DomainError, InputError, ParseError,
                     QlinkError, SpectrumFormatError, UnitError, ValidationError)
from .quantities import Quantity, convert, parse_quantity

__version__ = "0.1.0"

__all__ = [
    "Quantity", "convert", "parse_quantity",
    "QlinkError", "InputError", "UnitError", "ParseError", "DomainError", "ValidationError",
    "CatalogError", "SpectrumFormatError", "ConvergenceError",
]
