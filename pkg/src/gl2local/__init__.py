"""Exact local harmonic analysis for GL(2) over Q_p.

Root-of-unity arithmetic, ramified character integrals, Whittaker function
tables, matrix coefficient evaluation, local period bounds, and the cusp and
divisor-sum combinatorics of modular curves of general level.
"""

from .cyclo import CycloNumber, set_modulus_cap, sqrt_prime, zeta
from .errors import Gl2LocalError

__version__ = "0.1.0"

__all__ = [
    "CycloNumber",
    "Gl2LocalError",
    "set_modulus_cap",
    "sqrt_prime",
    "zeta",
    "__version__",
]
