"""Computational laboratory for weighted-sieve arguments on quadratic polynomials."""

from p2lab.errors import DomainError, InvariantError, RangeError, UnsupportedModulusError
from p2lab.polyform import QuadraticPoly, ShiftedPoly, shift_to_G

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InvariantError",
    "RangeError",
    "UnsupportedModulusError",
    "QuadraticPoly",
    "ShiftedPoly",
    "shift_to_G",
]
