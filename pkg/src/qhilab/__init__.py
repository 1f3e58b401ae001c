"""qhilab: a numerical laboratory for the quantum hyperbolic invariants
of the figure-eight knot complement.

The package evaluates the special functions entering the state sums
(quantum dilogarithms, cyclic dilogarithms, Clausen/Bloch-Wigner
functions), parametrizes the classical and quantum gluing varieties of
the two-tetrahedron triangulation, computes the state-sum invariants and
their integral representations, and verifies the expected asymptotic
dichotomy: growth rate equal to the hyperbolic volume for odd-parity
longitude weights, zero for even parity.
"""

from .precision import PrecisionContext, context_for_level, digits_for_level

__all__ = [
    "PrecisionContext",
    "context_for_level",
    "digits_for_level",
]

__version__ = "0.1.0"
