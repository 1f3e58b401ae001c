"""Working-precision bookkeeping.

Every numeric operation in the package takes a :class:`PrecisionContext`
which fixes the number of decimal digits carried by mpmath and the relative
tolerance targeted by adaptive quadrature.  The scheduled precision
``digits_for_level`` grows linearly with the state-sum level N: case (b)
sums cancel down from terms of size ``exp(N*Cl2(pi/3)/2pi)``, which costs
about 0.071*N decimal digits, and the default schedule covers that with a
40-digit base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp

__all__ = [
    "PrecisionContext",
    "digits_for_level",
    "context_for_level",
    "DEFAULT_DIGITS_BASE",
    "DEFAULT_DIGITS_SLOPE",
]

DEFAULT_DIGITS_BASE = 40
DEFAULT_DIGITS_SLOPE = 0.071


def digits_for_level(n: int, base: int = DEFAULT_DIGITS_BASE,
                     slope: float = DEFAULT_DIGITS_SLOPE) -> int:
    """Decimal digits needed for level-N state sums: base + ceil(slope*N)."""
    return int(base + math.ceil(slope * n))


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision threaded through every numeric operation.

    digits        decimal digits of working precision (>= 15)
    quad_rel_tol  relative tolerance targeted by adaptive quadrature;
                  must not be sharper than 10**(-digits+5)
    """

    digits: int = 30
    quad_rel_tol: float = field(default=0.0)

    def __post_init__(self):
        if self.digits < 15:
            raise ValueError(f"digits must be >= 15, got {self.digits}")
        tol = self.quad_rel_tol
        if tol == 0.0:
            tol = 10.0 ** (-(self.digits - 5))
            object.__setattr__(self, "quad_rel_tol", tol)
        if tol < 10.0 ** (-(self.digits - 5)):
            raise ValueError(
                f"quad_rel_tol={tol} is sharper than 10^-(digits-5) "
                f"with digits={self.digits}")

    # -- mpmath helpers -------------------------------------------------

    def workdps(self):
        """Context manager switching mpmath to this precision."""
        return mp.workdps(self.digits)

    def eps(self, margin: int = 0) -> mp.mpf:
        """10**(-(digits - margin)) as an mpf."""
        with self.workdps():
            return mp.mpf(10) ** (-(self.digits - margin))

    @property
    def pole_tol(self) -> mp.mpf:
        """Pole/zero proximity tolerance 10**(-digits/2)."""
        with self.workdps():
            return mp.mpf(10) ** (-self.digits / 2)

    def mpc(self, re, im=0) -> mp.mpc:
        with self.workdps():
            return mp.mpc(mp.mpf(re), mp.mpf(im))

    def mpf(self, x) -> mp.mpf:
        with self.workdps():
            return mp.mpf(x)


def context_for_level(n: int, quad_rel_tol: float = 0.0,
                      digits_override: int | None = None) -> PrecisionContext:
    """PrecisionContext at the scheduled precision for level N."""
    digits = digits_override if digits_override else digits_for_level(n)
    return PrecisionContext(digits=digits, quad_rel_tol=quad_rel_tol)
