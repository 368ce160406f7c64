"""Mean-value functions and the unrestricted heat-rate function.

Provides the arithmetic, geometric, and logarithmic means of two real
arguments, the beta-weighted blend of geometric and arithmetic mean that
serves as a one-step surrogate for the logarithmic mean, and the total
(unrestricted) heat-rate function used by both exchanger models.

All functions are pure and stateless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "MeanDomainFlags",
    "arith_mean",
    "geom_mean",
    "log_mean",
    "weighted_mean",
    "heat_rate",
    "in_lm_domain",
]

# Relative closeness of z1/z2 to 1 below which log_mean switches to its
# series expansion to avoid catastrophic cancellation in ln(z1/z2).
_LM_SERIES_SWITCH = 1e-8


class DomainError(ValueError):
    """Arguments outside the mathematical domain of a mean function."""


@dataclass(frozen=True)
class MeanDomainFlags:
    """Whether a pair of differences lies in the log-mean domain L."""

    in_lm_domain: bool


def in_lm_domain(z1: float, z2: float) -> bool:
    """True iff (z1, z2) is in L = {z1 > 0, z2 > 0, z1 != z2}."""
    return z1 > 0.0 and z2 > 0.0 and z1 != z2


def arith_mean(z1: float, z2: float) -> float:
    """Arithmetic mean (z1 + z2) / 2."""
    return 0.5 * (z1 + z2)


def geom_mean(z1: float, z2: float) -> float:
    """Geometric mean sqrt(z1 * z2).

    Requires z1 * z2 >= 0 so the square root stays real.
    """
    if z1 * z2 < 0.0:
        raise DomainError(f"geom_mean requires z1*z2 >= 0, got ({z1}, {z2})")
    return math.sqrt(z1 * z2)


def log_mean(z1: float, z2: float) -> float:
    """Logarithmic mean (z1 - z2) / ln(z1 / z2) on the domain L.

    Evaluated as AM * e / atanh(e) with e = (z1 - z2)/(z1 + z2), which
    is the same function (ln(z1/z2) = 2 atanh(e)) but keeps full
    relative accuracy as z1 -> z2, where the naive quotient loses one
    digit per decade of closeness.  For |z1/z2 - 1| < 1e-8 the value
    switches to the series AM * (1 - e**2 / 3 + ...), the analytic
    continuation through the removable singularity.
    """
    if z1 <= 0.0 or z2 <= 0.0 or z1 == z2:
        raise DomainError(f"log_mean needs z1, z2 > 0 and z1 != z2, got ({z1}, {z2})")
    e = (z1 - z2) / (z1 + z2)
    if abs(z1 / z2 - 1.0) < _LM_SERIES_SWITCH:
        return 0.5 * (z1 + z2) * (1.0 - e * e / 3.0)
    return 0.5 * (z1 + z2) * e / math.atanh(e)


def weighted_mean(z1: float, z2: float, beta: float) -> float:
    """Weighted mean WM = beta * GM + (1 - beta) * AM.

    Parameters
    ----------
    z1, z2 : float
        Arguments with z1 * z2 >= 0.
    beta : float
        Weighting parameter in [0, 1]; beta = 0 gives the arithmetic
        mean and beta = 1 the geometric mean.
    """
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    if beta == 0.0:
        # Skip the GM domain check: the AM branch is total.
        return arith_mean(z1, z2)
    return beta * geom_mean(z1, z2) + (1.0 - beta) * arith_mean(z1, z2)


def heat_rate(z1: float, z2: float, z3: float) -> float:
    """Unrestricted heat-rate function Q(z1, z2, z3).

    Returns z3 * log_mean(z1, z2) when (z1, z2) lies in the log-mean
    domain L and z3 * arith_mean(z1, z2) otherwise.  The arithmetic
    branch extends the function continuously to zero, negative, and
    equal temperature differences, which occur in transient phases.
    z3 is a thermal conductance in W/K.
    """
    if z1 > 0.0 and z2 > 0.0 and z1 != z2:
        return z3 * log_mean(z1, z2)
    return z3 * 0.5 * (z1 + z2)
