"""Synthetic fluid property data for scenarios, demos, and tests.

The tabulated hot-side fluid mimics a supercritical cooler gas: a smooth
background specific heat with a pronounced peak near a pressure-dependent
pseudocritical temperature.  It is generated data, not measured property
values; its role is to provide a strongly temperature-dependent enthalpy
surface for which a constant-cp approximation is visibly wrong.

The cold-side coolant is a water/glycol-like thermally perfect liquid
with a mildly temperature-dependent specific heat.
"""

from __future__ import annotations

import math

from .fluids import Tabulated, ThermallyPerfect

__all__ = [
    "co2_like_enthalpy",
    "make_co2_like_table",
    "make_coolant_model",
    "COOLANT_CP_COEFFS",
]

# Coolant cp(T) = 2800 + 2.0*T  J/(kg K)  (~3400 at 300 K)
COOLANT_CP_COEFFS = (2800.0, 2.0)

_CP_BASE = 1200.0  # J/(kg K) background specific heat
_P_REF = 7.38e6  # Pa, anchor pressure of the pseudocritical line


def _pseudo_critical_T(p: float) -> float:
    return 304.2 + 5.0e-6 * (p - _P_REF)


def _peak_height(p: float) -> float:
    return 4.4e3 * (_P_REF / p)


def _peak_width(p: float) -> float:
    return 10.0 + 2.0e-6 * (p - _P_REF)


def co2_like_enthalpy(T: float, p: float) -> float:
    """Closed-form synthetic enthalpy surface in J/kg.

    cp(T, p) = base + A(p) * sech^2((T - Tpc(p)) / w(p)) integrates to a
    tanh term, so dh/dT > 0 everywhere by construction.
    """
    tpc = _pseudo_critical_T(p)
    a = _peak_height(p)
    w = _peak_width(p)
    return _CP_BASE * T + a * w * math.tanh((T - tpc) / w) - 2.0e-4 * (p - _P_REF)


def make_co2_like_table(
    T_min: float = 270.0,
    T_max: float = 430.0,
    T_step: float = 2.0,
    p_min: float = 8.0e6,
    p_max: float = 1.2e7,
    p_step: float = 5.0e5,
) -> Tabulated:
    """Sample the synthetic surface onto a rectangular grid."""
    n_T = int(round((T_max - T_min) / T_step)) + 1
    n_p = int(round((p_max - p_min) / p_step)) + 1
    T_grid = [T_min + i * T_step for i in range(n_T)]
    p_grid = [p_min + j * p_step for j in range(n_p)]
    h_grid = [[co2_like_enthalpy(T, p) for p in p_grid] for T in T_grid]
    return Tabulated(T_grid, p_grid, h_grid)


def make_coolant_model() -> ThermallyPerfect:
    """Water/glycol-like coolant with cp(T) = 2800 + 2.0*T."""
    return ThermallyPerfect(cp_coeffs=COOLANT_CP_COEFFS, hull_T=(200.0, 600.0))
