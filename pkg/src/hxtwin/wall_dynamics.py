"""Wall temperature dynamics driving both models between steady states.

The wall state x = (T_w1, T_w2) relaxes toward the steady wall state
xs(u, theta) along a direction set by the error e = xs - x, with a speed
tied to the thermal drift rate Tdot_w = (-Q_h - Q_c)/theta7 (the net
heat flow parked in the wall divided by its heat capacity).  The error
plane splits into five sectors that fix the scalar gain a in
xdot = a * e.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .approx_model import CpParams, evaluate_approx
from .fluids import StreamConfig
from .means import heat_rate
from .reference_model import (
    Conductances,
    InletConditions,
    WallState,
    ref_output,
    ref_steady_outlets,
    steady_wall_temps,
)

__all__ = [
    "Sector",
    "WallDynamicsConfig",
    "classify_sector",
    "wall_drift_rate",
    "wall_rhs",
    "integrate_step",
    "reference_wall_rhs",
    "approx_wall_rhs",
]


class Sector(Enum):
    I = 1  # both errors positive: wall uniformly too cold
    II = 2  # e1 < 0 < e2
    III = 3  # both errors negative: wall uniformly too hot
    IV = 4  # e2 < 0 < e1
    V = 5  # at the steady state within tolerance


@dataclass(frozen=True, slots=True)
class WallDynamicsConfig:
    theta7: float  # J/K, wall heat capacity
    sector_v_epsilon: float = 1e-9  # K, dead band around the steady state
    tdw_lower_bound: float = 1e-6  # K/s, drift floor in sectors II/IV
    substeps_per_sample: int = 10

    def __post_init__(self):
        if self.theta7 <= 0.0:
            raise ValueError(f"theta7 must be positive, got {self.theta7}")
        if self.sector_v_epsilon < 0.0 or self.tdw_lower_bound < 0.0:
            raise ValueError("tolerances must be nonnegative")
        if self.substeps_per_sample < 1:
            raise ValueError("substeps_per_sample must be at least 1")


def classify_sector(e1: float, e2: float, epsilon: float) -> Sector:
    """Sector of the error vector; ties on the axes join sectors I/III."""
    if max(abs(e1), abs(e2)) < epsilon:
        return Sector.V
    if e1 >= 0.0 and e2 >= 0.0:
        return Sector.I
    if e1 <= 0.0 and e2 <= 0.0:
        return Sector.III
    return Sector.II if e2 > 0.0 else Sector.IV


def wall_drift_rate(Q_h: float, Q_c: float, theta7: float) -> float:
    """Tdot_w in K/s; Q_h and Q_c are heat rates into the two fluids."""
    return (-Q_h - Q_c) / theta7


def wall_rhs(
    x: WallState,
    xs: WallState,
    Q_h: float,
    Q_c: float,
    cfg: WallDynamicsConfig,
) -> tuple[tuple[float, float], Sector]:
    """Right-hand side xdot = a * e plus the active sector.

    Sectors I/III: a = 2 Tdot_w / (e1 + e2), matching the drift exactly
    in the mean.  Sectors II/IV: direction from e, magnitude from
    |Tdot_w| (floored), a = 2 max(|Tdot_w|, floor)/||e||.  Sector V
    freezes the state.
    """
    e1 = xs.T_w1 - x.T_w1
    e2 = xs.T_w2 - x.T_w2
    sector = classify_sector(e1, e2, cfg.sector_v_epsilon)
    if sector is Sector.V:
        return (0.0, 0.0), sector
    tdw = wall_drift_rate(Q_h, Q_c, cfg.theta7)
    if sector is Sector.I or sector is Sector.III:
        a = 2.0 * tdw / (e1 + e2)
    else:
        a = 2.0 * max(abs(tdw), cfg.tdw_lower_bound) / math.hypot(e1, e2)
    return (a * e1, a * e2), sector


def integrate_step(
    rhs: Callable[[WallState], tuple[float, float]],
    x: WallState,
    dt: float,
    substeps: int,
) -> WallState:
    """Advance the wall state by dt using fixed-step classical RK4."""
    if dt < 0.0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    if dt == 0.0:
        return x
    h = dt / substeps
    w1, w2 = x.T_w1, x.T_w2
    for _ in range(substeps):
        k1 = rhs(WallState(w1, w2))
        k2 = rhs(WallState(w1 + 0.5 * h * k1[0], w2 + 0.5 * h * k1[1]))
        k3 = rhs(WallState(w1 + 0.5 * h * k2[0], w2 + 0.5 * h * k2[1]))
        k4 = rhs(WallState(w1 + h * k3[0], w2 + h * k3[1]))
        w1 += (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        w2 += (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    return WallState(w1, w2)


def reference_wall_rhs(
    u: InletConditions,
    cond: Conductances,
    hot: StreamConfig,
    cold: StreamConfig,
    cfg: WallDynamicsConfig,
) -> Callable[[WallState], tuple[float, float]]:
    """RHS closure for the reference model with u and theta frozen.

    The steady wall state is solved once here (it depends only on u and
    theta); each stage evaluation then needs just the two transient root
    solves for the outlet temperatures.
    """
    steady = ref_steady_outlets(u, cond.kA, hot, cold)
    xs = steady_wall_temps(steady, u, cond)

    def rhs(x: WallState) -> tuple[float, float]:
        outs = ref_output(x, u, cond, hot, cold)
        Q_h = -heat_rate(u.T_h1 - x.T_w1, outs.T_h2 - x.T_w2, cond.aA_h)
        Q_c = heat_rate(x.T_w1 - outs.T_c2, x.T_w2 - u.T_c1, cond.aA_c)
        return wall_rhs(x, xs, Q_h, Q_c, cfg)[0]

    return rhs


def approx_wall_rhs(
    u: InletConditions,
    cond_out: Conductances,
    cond_steady: Conductances,
    cp: CpParams,
    cfg: WallDynamicsConfig,
) -> Callable[[WallState], tuple[float, float]]:
    """RHS closure for the approximate model; everything is closed form,
    so the full evaluation (steady state included) runs per stage."""

    def rhs(x: WallState) -> tuple[float, float]:
        ev = evaluate_approx(x, u, cond_out, cond_steady, cp)
        return wall_rhs(x, ev.steady_walls, ev.Q_h, ev.Q_c, cfg)[0]

    return rhs
