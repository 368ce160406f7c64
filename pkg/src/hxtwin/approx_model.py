"""One-step-solvable approximate model of the counterflow heat exchanger.

Replaces the reference model's iterative root search by (a) freezing the
fluid behavior into mean specific heats taken from a previous time step
and (b) replacing the logarithmic mean by a beta-weighted blend of the
geometric and arithmetic means.  Both side equations then admit a closed
form root G, and the steady state collapses to explicit formulas.

The hot and cold sides share one universal residual through a term
substitution; the same closed form solves both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .fluids import FluidModel, StreamConfig, mean_specific_heat
from .means import DomainError, arith_mean, geom_mean, log_mean, weighted_mean
from .reference_model import Conductances, InletConditions, OutletTemps, WallState

__all__ = [
    "BetaBranch",
    "BetaSelection",
    "CpParams",
    "SideSubstitution",
    "ApproxEvaluation",
    "hot_substitution",
    "cold_substitution",
    "universal_residual",
    "g_closed_form",
    "beta_lm_value",
    "select_beta",
    "approx_output",
    "approx_steady",
    "approx_steady_walls",
    "update_cp_params",
    "approx_steady_selfconsistent",
    "evaluate_approx",
]

# Steady differences closer than this (relative) use the analytic 2/3
# limit of beta_LM instead of the 0/0-prone quotient.
_BETA_LM_EQUAL_SWITCH = 1e-6
# Capacity ratios closer to 1 than this (relative) take the balanced
# branch of the steady outlet formula.
_BALANCED_SWITCH = 1e-9
# Exponent clamp keeping exp() finite; the surrounding formula converges
# to the correct limit for huge arguments.
_EXP_CLAMP = 700.0


class BetaBranch(Enum):
    BETA_LM = "betaLM"
    BETA_STAR1 = "betaStar1"
    BETA_STAR2 = "betaStar2"
    ZERO = "zero"


@dataclass(frozen=True, slots=True)
class SideSubstitution:
    """Per-side terms of the universal residual.

    Hot side: dT_I = T_h1 - T_w1, unknown dT_II = T_h2 - T_w2, gamma = -1,
    C_p = mdot_h * theta3, aA = theta1.
    Cold side: dT_I = T_w2 - T_c1, unknown dT_II = T_w1 - T_c2, gamma = +1,
    C_p = mdot_c * theta4, aA = theta2.
    Both sides: dT_w = T_w1 - T_w2.
    """

    dT_I: float  # K
    dT_w: float  # K
    C_p: float  # W/K
    gamma: float  # -1 hot, +1 cold
    aA: float  # W/K


@dataclass(frozen=True, slots=True)
class BetaSelection:
    beta: float
    branch: BetaBranch
    feasible_set_empty: bool


@dataclass(frozen=True, slots=True)
class CpParams:
    """Mean specific heats: transient (theta3/theta4) and steady
    (theta5/theta6), hot/cold respectively, in J/(kg K)."""

    theta3: float
    theta4: float
    theta5: float
    theta6: float

    def __post_init__(self):
        if min(self.theta3, self.theta4, self.theta5, self.theta6) <= 0.0:
            raise ValueError("mean specific heats must be positive")


def hot_substitution(
    x: WallState, u: InletConditions, aA_h: float, theta3: float
) -> SideSubstitution:
    return SideSubstitution(
        dT_I=u.T_h1 - x.T_w1,
        dT_w=x.T_w1 - x.T_w2,
        C_p=u.mdot_h * theta3,
        gamma=-1.0,
        aA=aA_h,
    )


def cold_substitution(
    x: WallState, u: InletConditions, aA_c: float, theta4: float
) -> SideSubstitution:
    return SideSubstitution(
        dT_I=x.T_w2 - u.T_c1,
        dT_w=x.T_w1 - x.T_w2,
        C_p=u.mdot_c * theta4,
        gamma=1.0,
        aA=aA_c,
    )


def universal_residual(sub: SideSubstitution, dT_II: float, beta: float) -> float:
    """Residual R~ = gamma*C_p*(dT_I - dT_II + dT_w) - gamma*aA*WM(dT_I, dT_II).

    Used for verification; g_closed_form returns its root directly.
    """
    wm = _wm_safe(sub.dT_I, dT_II, beta)
    return sub.gamma * sub.C_p * (sub.dT_I - dT_II + sub.dT_w) - sub.gamma * sub.aA * wm


def _wm_safe(z1: float, z2: float, beta: float) -> float:
    # Feasible arguments are nonnegative up to root-solver roundoff; clip
    # a vanishing negative before the square root instead of failing.
    if beta == 0.0:
        return 0.5 * (z1 + z2)
    if z1 * z2 < 0.0:
        mag = max(abs(z1), abs(z2))
        if min(abs(z1), abs(z2)) > 1e-9 * max(mag, 1.0):
            raise DomainError(f"weighted mean needs z1*z2 >= 0, got ({z1}, {z2})")
        if abs(z1) < abs(z2):
            z1 = 0.0
        else:
            z2 = 0.0
    return weighted_mean(z1, z2, beta)


def _xi23(dT_I: float, dT_w: float, aA: float, C_p: float) -> tuple[float, float]:
    xi2 = 2.0 * aA * (aA * dT_I - C_p * dT_w)
    xi3 = 4.0 * C_p * C_p * (dT_I + dT_w) + aA * (2.0 * C_p * dT_w - aA * dT_I)
    return xi2, xi3


def g_closed_form(sub: SideSubstitution, beta: float) -> float:
    """Closed-form root G(dT_I, dT_w, aA, C_p, beta) of the universal residual.

    For beta = 0 this reduces to the linear arithmetic-mean solution,
    valid for any dT_I; for beta > 0 the caller must have verified
    (dT_I, beta) feasibility via select_beta.

    The root is the square of the positive root of a quadratic in
    y = sqrt(dT_II).  Evaluating y through the rationalized quadratic
    formula is algebraically identical to the xi1..xi4 expression but
    stays exact at the feasibility edge, where the xi form cancels
    catastrophically just as the geometric-mean term is most sensitive.
    """
    dT_I, dT_w, aA, C_p = sub.dT_I, sub.dT_w, sub.aA, sub.C_p
    xi1 = aA * (1.0 - beta) + 2.0 * C_p
    if beta == 0.0:
        return dT_I + dT_w - aA * (2.0 * dT_I + dT_w) / xi1
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    if dT_I <= 0.0:
        raise DomainError(f"beta > 0 requires dT_I > 0, got dT_I={dT_I}")
    # 0.5*xi1 * y^2 + aA*beta*sqrt(dT_I) * y + c0 = 0, feasible iff c0 <= 0
    b_lin = aA * beta * math.sqrt(dT_I)
    c0 = 0.5 * aA * (1.0 - beta) * dT_I - C_p * (dT_I + dT_w)
    if c0 > 0.0:
        # Tolerate roundoff at the feasible-set boundary only.
        scale = 0.5 * aA * (1.0 - beta) * dT_I + C_p * abs(dT_I + dT_w)
        if c0 > 1e-9 * max(scale, 1e-300):
            raise DomainError(f"beta={beta} outside feasible set")
        c0 = 0.0
    y = -2.0 * c0 / (b_lin + math.sqrt(b_lin * b_lin - 2.0 * xi1 * c0))
    return y * y


def beta_lm_value(steady_dT_Is: float, steady_dT_IIs: float) -> float:
    """beta_LM = (AM - LM)/(AM - GM) on the steady differences.

    Returns the analytic limit 2/3 for nearly equal (or degenerate
    nonpositive) steady differences, clamped into (0, 1].
    """
    s1, s2 = steady_dT_Is, steady_dT_IIs
    if s1 <= 0.0 or s2 <= 0.0 or abs(s1 / s2 - 1.0) < _BETA_LM_EQUAL_SWITCH:
        return 2.0 / 3.0
    am = arith_mean(s1, s2)
    value = (am - log_mean(s1, s2)) / (am - geom_mean(s1, s2))
    return min(max(value, 1e-12), 1.0)


def select_beta(
    sub: SideSubstitution, steady_dT_Is: float, steady_dT_IIs: float
) -> BetaSelection:
    """Choose beta per the published rule.

    If dT_I > 0 and the feasible set B is nonempty, return the member of
    {beta_LM, beta*_1, beta*_2} inside B nearest to beta_LM; otherwise
    beta = 0 (arithmetic-mean fallback).  B is the part of (0, 1] where
    the closed-form radicand is nonnegative and the root position stays
    nonnegative; both constraints reduce to one quadratic in beta whose
    roots are beta*_1/2.
    """
    dT_I, aA = sub.dT_I, sub.aA
    if dT_I <= 0.0:
        return BetaSelection(0.0, BetaBranch.ZERO, False)
    b_lm = beta_lm_value(steady_dT_Is, steady_dT_IIs)
    xi2, xi3 = _xi23(dT_I, sub.dT_w, aA, sub.C_p)
    disc = 4.0 * dT_I * xi3 * aA * aA + xi2 * xi2
    if disc < 0.0:
        return BetaSelection(0.0, BetaBranch.ZERO, True)
    sq = math.sqrt(disc)
    denom = 2.0 * dT_I * aA * aA
    b_star1 = (xi2 + sq) / denom  # upper edge of the quadratic's <= 0 region
    b_star2 = (xi2 - sq) / denom  # lower edge
    if b_star1 <= 0.0 or b_star2 > 1.0:
        return BetaSelection(0.0, BetaBranch.ZERO, True)

    def in_B(c: float) -> bool:
        return 0.0 < c <= 1.0 and b_star2 <= c <= b_star1

    candidates = []
    if in_B(b_lm):
        candidates.append((0.0, 0, b_lm, BetaBranch.BETA_LM))
    if in_B(b_star1):
        candidates.append((abs(b_star1 - b_lm), 1, b_star1, BetaBranch.BETA_STAR1))
    if in_B(b_star2):
        candidates.append((abs(b_star2 - b_lm), 2, b_star2, BetaBranch.BETA_STAR2))
    if not candidates:
        return BetaSelection(0.0, BetaBranch.ZERO, True)
    _, _, beta, branch = min(candidates)
    return BetaSelection(beta, branch, False)


def approx_output(
    x: WallState,
    u: InletConditions,
    cond: Conductances,
    cp: CpParams,
    beta_hot: BetaSelection,
    beta_cold: BetaSelection,
) -> OutletTemps:
    """Approximate outlet temperatures via the closed-form roots.

    T_h2 = G(hot substitution) + T_w2 and T_c2 = T_w1 - G(cold
    substitution), recovering the outlet temperatures from the wall
    referenced differences.
    """
    sub_h = hot_substitution(x, u, cond.aA_h, cp.theta3)
    sub_c = cold_substitution(x, u, cond.aA_c, cp.theta4)
    T_h2 = g_closed_form(sub_h, beta_hot.beta) + x.T_w2
    T_c2 = x.T_w1 - g_closed_form(sub_c, beta_cold.beta)
    return OutletTemps(T_h2, T_c2)


def approx_steady(u: InletConditions, kA: float, cp: CpParams) -> OutletTemps:
    """One-step steady outlet temperatures with frozen mean specific heats.

    Branches on the heat-capacity-rate ratio: the generic counterflow
    expression with xi_s = exp(kA/W_h - kA/W_c), or the balanced-capacity
    form when the ratio is 1 within 1e-9 relative.
    """
    if kA <= 0.0:
        raise ValueError(f"kA must be positive, got {kA}")
    W_h = u.mdot_h * cp.theta5
    W_c = u.mdot_c * cp.theta6
    if abs(W_h / W_c - 1.0) < _BALANCED_SWITCH:
        T_h2s = (u.T_c1 * kA + u.T_h1 * W_h) / (kA + W_h)
    else:
        arg = kA / W_h - kA / W_c
        xi_s = math.exp(min(max(arg, -_EXP_CLAMP), _EXP_CLAMP))
        T_h2s = u.T_c1 + (u.T_c1 - u.T_h1) * (W_c - W_h) / (W_h - W_c * xi_s)
    T_c2s = u.T_c1 + (W_h / W_c) * (u.T_h1 - T_h2s)
    return OutletTemps(T_h2s, T_c2s)


def approx_steady_walls(
    u: InletConditions, kA_cond: Conductances, cp: CpParams
) -> tuple[OutletTemps, WallState]:
    """Steady outlets plus the closed-form steady wall temperatures."""
    outlets = approx_steady(u, kA_cond.kA, cp)
    w = kA_cond.aA_c / (kA_cond.aA_h + kA_cond.aA_c)
    T_w1s = u.T_h1 + w * (outlets.T_c2 - u.T_h1)
    T_w2s = outlets.T_h2 + w * (u.T_c1 - outlets.T_h2)
    return outlets, WallState(T_w1s, T_w2s)


def update_cp_params(
    hot: StreamConfig,
    cold: StreamConfig,
    u: InletConditions,
    prev_outputs: OutletTemps | None = None,
    prev_steady: OutletTemps | None = None,
) -> CpParams:
    """Refresh the four mean specific heats from previous model outputs.

    theta3/theta4 use the previous transient outlets, theta5/theta6 the
    previous steady outlets.  With no history (start-up) all four seed
    from the point specific heat at the intakes.
    """
    if prev_outputs is None:
        prev_outputs = OutletTemps(u.T_h1, u.T_c1)
    if prev_steady is None:
        prev_steady = prev_outputs
    th3 = mean_specific_heat(hot.fluid, u.T_h1, prev_outputs.T_h2, hot.pressure)
    th4 = mean_specific_heat(cold.fluid, u.T_c1, prev_outputs.T_c2, cold.pressure)
    th5 = mean_specific_heat(hot.fluid, u.T_h1, prev_steady.T_h2, hot.pressure)
    th6 = mean_specific_heat(cold.fluid, u.T_c1, prev_steady.T_c2, cold.pressure)
    return CpParams(th3, th4, th5, th6)


def approx_steady_selfconsistent(
    u: InletConditions,
    hot: StreamConfig,
    cold: StreamConfig,
    kA,
    cp0: CpParams | None = None,
    max_iter: int = 5,
    tol: float = 1e-4,
) -> tuple[OutletTemps, CpParams, int]:
    """Fixed-point refinement between approx_steady and the steady cps.

    ``kA`` is either a number or a callable CpParams -> kA, covering
    correlations whose conductance depends on the mean specific heat.
    Stops after max_iter sweeps or when both outlets move < tol kelvin.
    """
    cp = cp0 if cp0 is not None else update_cp_params(hot, cold, u)
    kA_of = kA if callable(kA) else (lambda _cp: kA)
    outlets = approx_steady(u, kA_of(cp), cp)
    n = 0
    for n in range(1, max_iter + 1):
        cp = CpParams(
            cp.theta3,
            cp.theta4,
            mean_specific_heat(hot.fluid, u.T_h1, outlets.T_h2, hot.pressure),
            mean_specific_heat(cold.fluid, u.T_c1, outlets.T_c2, cold.pressure),
        )
        new = approx_steady(u, kA_of(cp), cp)
        moved = max(abs(new.T_h2 - outlets.T_h2), abs(new.T_c2 - outlets.T_c2))
        outlets = new
        if moved < tol:
            break
    return outlets, cp, n


@dataclass(frozen=True, slots=True)
class ApproxEvaluation:
    """Full approximate-model evaluation at one (x, u, theta) point."""

    outlets: OutletTemps
    steady_outlets: OutletTemps
    steady_walls: WallState
    beta_hot: BetaSelection
    beta_cold: BetaSelection
    Q_h: float  # W, heat rate into the hot fluid (negative while cooling)
    Q_c: float  # W, heat rate into the cold fluid


def evaluate_approx(
    x: WallState,
    u: InletConditions,
    cond_out: Conductances,
    cond_steady: Conductances,
    cp: CpParams,
) -> ApproxEvaluation:
    """Evaluate steady state, beta choices, outlets, and heat rates.

    ``cond_out`` enters the output equations (transient mean cps in the
    conductance correlation), ``cond_steady`` the steady-state rating;
    they coincide whenever the correlation ignores the mean cp.
    """
    steady_outlets, steady_walls = approx_steady_walls(u, cond_steady, cp)

    sub_h = hot_substitution(x, u, cond_out.aA_h, cp.theta3)
    beta_h = select_beta(
        sub_h,
        u.T_h1 - steady_walls.T_w1,
        steady_outlets.T_h2 - steady_walls.T_w2,
    )
    dT_II_h = g_closed_form(sub_h, beta_h.beta)

    sub_c = cold_substitution(x, u, cond_out.aA_c, cp.theta4)
    beta_c = select_beta(
        sub_c,
        steady_walls.T_w2 - u.T_c1,
        steady_walls.T_w1 - steady_outlets.T_c2,
    )
    dT_II_c = g_closed_form(sub_c, beta_c.beta)

    outlets = OutletTemps(dT_II_h + x.T_w2, x.T_w1 - dT_II_c)
    Q_h = -sub_h.aA * _wm_safe(sub_h.dT_I, dT_II_h, beta_h.beta)
    Q_c = sub_c.aA * _wm_safe(sub_c.dT_I, dT_II_c, beta_c.beta)
    return ApproxEvaluation(
        outlets, steady_outlets, steady_walls, beta_h, beta_c, Q_h, Q_c
    )
