"""Joint extended Kalman filter for online thermal performance monitoring.

The filter runs the approximate model only, so every evaluation is
closed form.  Wall temperatures and the correlation leading factors
upsilon_h/upsilon_c are estimated jointly from noisy outlet temperature
measurements; the parameters follow random walks driven purely by
process noise.  Three variants differ in how the cold mass flow enters:

* A: the measured cold flow is fed into the model input;
* B: the cold flow joins the state vector and is estimated;
* C: like B but the cold outlet measurement is unavailable.

Continuous-discrete formulation: noise enters as power spectral
densities, the covariance ODE Pdot = F P + P F' + R is integrated with
the state between samples, and the measurement variance is divided by
the sample interval in the gain.  Retuning is then unnecessary when the
telemetry rate changes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .approx_model import ApproxEvaluation, CpParams, evaluate_approx
from .correlations import CorrelationParams, alpha_A, serial_conductance
from .reference_model import Conductances, InletConditions, WallState
from .wall_dynamics import WallDynamicsConfig, wall_rhs

__all__ = [
    "VARIANTS",
    "DimensionMismatchError",
    "SingularInnovationCovarianceError",
    "EkfConfig",
    "EkfState",
    "ekf_init",
    "f_v",
    "g_v",
    "ekf_evaluation",
    "central_jacobian",
    "ekf_predict",
    "kalman_gain",
    "ekf_update",
    "estimate_kA",
]

VARIANTS = ("A", "B", "C")


class DimensionMismatchError(ValueError):
    """State, covariance, or measurement size disagrees with the variant."""


class SingularInnovationCovarianceError(RuntimeError):
    """The innovation covariance could not be inverted."""


@dataclass(frozen=True)
class EkfConfig:
    variant: str
    wall: WallDynamicsConfig
    corr_hot: CorrelationParams  # upsilon field supplied by the state
    corr_cold: CorrelationParams
    r_x_density: float  # K^2/s, per wall state
    r_upsilon_density: float  # (W/K)^2/s, per leading factor
    r_y_density: float  # K^2 s, per measured channel
    r_mdot_density: float = 0.1  # (kg/s)^2/s, variants B and C
    jacobian_rel_step: float = 1e-6
    jacobian_abs_step: float = 1e-8
    upsilon_floor: float = 1.0  # W/K
    mdot_floor: float = 0.01  # kg/s

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        for name in ("r_x_density", "r_upsilon_density", "r_y_density"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")

    @property
    def n_states(self) -> int:
        return 5 if self.variant in ("B", "C") else 4

    @property
    def measured_rows(self) -> tuple[int, ...]:
        return (0,) if self.variant == "C" else (0, 1)

    def process_noise_density(self) -> np.ndarray:
        d = [self.r_x_density, self.r_x_density,
             self.r_upsilon_density, self.r_upsilon_density]
        if self.n_states == 5:
            d.append(self.r_mdot_density)
        return np.diag(d)


@dataclass
class EkfState:
    x_hat: np.ndarray  # [T_w1, T_w2, upsilon_h, upsilon_c(, mdot_c)]
    P: np.ndarray
    t: float  # s


def _check_state(cfg: EkfConfig, state: EkfState) -> None:
    n = cfg.n_states
    if state.x_hat.shape != (n,) or state.P.shape != (n, n):
        raise DimensionMismatchError(
            f"variant {cfg.variant} needs x_hat ({n},) and P ({n}, {n}), "
            f"got {state.x_hat.shape} and {state.P.shape}"
        )


def ekf_init(
    cfg: EkfConfig,
    wall0: WallState,
    upsilon0: tuple[float, float],
    t0: float = 0.0,
    mdot_c0: float | None = None,
) -> EkfState:
    """Initial estimate with P(t0) = 1 s times the process noise density."""
    x = [wall0.T_w1, wall0.T_w2, upsilon0[0], upsilon0[1]]
    if cfg.n_states == 5:
        if mdot_c0 is None:
            raise DimensionMismatchError(
                f"variant {cfg.variant} estimates mdot_c; mdot_c0 is required"
            )
        x.append(mdot_c0)
    P0 = 1.0 * cfg.process_noise_density()
    return EkfState(np.asarray(x, dtype=float), P0, t0)


def _effective_inlets(
    cfg: EkfConfig, x_v: np.ndarray, u: InletConditions
) -> InletConditions:
    if cfg.n_states == 4:
        return u
    return replace(u, mdot_c=max(float(x_v[4]), cfg.mdot_floor))


def _conductance_pair(
    cfg: EkfConfig, x_v: np.ndarray, u_eff: InletConditions, cp: CpParams
) -> tuple[Conductances, Conductances]:
    ups_h = max(float(x_v[2]), cfg.upsilon_floor)
    ups_c = max(float(x_v[3]), cfg.upsilon_floor)
    hot = cfg.corr_hot.with_upsilon(ups_h)
    cold = cfg.corr_cold.with_upsilon(ups_c)
    cond_out = Conductances(
        alpha_A(hot, u_eff.mdot_h, cp.theta3),
        alpha_A(cold, u_eff.mdot_c, cp.theta4),
    )
    cond_steady = Conductances(
        alpha_A(hot, u_eff.mdot_h, cp.theta5),
        alpha_A(cold, u_eff.mdot_c, cp.theta6),
    )
    return cond_out, cond_steady


def ekf_evaluation(
    cfg: EkfConfig, x_v: np.ndarray, u: InletConditions, cp: CpParams
) -> ApproxEvaluation:
    """Approximate-model evaluation at the joint state x_v.

    Conductances come from the estimated leading factors (floored) and
    the variant-appropriate cold flow.
    """
    u_eff = _effective_inlets(cfg, x_v, u)
    cond_out, cond_steady = _conductance_pair(cfg, x_v, u_eff, cp)
    wall = WallState(float(x_v[0]), float(x_v[1]))
    return evaluate_approx(wall, u_eff, cond_out, cond_steady, cp)


def f_v(cfg: EkfConfig, x_v: np.ndarray, u: InletConditions, cp: CpParams) -> np.ndarray:
    """Joint state derivative: wall dynamics plus zero parameter drift."""
    ev = ekf_evaluation(cfg, x_v, u, cp)
    wall = WallState(float(x_v[0]), float(x_v[1]))
    (d1, d2), _ = wall_rhs(wall, ev.steady_walls, ev.Q_h, ev.Q_c, cfg.wall)
    out = np.zeros(cfg.n_states)
    out[0] = d1
    out[1] = d2
    return out


def g_v(cfg: EkfConfig, x_v: np.ndarray, u: InletConditions, cp: CpParams) -> np.ndarray:
    """Output equation: both outlet temperatures (row selection for the
    measured subset happens in the update)."""
    ev = ekf_evaluation(cfg, x_v, u, cp)
    return np.array([ev.outlets.T_h2, ev.outlets.T_c2])


def central_jacobian(fun, x: np.ndarray, rel_step: float, abs_step: float) -> np.ndarray:
    """Central finite differences of fun with per-component steps
    max(rel_step * |x_i|, abs_step)."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        h = max(rel_step * abs(x[i]), abs_step)
        xp = x.copy()
        xp[i] += h
        xm = x.copy()
        xm[i] -= h
        cols.append((fun(xp) - fun(xm)) / (2.0 * h))
    return np.column_stack(cols)


def ekf_predict(
    state: EkfState,
    cfg: EkfConfig,
    u: InletConditions,
    cp: CpParams,
    dt: float,
) -> EkfState:
    """Propagate estimate and covariance over dt under zero-order-hold u.

    Both integrate with fixed-step RK4 using the wall config's substep
    count; F is evaluated once per substep and held for the covariance
    stages (the covariance ODE is linear given F).  dt is one telemetry
    sample period: the substep count is sized for that, so long horizons
    must loop rather than stretch a single call past the integrator's
    stability region.
    """
    _check_state(cfg, state)
    if dt < 0.0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    x = state.x_hat.copy()
    P = state.P.copy()
    if dt > 0.0:
        Q = cfg.process_noise_density()
        substeps = cfg.wall.substeps_per_sample
        h = dt / substeps

        def f(z: np.ndarray) -> np.ndarray:
            return f_v(cfg, z, u, cp)

        def pdot(M: np.ndarray, F: np.ndarray) -> np.ndarray:
            return F @ M + M @ F.T + Q

        for _ in range(substeps):
            F = central_jacobian(f, x, cfg.jacobian_rel_step, cfg.jacobian_abs_step)
            k1 = f(x)
            p1 = pdot(P, F)
            k2 = f(x + 0.5 * h * k1)
            p2 = pdot(P + 0.5 * h * p1, F)
            k3 = f(x + 0.5 * h * k2)
            p3 = pdot(P + 0.5 * h * p2, F)
            k4 = f(x + h * k3)
            p4 = pdot(P + h * p3, F)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            P = P + (h / 6.0) * (p1 + 2.0 * p2 + 2.0 * p3 + p4)
        P = 0.5 * (P + P.T)
    return EkfState(x, P, state.t + dt)


def kalman_gain(P: np.ndarray, H: np.ndarray, R_disc: np.ndarray) -> np.ndarray:
    """K = P H' (H P H' + R_disc)^-1 via a linear solve."""
    S = H @ P @ H.T + R_disc
    try:
        K = np.linalg.solve(S.T, (P @ H.T).T).T
    except np.linalg.LinAlgError as exc:
        raise SingularInnovationCovarianceError(str(exc)) from exc
    if not np.all(np.isfinite(K)):
        raise SingularInnovationCovarianceError(
            "innovation covariance produced a non-finite gain"
        )
    return K


def ekf_update(
    state: EkfState,
    cfg: EkfConfig,
    u: InletConditions,
    cp: CpParams,
    y_meas: np.ndarray,
    dt: float,
) -> tuple[EkfState, np.ndarray, np.ndarray]:
    """Measurement update at the current time.

    ``y_meas`` holds only the measured channels (hot outlet alone for
    variant C).  Returns the posterior state, the innovation, and the
    full predicted output vector.
    """
    _check_state(cfg, state)
    rows = cfg.measured_rows
    y_meas = np.asarray(y_meas, dtype=float)
    if y_meas.shape != (len(rows),):
        raise DimensionMismatchError(
            f"variant {cfg.variant} measures {len(rows)} channel(s), "
            f"got y_meas shape {y_meas.shape}"
        )
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")

    def g(z: np.ndarray) -> np.ndarray:
        return g_v(cfg, z, u, cp)

    y_pred = g(state.x_hat)
    H = central_jacobian(g, state.x_hat, cfg.jacobian_rel_step, cfg.jacobian_abs_step)
    H = H[list(rows), :]
    innovation = y_meas - y_pred[list(rows)]
    R_disc = (cfg.r_y_density / dt) * np.eye(len(rows))
    K = kalman_gain(state.P, H, R_disc)
    x_new = state.x_hat + K @ innovation
    P_new = state.P - K @ H @ state.P
    P_new = 0.5 * (P_new + P_new.T)
    x_new[2] = max(x_new[2], cfg.upsilon_floor)
    x_new[3] = max(x_new[3], cfg.upsilon_floor)
    if cfg.n_states == 5:
        x_new[4] = max(x_new[4], cfg.mdot_floor)
    return EkfState(x_new, P_new, state.t), innovation, y_pred


def estimate_kA(
    cfg: EkfConfig, x_v: np.ndarray, u: InletConditions, cp: CpParams
) -> float:
    """Serial overall rating from the current parameter estimates."""
    u_eff = _effective_inlets(cfg, x_v, u)
    cond_out, _ = _conductance_pair(cfg, x_v, u_eff, cp)
    return serial_conductance(cond_out.aA_h, cond_out.aA_c)
