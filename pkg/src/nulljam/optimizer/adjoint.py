"""Optimality system for the jamming trajectory problem: saturated control
law, analytic power gradients, costate flows and terminal conditions.

State is the double integrator (p_g, v_g); costates (xi_p, xi_v) follow the
adjoint of the Hamiltonian

    H = u'Ru/2 + v'Q_r v/2 - a_r sigma(P*) + xi_p'v + xi_v'u,

where P* is the received power at the eavesdropper with the
orientation-optimal far-field gain substituted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..beamforming import optimal_beampattern
from ..errors import DegenerateGeometryError, InvalidInputError
from ..geometry import FarFieldGeometry, as_xy
from ..propagation import (
    LN10,
    ActivationSpec,
    RadioParams,
    jamming_power_dbm,
    sigma,
    sigma_prime,
)


@dataclass(frozen=True)
class UavState:
    """Array-center position (m) and velocity (m/s)."""

    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", as_xy(self.position))
        v = np.asarray(self.velocity, dtype=float)
        if v.shape != (2,) or not np.all(np.isfinite(v)):
            raise InvalidInputError(f"velocity must be a finite 2-vector, got {self.velocity}")
        object.__setattr__(self, "velocity", v)

    def as_vector(self) -> np.ndarray:
        return np.concatenate((self.position, self.velocity))

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "UavState":
        x = np.asarray(x, dtype=float)
        return cls(position=x[:2].copy(), velocity=x[2:4].copy())


@dataclass(frozen=True)
class Costate:
    """Position and velocity costates of the optimality system."""

    xi_p: np.ndarray
    xi_v: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate((np.asarray(self.xi_p, float), np.asarray(self.xi_v, float)))

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "Costate":
        x = np.asarray(x, dtype=float)
        return cls(xi_p=x[:2].copy(), xi_v=x[2:4].copy())


def _as_psd_matrix(q, name: str) -> np.ndarray:
    m = np.asarray(q, dtype=float)
    if m.shape == ():
        m = float(m) * np.eye(2)
    if m.shape != (2, 2):
        raise InvalidInputError(f"{name} must be a 2x2 matrix or a scalar, got shape {m.shape}")
    if not np.allclose(m, m.T):
        raise InvalidInputError(f"{name} must be symmetric")
    eigs = np.linalg.eigvalsh(m)
    if eigs.min() < -1e-12:
        raise InvalidInputError(f"{name} must be positive semidefinite, eigenvalues {eigs}")
    return m


@dataclass(frozen=True)
class CostWeights:
    """Weights of the trajectory cost.

    ``r`` is the diagonal of the control penalty R, ``q_r``/``q_f`` the
    running/terminal velocity penalties, ``a_r``/``a_f`` the running/terminal
    jamming emphasis, ``u_bar`` the per-axis acceleration bound and ``t_f``
    the horizon in seconds.
    """

    r: np.ndarray
    q_r: np.ndarray
    q_f: np.ndarray
    a_r: float
    a_f: float
    u_bar: float
    t_f: float

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.shape == ():
            r = np.array((float(r), float(r)))
        if r.shape != (2,) or not np.all(r > 0.0):
            raise InvalidInputError(f"r must be two positive entries, got {self.r}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "q_r", _as_psd_matrix(self.q_r, "q_r"))
        object.__setattr__(self, "q_f", _as_psd_matrix(self.q_f, "q_f"))
        if self.a_r < 0.0 or self.a_f < 0.0:
            raise InvalidInputError("a_r and a_f must be nonnegative")
        if not self.u_bar > 0.0:
            raise InvalidInputError(f"u_bar must be positive, got {self.u_bar}")
        if not self.t_f > 0.0:
            raise InvalidInputError(f"t_f must be positive, got {self.t_f}")

    def with_horizon(self, t_f: float) -> "CostWeights":
        return CostWeights(self.r, self.q_r, self.q_f, self.a_r, self.a_f, self.u_bar, t_f)


@dataclass(frozen=True)
class PlanningProblem:
    """Target positions frozen at planning time plus the radio configuration."""

    client: np.ndarray
    eavesdropper: np.ndarray
    radio: RadioParams
    separation: float
    activation: ActivationSpec
    reg_eps: float = 1e-9  # floor for the B* and squared-distance denominators

    def __post_init__(self):
        object.__setattr__(self, "client", as_xy(self.client))
        object.__setattr__(self, "eavesdropper", as_xy(self.eavesdropper))
        if not self.separation > 0.0:
            raise InvalidInputError(f"separation must be positive, got {self.separation}")
        if not self.reg_eps > 0.0:
            raise InvalidInputError("reg_eps must be positive")

    @property
    def kD(self) -> float:
        return self.radio.wavenumber * self.separation


@dataclass(frozen=True)
class AdjointTerms:
    """Pieces of the costate flow at one state: activation slope factor
    ``gamma = 10 sigma'(P*) / ln 10``, path-loss gradient ``grad_L``,
    far-field gain gradient ``grad_B`` (zero outside the sub-saturation
    case), and the geometry the regularized ratios need."""

    gamma: float
    grad_L: np.ndarray
    grad_B: np.ndarray
    in_case_one: bool
    bstar: float
    offset_e: np.ndarray = field(repr=False)  # p_e - p_g
    dist_sq_e: float = 0.0


def control_from_costate(costate: Costate, weights: CostWeights) -> np.ndarray:
    """Pointwise-optimal control: per axis, -xi_v/r clipped to [-u_bar, u_bar]."""
    return np.clip(-np.asarray(costate.xi_v, float) / weights.r, -weights.u_bar, weights.u_bar)


def grad_fspl(uav, eavesdropper, wavenumber: float) -> np.ndarray:
    """Gradient of the path loss at the eavesdropper with respect to the UAV
    position: (p_e - p_g) / (2 k^2 ||p_e - p_g||^4)."""
    offset = as_xy(eavesdropper) - as_xy(uav)
    d2 = float(offset @ offset)
    if d2 == 0.0:
        raise DegenerateGeometryError("UAV coincides with the eavesdropper")
    return offset / (2.0 * wavenumber * wavenumber * d2 * d2)


def grad_beampattern(uav, eavesdropper, client, wavenumber: float, separation: float) -> np.ndarray:
    """Gradient of the optimal far-field gain with respect to the UAV
    position, valid in the sub-saturation regime |mu| < pi/(2 kD); the caller
    applies the case indicator."""
    pg = as_xy(uav)
    dc = as_xy(client) - pg
    de = as_xy(eavesdropper) - pg
    rho_c2 = float(dc @ dc)
    rho_e2 = float(de @ de)
    if rho_c2 == 0.0 or rho_e2 == 0.0:
        raise DegenerateGeometryError("UAV coincides with a target")
    theta_c = math.atan2(dc[1], dc[0])
    theta_e = math.atan2(de[1], de[0])
    ff = FarFieldGeometry.from_bearings(theta_c, theta_e)
    kD = wavenumber * separation
    half = math.asin(ff.mu)  # wrapped (theta_c - theta_e)/2
    common = 2.0 * kD * math.sin(2.0 * kD * ff.mu) * math.cos(half)
    return common * np.array(
        (
            dc[1] / rho_c2 - de[1] / rho_e2,
            -dc[0] / rho_c2 + de[0] / rho_e2,
        )
    )


def adjoint_terms(state: UavState, problem: PlanningProblem) -> AdjointTerms:
    """Assemble the costate-flow ingredients at one state."""
    pg = state.position
    offset_e = problem.eavesdropper - pg
    dist_sq = float(offset_e @ offset_e)
    if dist_sq == 0.0 or np.array_equal(pg, problem.client):
        raise DegenerateGeometryError("UAV coincides with a target")
    ff = FarFieldGeometry.from_positions(pg, problem.client, problem.eavesdropper)
    kD = problem.kD
    in_case_one = abs(ff.mu) < math.pi / (2.0 * kD)
    bstar = optimal_beampattern(ff, kD)
    power = jamming_power_dbm(bstar, math.sqrt(dist_sq), problem.radio)
    gamma = 10.0 * sigma_prime(power, problem.activation) / LN10
    grad_L = grad_fspl(pg, problem.eavesdropper, problem.radio.wavenumber)
    if in_case_one:
        grad_B = grad_beampattern(
            pg, problem.eavesdropper, problem.client, problem.radio.wavenumber, problem.separation
        )
    else:
        grad_B = np.zeros(2)
    return AdjointTerms(
        gamma=gamma,
        grad_L=grad_L,
        grad_B=grad_B,
        in_case_one=in_case_one,
        bstar=bstar,
        offset_e=offset_e,
        dist_sq_e=dist_sq,
    )


def power_gradient(terms: AdjointTerms, reg_eps: float = 1e-9) -> np.ndarray:
    """The bracketed vector of the costate flow,
    grad_B / B* (sub-saturation case only) + grad_L / L, with floored
    denominators.

    The path-loss ratio is evaluated in its reduced form
    2 (p_e - p_g) / ||p_e - p_g||^2 (algebraically identical to grad_L / L),
    so the floor guards only the true singularity at zero range instead of
    distorting long-range flows where L itself is tiny.
    """
    out = 2.0 * terms.offset_e / max(terms.dist_sq_e, reg_eps)
    if terms.in_case_one:
        out = out + terms.grad_B / max(terms.bstar, reg_eps)
    return out


def costate_flow(
    state: UavState,
    costate: Costate,
    terms: AdjointTerms,
    weights: CostWeights,
    reg_eps: float = 1e-9,
) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives (xi_p_dot, xi_v_dot) of the costates."""
    xi_p_dot = weights.a_r * terms.gamma * power_gradient(terms, reg_eps)
    xi_v_dot = -np.asarray(costate.xi_p, float) - weights.q_r @ state.velocity
    return xi_p_dot, xi_v_dot


def terminal_conditions(
    state_tf: UavState, problem: PlanningProblem, weights: CostWeights
) -> Costate:
    """Transversality values of the costates at the final time."""
    terms = adjoint_terms(state_tf, problem)
    xi_p = -weights.a_f * terms.gamma * power_gradient(terms, problem.reg_eps)
    xi_v = weights.q_f @ state_tf.velocity
    return Costate(xi_p=xi_p, xi_v=xi_v)


def received_power(state_position, problem: PlanningProblem) -> float:
    """P* at one UAV position: optimal far-field gain folded with range."""
    pg = as_xy(state_position)
    ff = FarFieldGeometry.from_positions(pg, problem.client, problem.eavesdropper)
    offset = problem.eavesdropper - pg
    distance = float(np.hypot(*offset))
    return jamming_power_dbm(optimal_beampattern(ff, problem.kD), distance, problem.radio)


def hamiltonian(
    state: UavState,
    costate: Costate,
    control: np.ndarray,
    problem: PlanningProblem,
    weights: CostWeights,
) -> float:
    """Control Hamiltonian; used by the finite-difference consistency checks."""
    u = np.asarray(control, dtype=float)
    v = state.velocity
    running = 0.5 * float(u @ (weights.r * u)) + 0.5 * float(v @ (weights.q_r @ v))
    if weights.a_r != 0.0:
        running -= weights.a_r * sigma(received_power(state.position, problem), problem.activation)
    return running + float(np.asarray(costate.xi_p) @ v) + float(np.asarray(costate.xi_v) @ u)
