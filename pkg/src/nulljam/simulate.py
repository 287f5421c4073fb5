"""Forward mission simulation: double-integrator flight, online beam
control (null tracking, Doppler compensation, orientation), and the
receding-horizon replanning loop.

Planning freezes the targets at each replan instant; the beam control is
recomputed at the simulation rate from the *current* target positions, so
the client null holds exactly even while targets move between replans.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .beamforming import BeamControl, beampattern, nulling_phase, optimal_orientation
from .errors import InvalidInputError, SolverError
from .geometry import ArrayGeometry, FarFieldGeometry, PlanarPoint, as_xy
from .optimizer import (
    BvpSolution,
    CostWeights,
    PlanningProblem,
    SolverOptions,
    UavState,
    solve_bvp,
)
from .propagation import ActivationSpec, RadioParams, jamming_power_dbm

NULL_GAIN_EPS = 1e-12
"""Gain at the client below which the null is considered exact and the
logged client power is the -inf sentinel."""


@dataclass(frozen=True)
class TargetMotion:
    """Position-over-time model for a client or eavesdropper.

    Kinds: ``static``, ``constant-velocity`` (initial + velocity * t) and
    ``waypoint-sequence`` (piecewise-linear through (time, point) pairs,
    holding the last point).
    """

    kind: str
    initial: np.ndarray
    velocity: Optional[np.ndarray] = None
    waypoints: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "initial", as_xy(self.initial))
        if self.kind == "static":
            pass
        elif self.kind == "constant-velocity":
            if self.velocity is None:
                raise InvalidInputError("constant-velocity motion requires a velocity")
            v = np.asarray(self.velocity, dtype=float)
            if v.shape != (2,) or not np.all(np.isfinite(v)):
                raise InvalidInputError(f"velocity must be a finite 2-vector, got {self.velocity}")
            object.__setattr__(self, "velocity", v)
        elif self.kind == "waypoint-sequence":
            if not self.waypoints:
                raise InvalidInputError("waypoint-sequence motion requires waypoints")
            wps = tuple((float(t), as_xy(p)) for t, p in self.waypoints)
            times = np.array([t for t, _ in wps])
            if times[0] < 0.0 or np.any(np.diff(times) <= 0.0):
                raise InvalidInputError("waypoint times must be nonnegative and strictly increasing")
            object.__setattr__(self, "waypoints", wps)
        else:
            raise InvalidInputError(f"unknown motion kind {self.kind!r}")

    @classmethod
    def static(cls, point) -> "TargetMotion":
        return cls(kind="static", initial=as_xy(point))

    @classmethod
    def constant_velocity(cls, point, velocity) -> "TargetMotion":
        return cls(kind="constant-velocity", initial=as_xy(point), velocity=velocity)

    @classmethod
    def waypoint_sequence(cls, waypoints) -> "TargetMotion":
        wps = tuple((t, p) for t, p in waypoints)
        return cls(kind="waypoint-sequence", initial=as_xy(wps[0][1]), waypoints=wps)

    def position(self, t: float) -> np.ndarray:
        if self.kind == "static":
            return self.initial
        if self.kind == "constant-velocity":
            return self.initial + self.velocity * t
        times = [w[0] for w in self.waypoints]
        if t <= times[0]:
            return self.waypoints[0][1]
        if t >= times[-1]:
            return self.waypoints[-1][1]
        j = int(np.searchsorted(times, t, side="right")) - 1
        t0, p0 = self.waypoints[j]
        t1, p1 = self.waypoints[j + 1]
        w = (t - t0) / (t1 - t0)
        return (1.0 - w) * p0 + w * p1


@dataclass(frozen=True)
class Mission:
    """A full runnable scenario: target motions, initial UAV state and the
    radio/cost configuration."""

    client: TargetMotion
    eavesdropper: TargetMotion
    uav_initial: UavState
    radio: RadioParams
    separation: float
    activation: ActivationSpec
    weights: CostWeights
    reg_eps: float = 1e-9

    def frozen_problem(self, t: float) -> PlanningProblem:
        return PlanningProblem(
            client=self.client.position(t),
            eavesdropper=self.eavesdropper.position(t),
            radio=self.radio,
            separation=self.separation,
            activation=self.activation,
            reg_eps=self.reg_eps,
        )


@dataclass
class TrajectoryLog:
    """Time-indexed record of the executed flight and beam control."""

    t: np.ndarray
    states: np.ndarray  # (N, 4)
    controls: np.ndarray  # (N, 2)
    phi1: np.ndarray
    phi2: np.ndarray
    theta_g: np.ndarray
    gain_e: np.ndarray
    gain_c: np.ndarray
    power_e: np.ndarray
    power_c: np.ndarray

    def __len__(self) -> int:
        return self.t.size

    @property
    def max_client_gain(self) -> float:
        return float(self.gain_c.max())


@dataclass(frozen=True)
class ReplanRecord:
    index: int
    time: float
    converged: bool
    adopted: bool
    iterations: int
    solve_seconds: float
    cost: float


@dataclass
class SimulationResult:
    log: TrajectoryLog
    replans: list
    plans: list = field(default_factory=list)  # adopted BvpSolution per replan (None if kept previous)


class DopplerAccumulator:
    """Running phase offset -int k v^T (p_e - p_g)/||p_e - p_g|| dt,
    trapezoidal on the simulation mesh; phi1 stays unwrapped here and is
    wrapped only when a BeamControl is emitted."""

    def __init__(self, wavenumber: float):
        self.wavenumber = wavenumber
        self.phi1 = 0.0
        self._last: Optional[tuple[float, float]] = None  # (t, rate)

    def rate(self, velocity: np.ndarray, uav_pos: np.ndarray, eavesdropper: np.ndarray) -> float:
        offset = eavesdropper - uav_pos
        dist = float(np.hypot(*offset))
        return self.wavenumber * float(velocity @ offset) / dist

    def advance(self, t: float, velocity, uav_pos, eavesdropper) -> float:
        r = self.rate(np.asarray(velocity, float), as_xy(uav_pos), as_xy(eavesdropper))
        if self._last is not None:
            t0, r0 = self._last
            self.phi1 -= 0.5 * (r0 + r) * (t - t0)
        self._last = (t, r)
        return self.phi1


def integrate_dynamics(
    initial: UavState,
    control_signal: Callable[[float], np.ndarray],
    dt: float,
    duration: float,
) -> tuple[np.ndarray, np.ndarray]:
    """RK4 integration of the double integrator under ``control_signal``;
    returns (times, states) with states rows [x, y, vx, vy]."""
    if not dt > 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    n = int(round(duration / dt))
    times = np.arange(n + 1) * dt
    states = np.empty((n + 1, 4))
    states[0] = initial.as_vector()

    def f(t, x):
        u = np.asarray(control_signal(t), dtype=float)
        return np.concatenate((x[2:4], u))

    for i in range(n):
        t, x, h = times[i], states[i], dt
        k1 = f(t, x)
        k2 = f(t + 0.5 * h, x + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, x + 0.5 * h * k2)
        k4 = f(t + h, x + h * k3)
        states[i + 1] = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return times, states


def apply_beam_control(
    state: UavState,
    client,
    eavesdropper,
    radio: RadioParams,
    separation: float,
    phi1: float = 0.0,
    previous_theta_g: Optional[float] = None,
) -> BeamControl:
    """Instantaneous beam command: orientation from the far-field optimum,
    then the exact-distance nulling phase for the oriented array, with
    ``phi1`` taken from the caller's Doppler accumulator."""
    pg = state.position
    ff = FarFieldGeometry.from_positions(pg, client, eavesdropper)
    theta_g = optimal_orientation(ff, radio.wavenumber * separation, previous_theta_g)
    geom = ArrayGeometry(
        center=PlanarPoint(*pg),
        orientation=theta_g,
        separation=separation,
        wavenumber=radio.wavenumber,
    )
    phi2 = nulling_phase(phi1, client, geom)
    return BeamControl.wrapped(phi1, phi2, theta_g)


def _log_sample(mission, t, state_vec, beam, geom):
    client = mission.client.position(t)
    eaves = mission.eavesdropper.position(t)
    gain_c = beampattern(client, geom, beam.phi1, beam.phi2)
    gain_e = beampattern(eaves, geom, beam.phi1, beam.phi2)
    d_e = float(np.hypot(*(eaves - state_vec[:2])))
    d_c = float(np.hypot(*(client - state_vec[:2])))
    power_e = jamming_power_dbm(gain_e, d_e, mission.radio)
    if gain_c <= NULL_GAIN_EPS:
        power_c = float("-inf")
    else:
        power_c = jamming_power_dbm(gain_c, d_c, mission.radio)
    return gain_e, gain_c, power_e, power_c


def receding_horizon(
    mission: Mission,
    replan_interval: float,
    horizon: float,
    total: float,
    dt: float = 0.1,
    warm_start: bool = True,
    shrinking_horizon: bool = False,
    solver_options: Optional[SolverOptions] = None,
) -> SimulationResult:
    """Replan every ``replan_interval`` seconds over a ``horizon``-second
    window with targets frozen at the replan instant, executing each plan's
    first interval while updating the beam control every ``dt``.

    A replan that fails to converge is recorded and the previous plan keeps
    executing (zero control if there is no previous plan); the next instant
    retries.  ``shrinking_horizon`` trims each window to the remaining
    mission time, which makes replans consistent with one long plan when the
    targets are static.
    """
    if not (0.0 < replan_interval <= horizon <= total):
        raise InvalidInputError("need 0 < replan_interval <= horizon <= total")
    if not dt > 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")

    n_samples = int(round(total / dt))
    sample_times = np.arange(n_samples + 1) * dt
    state = mission.uav_initial.as_vector().copy()
    doppler = DopplerAccumulator(mission.radio.wavenumber)
    prev_theta_g: Optional[float] = None

    plan: Optional[BvpSolution] = None
    plan_origin = 0.0
    next_replan = 0.0
    replan_index = 0
    replans: list[ReplanRecord] = []
    plans: list[Optional[BvpSolution]] = []

    cols = {name: [] for name in (
        "u", "phi1", "phi2", "theta_g", "gain_e", "gain_c", "power_e", "power_c")}
    states_out = np.empty((n_samples + 1, 4))

    def control_at(t: float) -> np.ndarray:
        if plan is None:
            return np.zeros(2)
        return plan.interpolate_control(t - plan_origin)

    for i, t in enumerate(sample_times):
        if t < total and t >= next_replan - 1e-9:
            window = min(horizon, total - t) if shrinking_horizon else horizon
            frozen = mission.frozen_problem(t)
            weights_k = mission.weights.with_horizon(window)
            guess = None
            if warm_start and plan is not None:
                guess = (plan.mesh - (t - plan_origin), plan.states, plan.costates)
            t_solve = time.perf_counter()
            try:
                candidate = solve_bvp(
                    frozen,
                    weights_k,
                    UavState.from_vector(state),
                    initial_guess=guess,
                    options=solver_options,
                )
                solve_seconds = time.perf_counter() - t_solve
                adopted = candidate.converged
            except SolverError:
                candidate = None
                solve_seconds = time.perf_counter() - t_solve
                adopted = False
            if adopted:
                plan = candidate
                plan_origin = t
            replans.append(
                ReplanRecord(
                    index=replan_index,
                    time=float(t),
                    converged=bool(candidate.converged) if candidate is not None else False,
                    adopted=adopted,
                    iterations=candidate.iterations if candidate is not None else 0,
                    solve_seconds=solve_seconds,
                    cost=candidate.cost if candidate is not None else math.nan,
                )
            )
            plans.append(plan if adopted else None)
            replan_index += 1
            next_replan += replan_interval

        # beam control and logging at the current sample
        uav = UavState.from_vector(state)
        client_now = mission.client.position(t)
        eaves_now = mission.eavesdropper.position(t)
        phi1 = doppler.advance(t, state[2:4], state[:2], eaves_now)
        beam = apply_beam_control(
            uav, client_now, eaves_now, mission.radio, mission.separation,
            phi1=phi1, previous_theta_g=prev_theta_g,
        )
        prev_theta_g = beam.theta_g
        geom = ArrayGeometry(
            center=PlanarPoint(*state[:2]),
            orientation=beam.theta_g,
            separation=mission.separation,
            wavenumber=mission.radio.wavenumber,
        )
        u = control_at(t)
        gain_e, gain_c, power_e, power_c = _log_sample(mission, t, state, beam, geom)
        states_out[i] = state
        cols["u"].append(u)
        for name, value in (
            ("phi1", beam.phi1), ("phi2", beam.phi2), ("theta_g", beam.theta_g),
            ("gain_e", gain_e), ("gain_c", gain_c), ("power_e", power_e), ("power_c", power_c),
        ):
            cols[name].append(value)

        if i == n_samples:
            break
        # advance one step under the active plan's control
        h = dt
        x = state

        def f(tt, xx):
            return np.concatenate((xx[2:4], control_at(tt)))

        k1 = f(t, x)
        k2 = f(t + 0.5 * h, x + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, x + 0.5 * h * k2)
        k4 = f(t + h, x + h * k3)
        state = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    log = TrajectoryLog(
        t=sample_times,
        states=states_out,
        controls=np.asarray(cols["u"]),
        phi1=np.asarray(cols["phi1"]),
        phi2=np.asarray(cols["phi2"]),
        theta_g=np.asarray(cols["theta_g"]),
        gain_e=np.asarray(cols["gain_e"]),
        gain_c=np.asarray(cols["gain_c"]),
        power_e=np.asarray(cols["power_e"]),
        power_c=np.asarray(cols["power_c"]),
    )
    return SimulationResult(log=log, replans=replans, plans=plans)


def simulate_plan(mission: Mission, dt: float = 0.1,
                  solver_options: Optional[SolverOptions] = None) -> SimulationResult:
    """Solve one plan over the weights' horizon and execute it end to end
    (the degenerate receding-horizon loop)."""
    t_f = mission.weights.t_f
    return receding_horizon(
        mission,
        replan_interval=t_f,
        horizon=t_f,
        total=t_f,
        dt=dt,
        warm_start=False,
        solver_options=solver_options,
    )
