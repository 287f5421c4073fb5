"""Bit-stable emission of trajectory logs, beampattern snapshots and summary
reports.

All files are comma-delimited text (or JSON for summaries) written with
17-significant-digit floats, so a round trip through the file reproduces the
values exactly and repeated runs produce byte-identical files.  Wall-clock
solve times are deliberately kept out of the deterministic outputs and go to
a separate timing file.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ._compat import trapezoid
from .beamforming import BeamControl, far_field_beampattern
from .errors import InvalidInputError
from .geometry import FarFieldGeometry, bearing
from .optimizer import UavState, received_power
from .propagation import sigma
from .simulate import Mission, SimulationResult, TrajectoryLog

TRAJECTORY_COLUMNS = (
    "t", "x_g", "y_g", "vx", "vy", "ux", "uy",
    "phi1", "phi2", "theta_g", "gain_e", "gain_c", "power_e_dbm", "power_c_dbm",
)

DEFAULT_THRESHOLDS = (-100.0, -90.0)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise InvalidInputError(f"cannot write {path}: {exc}") from exc


def write_trajectory(log: TrajectoryLog, path) -> None:
    """Write the trajectory log as CSV with a fixed column order; the client
    power sentinel serializes as the literal token ``-inf``."""
    if len(log) == 0:
        raise InvalidInputError("refusing to write an empty trajectory log")
    rows = [",".join(TRAJECTORY_COLUMNS)]
    table = np.column_stack(
        (
            log.t,
            log.states,
            log.controls,
            log.phi1,
            log.phi2,
            log.theta_g,
            log.gain_e,
            log.gain_c,
            log.power_e,
            log.power_c,
        )
    )
    for row in table:
        rows.append(",".join(_fmt(v) for v in row))
    _atomic_write(Path(path), "\n".join(rows) + "\n")


def read_trajectory(path) -> dict[str, np.ndarray]:
    """Read a trajectory CSV back into column arrays (used by tests and
    external tooling; ``-inf`` round-trips)."""
    with open(path) as handle:
        header = handle.readline().strip().split(",")
        data = np.loadtxt(handle, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


@dataclass(frozen=True)
class SnapshotData:
    """A far-field beampattern sweep over observation angle, with the
    client/eavesdropper directions marked."""

    time: float
    angles: np.ndarray  # sample angles in [0, 2*pi)
    gains: np.ndarray
    theta_c: float
    theta_e: float
    beam: BeamControl
    kD: float


def emit_beampattern_snapshot(
    state: UavState,
    beam: BeamControl,
    client,
    eavesdropper,
    kD: float,
    resolution: int,
    time: float = 0.0,
) -> SnapshotData:
    """Sample the far-field gain of the current beam control at ``resolution``
    uniform observation angles in [0, 2*pi).

    Each sample evaluates the same angle-only pattern used for orientation
    control, with the eavesdropper direction replaced by the sample angle, so
    the null toward the client is visible in the sweep.
    """
    if resolution < 8:
        raise InvalidInputError(f"resolution must be at least 8, got {resolution}")
    theta_c = bearing(state.position, client)
    theta_e = bearing(state.position, eavesdropper)
    angles = np.arange(resolution) * (2.0 * math.pi / resolution)
    gains = np.array(
        [
            far_field_beampattern(FarFieldGeometry.from_bearings(theta_c, a), beam.theta_g, kD)
            for a in angles
        ]
    )
    return SnapshotData(
        time=time, angles=angles, gains=gains,
        theta_c=theta_c, theta_e=theta_e, beam=beam, kD=kD,
    )


def write_snapshot(snapshot: SnapshotData, path) -> None:
    lines = [
        f"# t={_fmt(snapshot.time)}",
        f"# theta_c={_fmt(snapshot.theta_c)}",
        f"# theta_e={_fmt(snapshot.theta_e)}",
        f"# theta_g={_fmt(snapshot.beam.theta_g)}",
        f"# phi1={_fmt(snapshot.beam.phi1)}",
        f"# phi2={_fmt(snapshot.beam.phi2)}",
        f"# kD={_fmt(snapshot.kD)}",
        "angle,gain",
    ]
    for a, g in zip(snapshot.angles, snapshot.gains):
        lines.append(f"{_fmt(a)},{_fmt(g)}")
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def first_crossings(
    t: np.ndarray, power: np.ndarray, thresholds: Sequence[float]
) -> dict[float, float]:
    """First time each threshold is reached, by linear interpolation of the
    power trace (a rise from the -inf sentinel crosses at the first finite
    sample at or above the threshold)."""
    out: dict[float, float] = {}
    for thr in thresholds:
        at_or_above = np.where(power >= thr)[0]
        if at_or_above.size == 0:
            continue
        i = int(at_or_above[0])
        if i == 0 or not np.isfinite(power[i - 1]):
            out[float(thr)] = float(t[i])
        else:
            w = (thr - power[i - 1]) / (power[i] - power[i - 1])
            out[float(thr)] = float(t[i - 1] + w * (t[i] - t[i - 1]))
    return out


@dataclass
class SummaryReport:
    """Headline numbers of one run; everything except the solve times is
    deterministic for a fixed scenario."""

    first_crossing: dict[float, float]
    final_power: float
    total_cost: float
    max_control: float
    max_client_gain: float
    null_ok: bool
    replans_attempted: int
    replans_converged: int
    per_replan_solve_times: list[float] = field(default_factory=list)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "first_crossing_dbm_to_seconds": {
                _fmt(k): v for k, v in sorted(self.first_crossing.items())
            },
            "final_power_dbm": self.final_power,
            "total_cost": self.total_cost,
            "max_control": self.max_control,
            "max_client_gain": self.max_client_gain,
            "null_ok": self.null_ok,
            "replans_attempted": self.replans_attempted,
            "replans_converged": self.replans_converged,
        }
        if include_timing:
            out["per_replan_solve_times"] = self.per_replan_solve_times
        return out


def executed_cost(log: TrajectoryLog, mission: Mission) -> float:
    """Cost of the executed flight with the running jamming term evaluated
    against the actual (possibly moving) target positions."""
    running = 0.5 * np.einsum("ij,j,ij->i", log.controls, mission.weights.r, log.controls)
    v = log.states[:, 2:4]
    running += 0.5 * np.einsum("ij,jk,ik->i", v, mission.weights.q_r, v)
    if mission.weights.a_r != 0.0:
        powers = np.array(
            [
                received_power(log.states[i, :2], mission.frozen_problem(log.t[i]))
                for i in range(len(log))
            ]
        )
        running -= mission.weights.a_r * np.array(
            [sigma(p, mission.activation) for p in powers]
        )
    total = float(trapezoid(running, log.t))
    vf = v[-1]
    total += 0.5 * float(vf @ (mission.weights.q_f @ vf))
    if mission.weights.a_f != 0.0:
        total -= mission.weights.a_f * sigma(
            received_power(log.states[-1, :2], mission.frozen_problem(log.t[-1])),
            mission.activation,
        )
    return total


def summarize(result: SimulationResult, mission: Mission,
              thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
              total_cost: Optional[float] = None) -> SummaryReport:
    log = result.log
    max_gain = log.max_client_gain
    return SummaryReport(
        first_crossing=first_crossings(log.t, log.power_e, thresholds),
        final_power=float(log.power_e[-1]),
        total_cost=executed_cost(log, mission) if total_cost is None else total_cost,
        max_control=float(np.abs(log.controls).max()),
        max_client_gain=max_gain,
        null_ok=bool(max_gain <= 1e-12),
        replans_attempted=len(result.replans),
        replans_converged=sum(1 for r in result.replans if r.converged),
        per_replan_solve_times=[r.solve_seconds for r in result.replans],
    )


def _write_outputs(result: SimulationResult, mission: Mission, out_dir,
                   resolution: int, thresholds: Sequence[float],
                   total_cost: Optional[float] = None) -> SummaryReport:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log = result.log
    write_trajectory(log, out / "trajectory.csv")

    # beampattern snapshots at quarter points of the run
    kD = mission.radio.wavenumber * mission.separation
    n = len(log)
    for j, frac in enumerate((0.0, 0.25, 0.5, 0.75, 1.0)):
        i = min(int(round(frac * (n - 1))), n - 1)
        t_i = float(log.t[i])
        snap = emit_beampattern_snapshot(
            UavState.from_vector(log.states[i]),
            BeamControl(log.phi1[i], log.phi2[i], log.theta_g[i]),
            mission.client.position(t_i),
            mission.eavesdropper.position(t_i),
            kD,
            resolution,
            time=t_i,
        )
        write_snapshot(snap, out / f"snapshot_{j}.csv")

    report = summarize(result, mission, thresholds, total_cost=total_cost)
    _atomic_write(
        out / "summary.json",
        json.dumps(report.to_dict(include_timing=False), indent=2, sort_keys=True) + "\n",
    )
    _atomic_write(
        out / "timing.json",
        json.dumps({"per_replan_solve_times": report.per_replan_solve_times}, indent=2) + "\n",
    )
    return report


def run_plan(scenario, out_dir, dt: float = 0.1, resolution: int = 361,
             thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
             solver_options=None) -> tuple[SummaryReport, SimulationResult]:
    """Solve one plan over the scenario horizon, execute it, and write the
    trajectory log, beampattern snapshots and summary."""
    from .simulate import simulate_plan

    mission = scenario.to_mission()
    result = simulate_plan(mission, dt=dt, solver_options=solver_options)
    plan_cost = next((r.cost for r in result.replans if r.adopted), math.nan)
    report = _write_outputs(result, mission, out_dir, resolution, thresholds,
                            total_cost=plan_cost)
    return report, result


def run_simulate(scenario, replan_interval: float, horizon: float, total: float,
                 out_dir, dt: float = 0.1, resolution: int = 361,
                 thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
                 solver_options=None) -> tuple[SummaryReport, SimulationResult]:
    """Receding-horizon run with outputs; see
    :func:`nulljam.simulate.receding_horizon`."""
    from .simulate import receding_horizon

    mission = scenario.to_mission()
    result = receding_horizon(
        mission,
        replan_interval=replan_interval,
        horizon=horizon,
        total=total,
        dt=dt,
        solver_options=solver_options,
    )
    report = _write_outputs(result, mission, out_dir, resolution, thresholds)
    return report, result
