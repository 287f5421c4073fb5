"""Two-point boundary-value solver for the jamming trajectory problem.

Multiple shooting on the augmented state/costate system with damped Newton
iterations on the concatenated defect vector.  RK4 propagates each shooting
segment (through the compiled kernel when available); the control law is
smoothed during early Newton stages and verified against the exact clipped
law at the end.  Internally everything is nondimensionalized (positions by
1 km, time by the horizon) for Newton conditioning; all interfaces stay SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from .._kernels import params as kparams
from ..errors import SolverError
from .adjoint import Costate, CostWeights, PlanningProblem, UavState
from .cost import evaluate_cost

POSITION_SCALE = 1e3  # meters per internal length unit


@dataclass(frozen=True)
class SolverOptions:
    segments: int = 25
    substeps: int = 8  # RK4 steps per segment; segments*substeps + 1 mesh nodes
    tol: float = 1e-6  # defect tolerance, nondimensionalized per-component
    max_iterations: int = 200
    fd_step: float = 1e-7
    sat_sharpness: tuple = (16.0, 128.0, 0.0)  # smoothing stages; 0 = exact law
    refine_threshold: float = 10.0  # x tol of segment truncation error triggers bisection
    max_refinements: int = 2
    max_step: float = 50.0  # cap on the Newton step inf-norm (scaled units)


@dataclass
class BvpSolution:
    """Solved trajectory on a strictly increasing mesh covering [0, t_f]."""

    mesh: np.ndarray  # (N,) seconds
    states: np.ndarray  # (N, 4) [x, y, vx, vy]
    costates: np.ndarray  # (N, 4) [xi_px, xi_py, xi_vx, xi_vy]
    controls: np.ndarray  # (N, 2)
    cost: float
    max_defect: float
    converged: bool
    iterations: int
    problem: PlanningProblem
    weights: CostWeights

    def state(self, i: int) -> UavState:
        return UavState.from_vector(self.states[i])

    def costate(self, i: int) -> Costate:
        return Costate.from_vector(self.costates[i])

    def interpolate_control(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.stack(
            [np.interp(t, self.mesh, self.controls[:, j]) for j in range(2)], axis=-1
        )
        return out

    def interpolate_state(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack(
            [np.interp(t, self.mesh, self.states[:, j]) for j in range(4)], axis=-1
        )


def _min_jerk_guess(p0, v0, target, t_nodes, t_f):
    """Quintic from (p0, v0, zero accel) to rest at ``target``: position,
    velocity, acceleration and jerk at the requested nodes."""
    pos, vel, acc, jerk = (np.zeros((t_nodes.size, 2)) for _ in range(4))
    for axis in range(2):
        a = np.zeros((6, 6))
        b = np.array([p0[axis], v0[axis], 0.0, target[axis], 0.0, 0.0])
        a[0, 0] = 1.0
        a[1, 1] = 1.0
        a[2, 2] = 2.0
        a[3] = [t_f**j for j in range(6)]
        a[4] = [j * t_f ** (j - 1) if j >= 1 else 0.0 for j in range(6)]
        a[5] = [j * (j - 1) * t_f ** (j - 2) if j >= 2 else 0.0 for j in range(6)]
        c = np.linalg.solve(a, b)[::-1]
        pos[:, axis] = np.polyval(c, t_nodes)
        vel[:, axis] = np.polyval(np.polyder(c), t_nodes)
        acc[:, axis] = np.polyval(np.polyder(c, 2), t_nodes)
        jerk[:, axis] = np.polyval(np.polyder(c, 3), t_nodes)
    return pos, vel, acc, jerk


def _candidate_targets(p0, problem: PlanningProblem, weights: CostWeights) -> list[np.ndarray]:
    """Initialization targets: the client/eavesdropper midpoint plus two
    perpendicular offsets, pulled toward the start until the quintic stays
    within the actuation bound.

    The straight midpoint path can lie exactly on a symmetry axis of the
    geometry where the angular-separation gradient vanishes (Newton then
    settles on an axis-bound stationary solution), so symmetric detours are
    always tried and the cheapest converged solution wins.
    """
    midpoint = 0.5 * (problem.client + problem.eavesdropper)
    leg = midpoint - p0
    leg_len = float(np.hypot(*leg))
    baseline = float(np.hypot(*(problem.eavesdropper - problem.client)))
    if leg_len > 1e-9:
        direction = leg / leg_len
    else:
        direction = (problem.eavesdropper - problem.client) / max(baseline, 1e-9)
    perp = np.array((-direction[1], direction[0]))
    offset = 0.25 * max(leg_len, 0.5 * baseline)
    # rest-to-rest quintic peak acceleration is ~5.774 d / t_f^2; keep the
    # guesses clearly inside the actuation bound
    reach = 0.6 * weights.u_bar * weights.t_f**2 / 5.7735
    targets = [midpoint, midpoint + offset * perp, midpoint - offset * perp]
    clamped = []
    for target in targets:
        span = target - p0
        span_len = float(np.hypot(*span))
        if span_len > reach:
            target = p0 + span * (reach / span_len)
        clamped.append(target)
    return clamped


def _scaled_params(problem: PlanningProblem, weights: CostWeights, sharpness: float) -> np.ndarray:
    s, t_f = POSITION_SCALE, weights.t_f
    return kparams.pack_params(
        client=problem.client / s,
        eavesdropper=problem.eavesdropper / s,
        wavenumber=problem.radio.wavenumber * s,
        separation=problem.separation / s,
        nominal_power=problem.radio.nominal_power,
        a_r=weights.a_r * t_f,
        q_r=weights.q_r * (s * s / t_f),
        r=weights.r * (s * s / t_f**3),
        u_bar=weights.u_bar * t_f * t_f / s,
        sigma_lower=problem.activation.lower,
        sigma_upper=problem.activation.upper,
        eps_bstar=problem.reg_eps,
        eps_dist_sq=problem.reg_eps / (s * s),
        sat_sharpness=sharpness,
    )


class _ShootingSystem:
    """Residual/Jacobian assembly on the scaled problem."""

    def __init__(self, problem, weights, x0_scaled, options):
        self.opts = options
        self.n_seg = options.segments
        self.x0 = x0_scaled
        self.seg_steps = np.full(self.n_seg, options.substeps, dtype=np.int64)
        bounds = np.linspace(0.0, 1.0, self.n_seg + 1)
        self.seg_t0 = bounds[:-1]
        self.seg_dt = np.diff(bounds) / self.seg_steps
        self.params = _scaled_params(problem, weights, 0.0)
        # terminal bracket reuses the kernel flow with a_r := 1 so the
        # transversality math cannot drift from the flow math
        self.params_unit = self.params.copy()
        self.params_unit[kparams.A_RUN] = 1.0
        s, t_f = POSITION_SCALE, weights.t_f
        self.qf_scaled = weights.q_f * (s * s / (t_f * t_f))
        self.af_scaled = weights.a_f

    def set_sharpness(self, sharpness: float) -> None:
        self.params[kparams.SAT_SHARPNESS] = sharpness
        self.params_unit[kparams.SAT_SHARPNESS] = sharpness

    def terminal_costate(self, z_end: np.ndarray) -> np.ndarray:
        flow = _kernels.rhs_batch(z_end[np.newaxis, :], self.params_unit)[0]
        xi_p = -self.af_scaled * flow[4:6]
        xi_v = self.qf_scaled @ z_end[2:4]
        return np.concatenate((xi_p, xi_v))

    def shoot(self, z: np.ndarray) -> np.ndarray:
        """Propagate every segment start in ``z`` (n_seg, 8) to its end."""
        return _kernels.propagate(z, self.seg_dt, self.seg_steps, self.params)

    def residual(self, z: np.ndarray, phi: np.ndarray | None = None) -> np.ndarray:
        if phi is None:
            phi = self.shoot(z[:-1])
        f = np.empty(8 * (self.n_seg + 1))
        f[0:4] = z[0, 0:4] - self.x0
        f[4 : 4 + 8 * self.n_seg] = (phi - z[1:]).ravel()
        f[-4:] = z[-1, 4:8] - self.terminal_costate(z[-1])
        return f

    def jacobian(self, z: np.ndarray, phi: np.ndarray) -> np.ndarray:
        n_seg, opts = self.n_seg, self.opts
        dim = 8 * (n_seg + 1)
        jac = np.zeros((dim, dim))
        jac[0:4, 0:4] = np.eye(4)

        steps = opts.fd_step * np.maximum(1.0, np.abs(z[:-1]))  # (n_seg, 8)
        pert = np.repeat(z[:-1], 8, axis=0)
        cols = np.tile(np.arange(8), n_seg)
        pert[np.arange(8 * n_seg), cols] += steps.ravel()
        phi_pert = _kernels.propagate(
            pert,
            np.repeat(self.seg_dt, 8),
            np.repeat(self.seg_steps, 8),
            self.params,
        )
        dphi = (phi_pert - np.repeat(phi, 8, axis=0)) / steps.ravel()[:, np.newaxis]
        for i in range(n_seg):
            rows = slice(4 + 8 * i, 4 + 8 * (i + 1))
            jac[rows, 8 * i : 8 * (i + 1)] = dphi[8 * i : 8 * (i + 1)].T
            jac[rows, 8 * (i + 1) : 8 * (i + 2)] = -np.eye(8)

        z_end = z[-1]
        r0 = z_end[4:8] - self.terminal_costate(z_end)
        h_end = opts.fd_step * np.maximum(1.0, np.abs(z_end))
        for j in range(8):
            zp = z_end.copy()
            zp[j] += h_end[j]
            rj = zp[4:8] - self.terminal_costate(zp)
            jac[-4:, 8 * n_seg + j] = (rj - r0) / h_end[j]
        return jac

    def segment_truncation_error(self, z: np.ndarray) -> np.ndarray:
        """Richardson estimate: compare each segment end against a re-shoot
        with doubled substeps."""
        coarse = self.shoot(z[:-1])
        fine = _kernels.propagate(
            z[:-1], self.seg_dt / 2.0, self.seg_steps * 2, self.params
        )
        return np.max(np.abs(fine - coarse), axis=1)

    def refine(self, mask: np.ndarray) -> None:
        self.seg_dt = np.where(mask, self.seg_dt / 2.0, self.seg_dt)
        self.seg_steps = np.where(mask, self.seg_steps * 2, self.seg_steps)

    def dense_output(self, z: np.ndarray):
        """Mesh times (scaled) and augmented states at every RK4 node."""
        times = [np.array([0.0])]
        rows = [z[0][np.newaxis, :]]
        for i in range(self.n_seg):
            path = _kernels.propagate_dense(
                z[i], float(self.seg_dt[i]), int(self.seg_steps[i]), self.params
            )
            t_local = self.seg_t0[i] + float(self.seg_dt[i]) * np.arange(
                1, self.seg_steps[i] + 1
            )
            times.append(t_local)
            rows.append(path[1:])
        return np.concatenate(times), np.vstack(rows)


def _newton(system: _ShootingSystem, z: np.ndarray, tol: float, budget: int):
    """Damped Newton on the shooting defects; returns (z, defect, converged,
    iterations used)."""
    used = 0
    phi = system.shoot(z[:-1])
    f = system.residual(z, phi)
    fnorm = float(np.max(np.abs(f)))
    while fnorm > tol and used < budget:
        jac = system.jacobian(z, phi)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        step = step.reshape(z.shape)
        step_norm = float(np.max(np.abs(step)))
        alpha = 1.0 if step_norm <= system.opts.max_step else system.opts.max_step / step_norm
        improved = False
        merit = float(np.linalg.norm(f))
        while alpha > 1e-12:
            z_try = z + alpha * step
            phi_try = system.shoot(z_try[:-1])
            f_try = system.residual(z_try, phi_try)
            if np.all(np.isfinite(f_try)) and float(np.linalg.norm(f_try)) < merit * (
                1.0 - 1e-4 * alpha
            ):
                z, phi, f = z_try, phi_try, f_try
                improved = True
                break
            alpha *= 0.5
        used += 1
        fnorm = float(np.max(np.abs(f)))
        if not improved:
            break
    return z, fnorm, fnorm <= tol, used


def solve_bvp(
    problem: PlanningProblem,
    weights: CostWeights,
    initial: UavState,
    initial_guess: BvpSolution | tuple | None = None,
    options: SolverOptions | None = None,
) -> BvpSolution:
    """Solve the optimality system: state dynamics, costate flows, saturated
    control law and transversality conditions.

    ``initial_guess`` may be a previous :class:`BvpSolution` or a
    ``(times, states, costates)`` triple (used for warm starts).  Without
    one, the solver multi-starts from a zero-control coast and minimum-jerk
    paths toward the client/eavesdropper midpoint and two perpendicular
    detours, keeping the cheapest converged solution.  Non-convergence
    returns the best iterate with ``converged=False``.
    """
    opts = options or SolverOptions()
    s, t_f = POSITION_SCALE, weights.t_f
    p0 = initial.position
    if np.array_equal(p0, problem.client) or np.array_equal(p0, problem.eavesdropper):
        raise SolverError("initial UAV position coincides with a target")

    x0_scaled = np.concatenate((p0 / s, initial.velocity * (t_f / s)))
    system = _ShootingSystem(problem, weights, x0_scaled, opts)
    n_nodes = opts.segments + 1
    tau = np.linspace(0.0, 1.0, n_nodes)

    def scale_guess(g_t, g_x, g_c):
        z = np.empty((n_nodes, 8))
        t_nodes = tau * t_f
        for j in range(2):
            z[:, j] = np.interp(t_nodes, g_t, g_x[:, j]) / s
            z[:, 2 + j] = np.interp(t_nodes, g_t, g_x[:, 2 + j]) * (t_f / s)
            z[:, 4 + j] = np.interp(t_nodes, g_t, g_c[:, j]) * s
            z[:, 6 + j] = np.interp(t_nodes, g_t, g_c[:, 2 + j]) * (s / t_f)
        z[0, 0:4] = x0_scaled
        return z

    starts = []
    if initial_guess is None:
        # zero-control coast: dynamically exact, robust for short horizons
        # and fast starts (the quintic guesses below would demand saturated
        # braking there)
        t_nodes = tau * t_f
        coast_pos = p0[np.newaxis, :] + np.outer(t_nodes, initial.velocity)
        coast_vel = np.tile(initial.velocity, (n_nodes, 1))
        coast_xi_p = np.tile(-(weights.q_r @ initial.velocity), (n_nodes, 1))
        starts.append(
            scale_guess(
                t_nodes,
                np.hstack((coast_pos, coast_vel)),
                np.hstack((coast_xi_p, np.zeros((n_nodes, 2)))),
            )
        )
        # minimum-jerk paths with costates consistent with the guess control
        # (xi_v = -R u, xi_p = R u_dot - Q_r v), so the first Newton
        # linearization already sees a flying trajectory
        for target in _candidate_targets(p0, problem, weights):
            pos, vel, acc, jerk = _min_jerk_guess(p0, initial.velocity, target, t_nodes, t_f)
            xi_v = -acc * weights.r
            xi_p = jerk * weights.r - vel @ weights.q_r.T
            starts.append(scale_guess(t_nodes, np.hstack((pos, vel)), np.hstack((xi_p, xi_v))))
    else:
        if isinstance(initial_guess, BvpSolution):
            g_t, g_x, g_c = initial_guess.mesh, initial_guess.states, initial_guess.costates
        else:
            g_t, g_x, g_c = (np.asarray(a, dtype=float) for a in initial_guess)
        starts.append(scale_guess(g_t, g_x, g_c))

    def run_stages(z0):
        # converged means: the *final* stage (exact control law) met the
        # defect tolerance, never an intermediate smoothed stage
        stages = list(opts.sat_sharpness) or [0.0]
        z, defect, used_total = z0, math.inf, 0
        converged = False
        for idx, sharpness in enumerate(stages):
            system.set_sharpness(sharpness)
            final = idx == len(stages) - 1
            stage_tol = opts.tol if final else max(opts.tol, 1e-5)
            z, defect, stage_ok, used = _newton(
                system, z, stage_tol, opts.max_iterations - used_total
            )
            used_total += used
            if final:
                converged = stage_ok
            if used_total >= opts.max_iterations or (not stage_ok and final):
                break
        if not converged:
            # report the defect against the exact law even on failure
            system.set_sharpness(stages[-1])
            defect = float(np.max(np.abs(system.residual(z))))
        return z, defect, converged, used_total

    def finalize(z, defect, converged, iterations):
        tau_mesh, y = system.dense_output(z)
        mesh = tau_mesh * t_f
        states = np.empty((y.shape[0], 4))
        states[:, 0:2] = y[:, 0:2] * s
        states[:, 2:4] = y[:, 2:4] * (s / t_f)
        costates = np.empty_like(states)
        costates[:, 0:2] = y[:, 4:6] / s
        costates[:, 2:4] = y[:, 6:8] * (t_f / s)
        # re-apply the exact control law to the unscaled costates so the
        # stored controls are reproducible from the stored costates bit for bit
        controls = np.stack(
            [
                np.clip(-costates[:, 2] / weights.r[0], -weights.u_bar, weights.u_bar),
                np.clip(-costates[:, 3] / weights.r[1], -weights.u_bar, weights.u_bar),
            ],
            axis=1,
        )
        cost = evaluate_cost(mesh, states, controls, problem, weights)
        return BvpSolution(
            mesh=mesh,
            states=states,
            costates=costates,
            controls=controls,
            cost=cost,
            max_defect=defect,
            converged=converged,
            iterations=iterations,
            problem=problem,
            weights=weights,
        )

    best = None
    for z0 in starts:
        z_c, defect_c, conv_c, used_c = run_stages(z0)
        sol_c = finalize(z_c, defect_c, conv_c, used_c)
        key = (0, sol_c.cost) if conv_c else (1, defect_c)
        if best is None or key < best[0]:
            best = (key, z_c, sol_c)
    _, z, solution = best
    converged, iterations = solution.converged, solution.iterations

    # bisect segments whose RK4 truncation error dominates the defect budget
    system.set_sharpness(opts.sat_sharpness[-1] if opts.sat_sharpness else 0.0)
    refined = False
    refinements = 0
    while converged and refinements < opts.max_refinements:
        err = system.segment_truncation_error(z)
        mask = err > opts.refine_threshold * opts.tol
        if not mask.any():
            break
        system.refine(mask)
        z, defect, converged, used = _newton(
            system, z, opts.tol, max(opts.max_iterations - iterations, 10)
        )
        iterations += used
        refinements += 1
        refined = True
        solution = None  # stale after mesh change

    if refined or solution is None:
        solution = finalize(z, defect, converged, iterations)
    return solution
