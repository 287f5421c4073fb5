"""Trajectory cost: trapezoidal quadrature of the running terms plus the
terminal velocity/jamming terms."""

from __future__ import annotations

import numpy as np

from .._compat import trapezoid
from ..errors import InvalidInputError
from ..propagation import sigma
from .adjoint import CostWeights, PlanningProblem, received_power

CONTROL_BOUND_SLACK = 1e-9


def evaluate_cost(
    mesh: np.ndarray,
    states: np.ndarray,
    controls: np.ndarray,
    problem: PlanningProblem,
    weights: CostWeights,
) -> float:
    """Cost of a trajectory sampled on ``mesh`` (seconds), with rows of
    ``states`` as [x, y, vx, vy] and rows of ``controls`` as [ux, uy].

    With the identity activation a node where the target bearings coincide
    exactly contributes sigma(-inf) and the quadrature returns an infinite
    cost; a saturating band keeps every node finite.

    Raises
    ------
    InvalidInputError
        If any control exceeds the actuation bound (beyond roundoff slack).
    """
    t = np.asarray(mesh, dtype=float)
    x = np.asarray(states, dtype=float)
    u = np.asarray(controls, dtype=float)
    if t.ndim != 1 or x.shape != (t.size, 4) or u.shape != (t.size, 2):
        raise InvalidInputError("mesh, states and controls have inconsistent shapes")
    if np.any(np.diff(t) <= 0.0):
        raise InvalidInputError("mesh must be strictly increasing")
    if np.max(np.abs(u)) > weights.u_bar + CONTROL_BOUND_SLACK:
        raise InvalidInputError(
            f"control exceeds the bound: {np.max(np.abs(u))} > {weights.u_bar}"
        )

    v = x[:, 2:4]
    running = 0.5 * np.einsum("ij,j,ij->i", u, weights.r, u)
    running += 0.5 * np.einsum("ij,jk,ik->i", v, weights.q_r, v)
    if weights.a_r != 0.0:
        powers = np.array([received_power(row[:2], problem) for row in x])
        running -= weights.a_r * np.array(
            [sigma(p, problem.activation) for p in powers]
        )
    total = float(trapezoid(running, t))

    vf = v[-1]
    total += 0.5 * float(vf @ (weights.q_f @ vf))
    if weights.a_f != 0.0:
        total -= weights.a_f * sigma(received_power(x[-1, :2], problem), problem.activation)
    return total
