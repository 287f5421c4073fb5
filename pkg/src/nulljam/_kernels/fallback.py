"""Pure-numpy implementation of the propagation kernels.

Selected at import when the compiled extension is unavailable (or when
NULLJAM_PURE_PYTHON is set).  Semantics match ``_core`` to floating-point
roundoff; the batched layout exists because the shooting solver evaluates
many independent initial conditions per Newton iteration.
"""

from __future__ import annotations

import math

import numpy as np

from . import params as P

_TAU = 2.0 * math.pi
_LN10 = math.log(10.0)


def _wrap(a: np.ndarray) -> np.ndarray:
    w = a - np.round(a / _TAU) * _TAU
    return np.where(w <= -math.pi, w + _TAU, w)


def _saturate(w: np.ndarray, u_bar: float, sharpness: float) -> np.ndarray:
    """Clipped control, optionally smoothed with a soft clip of the given
    sharpness (exact clip when sharpness <= 0)."""
    if sharpness <= 0.0:
        return np.clip(w, -u_bar, u_bar)
    m = np.abs(w) / u_bar
    f = np.empty_like(m)
    inner = m <= 1.0
    mi = m[inner]
    f[inner] = mi * np.exp(-np.log1p(mi**sharpness) / sharpness)
    mo = m[~inner]
    f[~inner] = np.exp(-np.log1p(mo**-sharpness) / sharpness)
    return np.sign(w) * u_bar * f


def rhs_batch(y: np.ndarray, params: np.ndarray) -> np.ndarray:
    """Time derivative of the augmented state for each row of ``y`` (n, 8)."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    out = np.empty_like(y)

    r = np.array((params[P.R_1], params[P.R_2]))
    u = _saturate(-y[:, 6:8] / r, params[P.U_BAR], params[P.SAT_SHARPNESS])

    dxc = params[P.CLIENT_X] - y[:, 0]
    dyc = params[P.CLIENT_Y] - y[:, 1]
    dxe = params[P.EAVES_X] - y[:, 0]
    dye = params[P.EAVES_Y] - y[:, 1]
    rho_c2 = dxc * dxc + dyc * dyc
    rho_e2 = dxe * dxe + dye * dye

    theta_c = np.arctan2(dyc, dxc)
    theta_e = np.arctan2(dye, dxe)
    half = 0.5 * _wrap(theta_c - theta_e)
    mu = np.sin(half)

    kD = params[P.WAVENUMBER] * params[P.SEPARATION]
    case_one = np.abs(mu) < math.pi / (2.0 * kD)
    bstar = np.where(case_one, 2.0 - 2.0 * np.cos(2.0 * kD * mu), 4.0)

    with np.errstate(divide="ignore"):
        loss = 1.0 / (4.0 * params[P.WAVENUMBER] ** 2 * rho_e2)
        power = 10.0 * (
            math.log10(params[P.POWER_MW]) + np.log10(bstar) + np.log10(loss)
        )
    active = (params[P.SIGMA_LO] < power) & (power < params[P.SIGMA_HI])
    gamma = np.where(active, 10.0 / _LN10, 0.0)

    grad_x = 2.0 * dxe / np.maximum(rho_e2, params[P.EPS_DIST_SQ])
    grad_y = 2.0 * dye / np.maximum(rho_e2, params[P.EPS_DIST_SQ])
    common = 2.0 * kD * np.sin(2.0 * kD * mu) * np.cos(half)
    breg = np.maximum(bstar, params[P.EPS_BSTAR])
    with np.errstate(divide="ignore", invalid="ignore"):
        bx = common * (dyc / rho_c2 - dye / rho_e2) / breg
        by = common * (-dxc / rho_c2 + dxe / rho_e2) / breg
    grad_x = grad_x + np.where(case_one, bx, 0.0)
    grad_y = grad_y + np.where(case_one, by, 0.0)

    scale = params[P.A_RUN] * gamma
    out[:, 0] = y[:, 2]
    out[:, 1] = y[:, 3]
    out[:, 2] = u[:, 0]
    out[:, 3] = u[:, 1]
    out[:, 4] = scale * grad_x
    out[:, 5] = scale * grad_y
    out[:, 6] = -y[:, 4] - (params[P.QR_XX] * y[:, 2] + params[P.QR_XY] * y[:, 3])
    out[:, 7] = -y[:, 5] - (params[P.QR_XY] * y[:, 2] + params[P.QR_YY] * y[:, 3])
    return out


def _rk4_step(y: np.ndarray, h, params: np.ndarray) -> np.ndarray:
    hcol = np.asarray(h, dtype=float).reshape(-1, 1)
    k1 = rhs_batch(y, params)
    k2 = rhs_batch(y + 0.5 * hcol * k1, params)
    k3 = rhs_batch(y + 0.5 * hcol * k2, params)
    k4 = rhs_batch(y + hcol * k3, params)
    return y + (hcol / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagate(
    y0: np.ndarray, dt: np.ndarray, nsteps: np.ndarray, params: np.ndarray
) -> np.ndarray:
    """Integrate each row of ``y0`` (n, 8) forward by ``nsteps[i]`` RK4 steps
    of size ``dt[i]``; returns the final states (n, 8)."""
    y = np.array(np.atleast_2d(y0), dtype=float)
    dt = np.asarray(dt, dtype=float)
    nsteps = np.asarray(nsteps, dtype=np.int64)
    for step in range(int(nsteps.max(initial=0))):
        active = nsteps > step
        if active.all():
            y = _rk4_step(y, dt, params)
        else:
            y[active] = _rk4_step(y[active], dt[active], params)
    return y


def propagate_dense(y0: np.ndarray, dt: float, nsteps: int, params: np.ndarray) -> np.ndarray:
    """Integrate one state and record every node; returns (nsteps + 1, 8)."""
    out = np.empty((nsteps + 1, P.STATE_DIM))
    out[0] = np.asarray(y0, dtype=float)
    y = out[0][np.newaxis, :].copy()
    h = np.array([dt])
    for i in range(nsteps):
        y = _rk4_step(y, h, params)
        out[i + 1] = y[0]
    return out
