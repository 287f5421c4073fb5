"""Flat parameter-vector layout shared by the compiled and fallback kernels.

The augmented state propagated by the kernels is

    y = [px, py, vx, vy, xi_px, xi_py, xi_vx, xi_vy]

with frozen target positions and weights packed into a (N_PARAMS,) float64
vector so the hot loop never touches Python objects.
"""

from __future__ import annotations

import numpy as np

CLIENT_X = 0
CLIENT_Y = 1
EAVES_X = 2
EAVES_Y = 3
WAVENUMBER = 4
SEPARATION = 5
POWER_MW = 6
A_RUN = 7
QR_XX = 8
QR_XY = 9
QR_YY = 10
R_1 = 11
R_2 = 12
U_BAR = 13
SIGMA_LO = 14
SIGMA_HI = 15
EPS_BSTAR = 16
EPS_DIST_SQ = 17
SAT_SHARPNESS = 18  # <= 0 selects the exact clipped control law

N_PARAMS = 19

STATE_DIM = 8


def pack_params(
    client,
    eavesdropper,
    wavenumber: float,
    separation: float,
    nominal_power: float,
    a_r: float,
    q_r,
    r,
    u_bar: float,
    sigma_lower: float,
    sigma_upper: float,
    eps_bstar: float = 1e-9,
    eps_dist_sq: float = 1e-9,
    sat_sharpness: float = 0.0,
) -> np.ndarray:
    q = np.asarray(q_r, dtype=float)
    r = np.asarray(r, dtype=float)
    out = np.empty(N_PARAMS)
    out[CLIENT_X], out[CLIENT_Y] = float(client[0]), float(client[1])
    out[EAVES_X], out[EAVES_Y] = float(eavesdropper[0]), float(eavesdropper[1])
    out[WAVENUMBER] = wavenumber
    out[SEPARATION] = separation
    out[POWER_MW] = nominal_power
    out[A_RUN] = a_r
    out[QR_XX], out[QR_XY], out[QR_YY] = q[0, 0], q[0, 1], q[1, 1]
    out[R_1], out[R_2] = r[0], r[1]
    out[U_BAR] = u_bar
    out[SIGMA_LO] = sigma_lower
    out[SIGMA_HI] = sigma_upper
    out[EPS_BSTAR] = eps_bstar
    out[EPS_DIST_SQ] = eps_dist_sq
    out[SAT_SHARPNESS] = sat_sharpness
    return out
