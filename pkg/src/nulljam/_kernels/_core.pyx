# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of ``fallback``: RK4 propagation of the augmented
state/costate system with all parameters in a flat float64 vector.

Keep the arithmetic in lockstep with fallback.rhs_batch; the test suite
cross-checks both backends on random states.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport (M_PI, atan2, cos, exp, fabs, log1p, log10, pow, round,
                        sin)

cnp.import_array()

DEF STATE_DIM = 8

# params layout; mirrors params.py
DEF CLIENT_X = 0
DEF CLIENT_Y = 1
DEF EAVES_X = 2
DEF EAVES_Y = 3
DEF WAVENUMBER = 4
DEF SEPARATION = 5
DEF POWER_MW = 6
DEF A_RUN = 7
DEF QR_XX = 8
DEF QR_XY = 9
DEF QR_YY = 10
DEF R_1 = 11
DEF R_2 = 12
DEF U_BAR = 13
DEF SIGMA_LO = 14
DEF SIGMA_HI = 15
DEF EPS_BSTAR = 16
DEF EPS_DIST_SQ = 17
DEF SAT_SHARPNESS = 18

cdef double _TAU = 2.0 * M_PI
cdef double _LN10 = 2.302585092994045684

cdef inline double _wrap(double a) nogil:
    cdef double w = a - round(a / _TAU) * _TAU
    if w <= -M_PI:
        w += _TAU
    return w

cdef inline double _saturate(double w, double u_bar, double sharpness) nogil:
    cdef double m, f
    if sharpness <= 0.0:
        if w > u_bar:
            return u_bar
        if w < -u_bar:
            return -u_bar
        return w
    m = fabs(w) / u_bar
    if m <= 1.0:
        f = m * exp(-log1p(pow(m, sharpness)) / sharpness)
    else:
        f = exp(-log1p(pow(m, -sharpness)) / sharpness)
    if w < 0.0:
        f = -f
    elif w == 0.0:
        f = 0.0
    return u_bar * f

cdef void _rhs(const double* y, const double* q, double* out) nogil:
    cdef double r1 = q[R_1], r2 = q[R_2]
    cdef double ux = _saturate(-y[6] / r1, q[U_BAR], q[SAT_SHARPNESS])
    cdef double uy = _saturate(-y[7] / r2, q[U_BAR], q[SAT_SHARPNESS])

    cdef double dxc = q[CLIENT_X] - y[0]
    cdef double dyc = q[CLIENT_Y] - y[1]
    cdef double dxe = q[EAVES_X] - y[0]
    cdef double dye = q[EAVES_Y] - y[1]
    cdef double rho_c2 = dxc * dxc + dyc * dyc
    cdef double rho_e2 = dxe * dxe + dye * dye

    cdef double half = 0.5 * _wrap(atan2(dyc, dxc) - atan2(dye, dxe))
    cdef double mu = sin(half)

    cdef double kD = q[WAVENUMBER] * q[SEPARATION]
    cdef bint case_one = fabs(mu) < M_PI / (2.0 * kD)
    cdef double bstar
    if case_one:
        bstar = 2.0 - 2.0 * cos(2.0 * kD * mu)
    else:
        bstar = 4.0

    cdef double loss = 1.0 / (4.0 * q[WAVENUMBER] * q[WAVENUMBER] * rho_e2)
    cdef double power = 10.0 * (log10(q[POWER_MW]) + log10(bstar) + log10(loss))
    cdef double gamma = 0.0
    if q[SIGMA_LO] < power and power < q[SIGMA_HI]:
        gamma = 10.0 / _LN10

    cdef double d2 = rho_e2
    if d2 < q[EPS_DIST_SQ]:
        d2 = q[EPS_DIST_SQ]
    cdef double grad_x = 2.0 * dxe / d2
    cdef double grad_y = 2.0 * dye / d2
    cdef double common, breg
    if case_one:
        common = 2.0 * kD * sin(2.0 * kD * mu) * cos(half)
        breg = bstar
        if breg < q[EPS_BSTAR]:
            breg = q[EPS_BSTAR]
        grad_x += common * (dyc / rho_c2 - dye / rho_e2) / breg
        grad_y += common * (-dxc / rho_c2 + dxe / rho_e2) / breg

    cdef double scale = q[A_RUN] * gamma
    out[0] = y[2]
    out[1] = y[3]
    out[2] = ux
    out[3] = uy
    out[4] = scale * grad_x
    out[5] = scale * grad_y
    out[6] = -y[4] - (q[QR_XX] * y[2] + q[QR_XY] * y[3])
    out[7] = -y[5] - (q[QR_XY] * y[2] + q[QR_YY] * y[3])

cdef void _rk4_step(double* y, double h, const double* q) nogil:
    cdef double k1[STATE_DIM]
    cdef double k2[STATE_DIM]
    cdef double k3[STATE_DIM]
    cdef double k4[STATE_DIM]
    cdef double tmp[STATE_DIM]
    cdef int j
    _rhs(y, q, k1)
    for j in range(STATE_DIM):
        tmp[j] = y[j] + 0.5 * h * k1[j]
    _rhs(tmp, q, k2)
    for j in range(STATE_DIM):
        tmp[j] = y[j] + 0.5 * h * k2[j]
    _rhs(tmp, q, k3)
    for j in range(STATE_DIM):
        tmp[j] = y[j] + h * k3[j]
    _rhs(tmp, q, k4)
    for j in range(STATE_DIM):
        y[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


def rhs_batch(y, params):
    """Time derivative of the augmented state for each row of ``y`` (n, 8)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] yy = np.ascontiguousarray(
        np.atleast_2d(np.asarray(y, dtype=np.float64)))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q = np.ascontiguousarray(
        np.asarray(params, dtype=np.float64))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty_like(yy)
    cdef Py_ssize_t i, n = yy.shape[0]
    with nogil:
        for i in range(n):
            _rhs(&yy[i, 0], &q[0], &out[i, 0])
    return out


def propagate(y0, dt, nsteps, params):
    """Integrate each row of ``y0`` (n, 8) forward by ``nsteps[i]`` RK4 steps
    of size ``dt[i]``; returns the final states (n, 8)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] y = np.array(
        np.atleast_2d(np.asarray(y0, dtype=np.float64)), order="C")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] h = np.ascontiguousarray(
        np.asarray(dt, dtype=np.float64))
    cdef cnp.ndarray[cnp.int64_t, ndim=1] m = np.ascontiguousarray(
        np.asarray(nsteps, dtype=np.int64))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q = np.ascontiguousarray(
        np.asarray(params, dtype=np.float64))
    cdef Py_ssize_t i, s, n = y.shape[0]
    with nogil:
        for i in range(n):
            for s in range(m[i]):
                _rk4_step(&y[i, 0], h[i], &q[0])
    return y


def propagate_dense(y0, double dt, long nsteps, params):
    """Integrate one state and record every node; returns (nsteps + 1, 8)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((nsteps + 1, STATE_DIM))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q = np.ascontiguousarray(
        np.asarray(params, dtype=np.float64))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = np.array(
        np.asarray(y0, dtype=np.float64))
    cdef Py_ssize_t i, j
    for j in range(STATE_DIM):
        out[0, j] = y[j]
    with nogil:
        for i in range(nsteps):
            _rk4_step(&y[0], dt, &q[0])
            for j in range(STATE_DIM):
                out[i + 1, j] = y[j]
    return out
