"""Two-element beampattern evaluation, client null steering and optimal
array orientation.

The exact beampattern is the magnitude-squared sum of the two element
phasors,

    B(p) = |exp(j(k d1(p) + phi1)) + exp(j(k d2(p) + phi2))|^2
         = 2 + 2 cos(k (d1(p) - d2(p)) + phi1 - phi2),

bounded in [0, 4].  Null steering picks phi2 so the phasors cancel exactly
at the client; orientation control maximizes the far-field gain toward the
eavesdropper.  Exact element distances are used for nulling, the angle-only
far-field form for orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._compat import trapezoid
from .errors import DegenerateGeometryError, InvalidInputError
from .geometry import ArrayGeometry, FarFieldGeometry, as_xy, wrap_angle


@dataclass(frozen=True)
class BeamControl:
    """Per-instant antenna commands: element phases and array orientation.

    Angles are stored wrapped to (-pi, pi]; accumulators that need unwrapped
    phases keep their own state and wrap only when constructing one of these.
    """

    phi1: float
    phi2: float
    theta_g: float

    @classmethod
    def wrapped(cls, phi1: float, phi2: float, theta_g: float) -> "BeamControl":
        return cls(wrap_angle(phi1), wrap_angle(phi2), wrap_angle(theta_g))


def beampattern(point, geom: ArrayGeometry, phi1: float, phi2: float) -> float:
    """Exact directional gain of the two-element array at ``point``.

    Returns a dimensionless value in [0, 4].

    Raises
    ------
    DegenerateGeometryError
        If ``point`` coincides with either element.
    """
    d1, d2 = geom.element_distances(point)
    return 2.0 + 2.0 * math.cos(geom.wavenumber * (d1 - d2) + phi1 - phi2)


def nulling_phase(phi1: float, client, geom: ArrayGeometry) -> float:
    """Phase for element 2 that cancels the array output at the client.

        phi2 = phi1 + pi + k (d1(p_c) - d2(p_c))

    The returned value is unwrapped; :func:`beampattern` evaluated at the
    client with (phi1, phi2) is zero to floating-point roundoff.
    """
    d1, d2 = geom.element_distances(client)
    return phi1 + math.pi + geom.wavenumber * (d1 - d2)


def doppler_phase(
    samples: Sequence[tuple[float, Sequence[float], Sequence[float]]],
    eavesdropper,
    wavenumber: float,
) -> float:
    """Phase offset compensating the motion-induced frequency shift seen at
    the eavesdropper.

    ``samples`` is a time-ordered sequence of (t, velocity, uav_position);
    the running integral

        phi1(t) = -int_0^t k v^T (p_e - p_g) / ||p_e - p_g|| dtau

    is evaluated with the trapezoidal rule over the samples and returned at
    the final sample time.

    Raises
    ------
    InvalidInputError
        If timestamps are not strictly increasing.
    DegenerateGeometryError
        If the UAV coincides with the eavesdropper at any sample.
    """
    pe = as_xy(eavesdropper)
    times = []
    rates = []
    for t, vel, pos, *_ in samples:
        v = np.asarray(vel, dtype=float)
        p = as_xy(pos)
        offset = pe - p
        dist = float(np.hypot(*offset))
        if dist == 0.0:
            raise DegenerateGeometryError("UAV coincides with the eavesdropper")
        times.append(float(t))
        rates.append(wavenumber * float(v @ offset) / dist)
    times_arr = np.asarray(times)
    if len(times_arr) > 1 and not np.all(np.diff(times_arr) > 0.0):
        raise InvalidInputError("sample timestamps must be strictly increasing")
    if len(times_arr) < 2:
        return 0.0
    return -float(trapezoid(np.asarray(rates), times_arr))


def far_field_beampattern(ff: FarFieldGeometry, theta_g: float, kD: float) -> float:
    """Angle-only beampattern toward the eavesdropper direction with the
    client-nulling phases substituted:

        B = 2 - 2 cos(2 kD mu sin(midline - theta_g)),  mu = sin((theta_c - theta_e)/2).

    Valid in the far field (range >> 2 D^2 / lambda); value in [0, 4].
    """
    if not kD > 0.0:
        raise InvalidInputError(f"kD must be positive, got {kD}")
    return 2.0 - 2.0 * math.cos(2.0 * kD * ff.mu * math.sin(ff.midline - theta_g))


def optimal_orientation(
    ff: FarFieldGeometry, kD: float, previous_theta_g: Optional[float] = None
) -> float:
    """Globally optimal array orientation for the far-field gain toward the
    eavesdropper.

    Two symmetric maximizers exist on either side of the client/eavesdropper
    midline.  When ``previous_theta_g`` is given the closer branch (wrapped
    angular distance) is returned, which keeps the commanded angle continuous
    along a trajectory; otherwise the "+" branch.
    """
    if not kD > 0.0:
        raise InvalidInputError(f"kD must be positive, got {kD}")
    threshold = math.pi / (2.0 * kD)
    amu = abs(ff.mu)
    if amu < threshold:
        offset = 0.5 * math.pi
    else:
        offset = math.asin(threshold / amu)
    plus = wrap_angle(ff.midline + offset)
    minus = wrap_angle(ff.midline - offset)
    if previous_theta_g is None:
        return plus
    if abs(wrap_angle(minus - previous_theta_g)) < abs(wrap_angle(plus - previous_theta_g)):
        return minus
    return plus


def optimal_beampattern(ff: FarFieldGeometry, kD: float) -> float:
    """Far-field gain toward the eavesdropper at the optimal orientation.

    Equals 2 - 2 cos(2 kD mu) while the half-angle separation is too small
    for full constructive interference (|mu| < pi / (2 kD)) and exactly 4
    beyond; the two expressions agree at the switch.
    """
    if not kD > 0.0:
        raise InvalidInputError(f"kD must be positive, got {kD}")
    if abs(ff.mu) < math.pi / (2.0 * kD):
        return 2.0 - 2.0 * math.cos(2.0 * kD * ff.mu)
    return 4.0
