"""Free-space propagation, received jamming power in dBm, and the
service-denial activation function.

A perfect null (zero gain) maps to a power of -inf dBm; that sentinel
compares below any finite level, clamps to the activation floor, and has
zero activation slope, so adjoint flows vanish where the gain vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamforming import optimal_beampattern
from .errors import DegenerateGeometryError, InvalidInputError
from .geometry import FarFieldGeometry, as_xy

LN10 = math.log(10.0)

NULL_POWER_DBM = float("-inf")
"""Sentinel power for a perfect null."""


@dataclass(frozen=True)
class RadioParams:
    """Per-element nominal transmit power (mW) and signal wavenumber (rad/m)."""

    nominal_power: float
    wavenumber: float

    def __post_init__(self):
        if not self.nominal_power > 0.0:
            raise InvalidInputError(f"nominal_power must be positive, got {self.nominal_power}")
        if not self.wavenumber > 0.0:
            raise InvalidInputError(f"wavenumber must be positive, got {self.wavenumber}")


@dataclass(frozen=True)
class ActivationSpec:
    """Saturation band (dBm) of the denial-of-service activation.

    ``sigma`` clamps its argument to [lower, upper]; the identity (no
    clamping) is the infinite band.
    """

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise InvalidInputError(
                f"activation band must satisfy lower < upper, got ({self.lower}, {self.upper})"
            )

    @classmethod
    def identity(cls) -> "ActivationSpec":
        return cls(float("-inf"), float("inf"))

    @property
    def is_identity(self) -> bool:
        return math.isinf(self.lower) and math.isinf(self.upper)


def fspl(distance: float, wavenumber: float) -> float:
    """Free-space path loss 1 / (4 k^2 d^2), dimensionless and strictly
    decreasing in distance.

    Raises
    ------
    DegenerateGeometryError
        If ``distance`` is not positive.
    """
    if not distance > 0.0:
        raise DegenerateGeometryError(f"path loss requires a positive distance, got {distance}")
    kd = wavenumber * distance
    return 1.0 / (4.0 * kd * kd)


def jamming_power_dbm(gain: float, distance: float, radio: RadioParams) -> float:
    """Received jamming power in dBm for a given array gain and range:

        P = 10 log10(P0) + 10 log10(B) + 10 log10(L(d)).

    Zero gain returns :data:`NULL_POWER_DBM`.

    Raises
    ------
    InvalidInputError
        If ``gain`` is negative.
    """
    if gain < 0.0:
        raise InvalidInputError(f"gain must be nonnegative, got {gain}")
    if gain == 0.0:
        return NULL_POWER_DBM
    loss = fspl(distance, radio.wavenumber)
    return 10.0 * (math.log10(radio.nominal_power) + math.log10(gain) + math.log10(loss))


def optimal_power_dbm(eavesdropper, uav, ff: FarFieldGeometry, radio: RadioParams, kD: float) -> float:
    """Received power at the eavesdropper with the orientation-optimal
    far-field gain substituted.

    Raises
    ------
    DegenerateGeometryError
        If the UAV coincides with the eavesdropper.
    """
    offset = as_xy(eavesdropper) - as_xy(uav)
    distance = float(np.hypot(*offset))
    if distance == 0.0:
        raise DegenerateGeometryError("UAV coincides with the eavesdropper")
    return jamming_power_dbm(optimal_beampattern(ff, kD), distance, radio)


def sigma(x: float, spec: ActivationSpec) -> float:
    """Clamp ``x`` to the activation band; identity inside."""
    if x < spec.lower:
        return spec.lower
    if x > spec.upper:
        return spec.upper
    return x


def sigma_prime(x: float, spec: ActivationSpec) -> float:
    """Slope of :func:`sigma`: one strictly inside the band, zero outside
    and at the breakpoints (the zero subgradient keeps adjoint flows inert
    wherever the band saturates)."""
    return 1.0 if spec.lower < x < spec.upper else 0.0
