"""Planar geometry for a two-element antenna array.

Positions are meters in a fixed ground frame, angles are radians measured
counterclockwise from the +x axis and reported in the principal interval
(-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InvalidInputError

TAU = 2.0 * math.pi


def as_xy(point) -> np.ndarray:
    """Coerce a point-like object (PlanarPoint, tuple, ndarray) to a float
    (2,) array, rejecting non-finite components."""
    if isinstance(point, PlanarPoint):
        xy = np.array((point.x, point.y), dtype=float)
    else:
        xy = np.asarray(point, dtype=float)
        if xy.shape != (2,):
            raise InvalidInputError(f"expected a planar point, got shape {xy.shape}")
    if not np.all(np.isfinite(xy)):
        raise InvalidInputError(f"point has non-finite components: {xy}")
    return xy


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi].

    Uses the exact IEEE remainder, so wrapping a large unwrapped phase does
    not lose precision beyond the representation of 2*pi itself.
    """
    w = math.remainder(angle, TAU)
    return math.pi if w <= -math.pi else w


def wrap_angles(angles: np.ndarray) -> np.ndarray:
    """Vectorized :func:`wrap_angle`."""
    a = np.asarray(angles, dtype=float)
    w = a - np.round(a / TAU) * TAU
    return np.where(w <= -math.pi, w + TAU, w)


@dataclass(frozen=True)
class PlanarPoint:
    """A point in the ground plane, meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError(f"PlanarPoint components must be finite: ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array((self.x, self.y), dtype=float)


def bearing(origin, target) -> float:
    """Two-argument arctangent of (target - origin), in (-pi, pi].

    Raises
    ------
    DegenerateGeometryError
        If the points coincide.
    """
    o = as_xy(origin)
    t = as_xy(target)
    dx, dy = t[0] - o[0], t[1] - o[1]
    if dx == 0.0 and dy == 0.0:
        raise DegenerateGeometryError(f"bearing undefined for coincident points at {tuple(o)}")
    angle = math.atan2(dy, dx)
    # atan2 maps a negative-zero dy to -pi; keep the principal interval
    return math.pi if angle == -math.pi else angle


@dataclass(frozen=True)
class ArrayGeometry:
    """A rigid two-element array: center position, boresight-normal angle of
    the element axis, element separation and signal wavenumber.

    The element positions are derived, never stored, so their spacing equals
    ``separation`` by construction.
    """

    center: PlanarPoint
    orientation: float  # radians, angle of the axis from element 1 to element 2
    separation: float  # meters, > 0
    wavenumber: float  # rad/m, 2*pi/wavelength, > 0

    def __post_init__(self):
        if not self.separation > 0.0:
            raise InvalidInputError(f"separation must be positive, got {self.separation}")
        if not self.wavenumber > 0.0:
            raise InvalidInputError(f"wavenumber must be positive, got {self.wavenumber}")
        if not math.isfinite(self.orientation):
            raise InvalidInputError("orientation must be finite")

    @property
    def axis(self) -> np.ndarray:
        """Unit vector from element 1 toward element 2."""
        return np.array((math.cos(self.orientation), math.sin(self.orientation)))

    @property
    def element_1(self) -> np.ndarray:
        return as_xy(self.center) - 0.5 * self.separation * self.axis

    @property
    def element_2(self) -> np.ndarray:
        return as_xy(self.center) + 0.5 * self.separation * self.axis

    def element_distances(self, point) -> tuple[float, float]:
        """Distances from each element to ``point``.

        Raises
        ------
        DegenerateGeometryError
            If ``point`` coincides with either element.
        """
        p = as_xy(point)
        d1 = float(np.hypot(*(p - self.element_1)))
        d2 = float(np.hypot(*(p - self.element_2)))
        if d1 == 0.0 or d2 == 0.0:
            raise DegenerateGeometryError("evaluation point coincides with an array element")
        return d1, d2


@dataclass(frozen=True)
class FarFieldGeometry:
    """Angle-only description of the client and eavesdropper directions as
    seen from the array center.

    ``mu`` is sin of half the wrapped bearing difference; ``midline`` is the
    bisector chosen consistently with the wrap so that
    ``mu * sin(midline - theta)`` is invariant under 2*pi shifts of either
    bearing.
    """

    theta_c: float
    theta_e: float
    mu: float
    midline: float

    @classmethod
    def from_bearings(cls, theta_c: float, theta_e: float) -> "FarFieldGeometry":
        raw = theta_c - theta_e
        diff = wrap_angle(raw)
        # number of full turns removed by the wrap; keeps (mu, midline) a
        # consistent pair (both flip sign together)
        turns = round((raw - diff) / TAU)
        mu = math.sin(0.5 * diff)
        midline = wrap_angle(0.5 * (theta_c + theta_e) + turns * math.pi)
        return cls(theta_c=wrap_angle(theta_c), theta_e=wrap_angle(theta_e), mu=mu, midline=midline)

    @classmethod
    def from_positions(cls, array_center, client, eavesdropper) -> "FarFieldGeometry":
        return cls.from_bearings(
            bearing(array_center, client), bearing(array_center, eavesdropper)
        )
