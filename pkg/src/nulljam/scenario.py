"""Scenario file parsing and validation.

Scenarios are YAML with a fixed schema; unknown keys are rejected so typos
cannot silently change an experiment.  Exactly one of ``frequency`` (Hz) or
``wavelength`` (m) must be present; the other is derived with
c = 299,792,458 m/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .errors import InvalidInputError, ScenarioError
from .optimizer import CostWeights, UavState
from .propagation import ActivationSpec, RadioParams
from .simulate import Mission, TargetMotion

SPEED_OF_LIGHT = 299_792_458.0

_TOP_KEYS = {
    "client",
    "eavesdropper",
    "uav_initial",
    "frequency",
    "wavelength",
    "antenna_separation",
    "nominal_power",
    "weights",
    "activation",
    "signal_power",
    "seed",
}
_MOTION_KEYS = {"kind", "initial", "velocity", "waypoints"}
_UAV_KEYS = {"position", "velocity"}
_WEIGHT_KEYS = {"r", "q_r", "q_f", "a_r", "a_f", "u_bar", "t_f"}
_ACTIVATION_KEYS = {"lower", "upper"}


@dataclass(frozen=True)
class ScenarioFile:
    """A validated problem instance."""

    client: TargetMotion
    eavesdropper: TargetMotion
    uav_initial: UavState
    wavelength: float
    frequency: Optional[float]
    antenna_separation: float
    nominal_power: float
    weights: CostWeights
    activation: ActivationSpec
    signal_power: Optional[float]
    seed: int

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def radio(self) -> RadioParams:
        return RadioParams(nominal_power=self.nominal_power, wavenumber=self.wavenumber)

    def to_mission(self, reg_eps: float = 1e-9) -> Mission:
        return Mission(
            client=self.client,
            eavesdropper=self.eavesdropper,
            uav_initial=self.uav_initial,
            radio=self.radio,
            separation=self.antenna_separation,
            activation=self.activation,
            weights=self.weights,
            reg_eps=reg_eps,
        )


def _reject_unknown(mapping: dict, allowed: set, context: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioError(f"unknown key(s) in {context}: {sorted(unknown)}")


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ScenarioError(f"missing field '{key}' in {context}")
    return mapping[key]


def _positive(value, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"'{name}' must be a number, got {value!r}") from None
    if not v > 0.0 or not math.isfinite(v):
        raise ScenarioError(f"'{name}' must be positive and finite, got {v}")
    return v


def _point(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise ScenarioError(f"'{name}' must be a finite [x, y] pair, got {value!r}")
    return arr


def _parse_motion(raw, context: str) -> TargetMotion:
    if not isinstance(raw, dict):
        raise ScenarioError(f"'{context}' must be a mapping with a 'kind' field")
    _reject_unknown(raw, _MOTION_KEYS, context)
    kind = _require(raw, "kind", context)
    if kind == "static":
        return TargetMotion.static(_point(_require(raw, "initial", context), f"{context}.initial"))
    if kind == "constant-velocity":
        return TargetMotion.constant_velocity(
            _point(_require(raw, "initial", context), f"{context}.initial"),
            _point(_require(raw, "velocity", context), f"{context}.velocity"),
        )
    if kind == "waypoint-sequence":
        raw_wps = _require(raw, "waypoints", context)
        try:
            wps = [(float(w[0]), _point(w[1:3], f"{context}.waypoints")) for w in raw_wps]
        except (TypeError, IndexError):
            raise ScenarioError(
                f"'{context}.waypoints' must be a list of [t, x, y] triples"
            ) from None
        return TargetMotion.waypoint_sequence(wps)
    raise ScenarioError(f"'{context}.kind' must be one of static, constant-velocity, "
                        f"waypoint-sequence; got {kind!r}")


def _parse_weights(raw, context: str = "weights") -> CostWeights:
    if not isinstance(raw, dict):
        raise ScenarioError("'weights' must be a mapping")
    _reject_unknown(raw, _WEIGHT_KEYS, context)
    r = np.asarray(_require(raw, "r", context), dtype=float)
    if r.shape == ():
        r = np.array((float(r), float(r)))
    if r.shape != (2,) or not np.all(r > 0.0):
        raise ScenarioError(f"'weights.r' must be positive (scalar or pair), got {raw.get('r')!r}")
    try:
        a_r = float(_require(raw, "a_r", context))
        a_f = float(_require(raw, "a_f", context))
    except (TypeError, ValueError):
        raise ScenarioError("'weights.a_r' and 'weights.a_f' must be numbers") from None
    if a_r < 0.0 or a_f < 0.0:
        raise ScenarioError("'weights.a_r' and 'weights.a_f' must be nonnegative")
    try:
        return CostWeights(
            r=r,
            q_r=np.asarray(_require(raw, "q_r", context), dtype=float),
            q_f=np.asarray(_require(raw, "q_f", context), dtype=float),
            a_r=a_r,
            a_f=a_f,
            u_bar=_positive(_require(raw, "u_bar", context), "weights.u_bar"),
            t_f=_positive(_require(raw, "t_f", context), "weights.t_f"),
        )
    except (TypeError, ValueError, InvalidInputError) as exc:
        raise ScenarioError(f"invalid 'weights': {exc}") from exc


def _parse_activation(raw) -> ActivationSpec:
    if raw is None:
        return ActivationSpec(-100.0, -70.0)
    if raw == "identity":
        return ActivationSpec.identity()
    if not isinstance(raw, dict):
        raise ScenarioError("'activation' must be 'identity' or a {lower, upper} mapping")
    _reject_unknown(raw, _ACTIVATION_KEYS, "activation")
    lower = float(_require(raw, "lower", "activation"))
    upper = float(_require(raw, "upper", "activation"))
    if not lower < upper:
        raise ScenarioError(f"'activation' must satisfy lower < upper, got ({lower}, {upper})")
    return ActivationSpec(lower, upper)


def parse_scenario(data: dict, context: str = "scenario") -> ScenarioFile:
    """Validate an already-parsed mapping; see :func:`load_scenario`."""
    if not isinstance(data, dict):
        raise ScenarioError(f"{context} must be a mapping")
    _reject_unknown(data, _TOP_KEYS, context)

    has_freq = "frequency" in data
    has_wlen = "wavelength" in data
    if has_freq and has_wlen:
        raise ScenarioError("exactly one of 'frequency' and 'wavelength' may be given, not both")
    if not has_freq and not has_wlen:
        raise ScenarioError("exactly one of 'frequency' and 'wavelength' must be given")
    if has_freq:
        frequency = _positive(data["frequency"], "frequency")
        wavelength = SPEED_OF_LIGHT / frequency
    else:
        frequency = None
        wavelength = _positive(data["wavelength"], "wavelength")

    uav_raw = _require(data, "uav_initial", context)
    if not isinstance(uav_raw, dict):
        raise ScenarioError("'uav_initial' must be a mapping with position and velocity")
    _reject_unknown(uav_raw, _UAV_KEYS, "uav_initial")
    uav = UavState(
        position=_point(_require(uav_raw, "position", "uav_initial"), "uav_initial.position"),
        velocity=_point(_require(uav_raw, "velocity", "uav_initial"), "uav_initial.velocity"),
    )

    signal_power = data.get("signal_power")
    if signal_power is not None:
        signal_power = float(signal_power)

    return ScenarioFile(
        client=_parse_motion(_require(data, "client", context), "client"),
        eavesdropper=_parse_motion(_require(data, "eavesdropper", context), "eavesdropper"),
        uav_initial=uav,
        wavelength=wavelength,
        frequency=frequency,
        antenna_separation=_positive(
            _require(data, "antenna_separation", context), "antenna_separation"
        ),
        nominal_power=_positive(_require(data, "nominal_power", context), "nominal_power"),
        weights=_parse_weights(_require(data, "weights", context)),
        activation=_parse_activation(data.get("activation")),
        signal_power=signal_power,
        seed=int(data.get("seed") or 0),
    )


def load_scenario(path) -> ScenarioFile:
    """Load and validate a scenario YAML file.

    Raises
    ------
    ScenarioError
        Naming the missing/unknown/invalid field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario file {path} is not valid YAML: {exc}") from exc
    return parse_scenario(data, context=str(path))
