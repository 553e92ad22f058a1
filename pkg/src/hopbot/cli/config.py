"""Scenario files: JSON parsing and construction of domain objects.

A scenario file is a JSON object::

    {"kind": "hop", "seed": 0, "params": {...}}

``kind`` and ``seed`` are optional (the subcommand supplies the kind).
Malformed JSON, unknown keys, missing keys and wrongly typed values are
parse errors; well-formed values that break a model invariant are
validation errors. Builders collect every validation problem, prefixed
with its field path, before raising.
"""

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dynamics import HopPlan, RobotState, VehicleParams, euler_to_quat
from ..errors import ConfigError, ValidationError
from ..mission import CaveSpec, RelayChain
from ..navigation import CameraModel, Obstacle, SphereWorld
from ..propulsion import SolidMotorSpec

KINDS = ("motor-burn", "isp-table", "hop", "attitude", "plan-path", "survey", "relay", "tables")


@dataclass
class Scenario:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    source: str = "<defaults>"


def load_scenario(path, kind=None):
    """Parse a scenario file. ``kind`` is the subcommand, if any."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read file ({exc.strerror})") from exc
    if not text.strip():
        raise ConfigError(f"{path}: empty config file")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    unknown = set(data) - {"kind", "seed", "params"}
    if unknown:
        raise ConfigError(f"{path}: unknown top-level key(s) {sorted(unknown)}")
    file_kind = data.get("kind")
    if file_kind is not None and file_kind not in KINDS:
        raise ConfigError(f"{path}: kind must be one of {list(KINDS)}, got {file_kind!r}")
    if kind is not None and file_kind is not None and file_kind != kind:
        raise ConfigError(f"{path}: file is a {file_kind!r} scenario, not {kind!r}")
    resolved = kind or file_kind
    if resolved is None:
        raise ConfigError(f"{path}: no 'kind' given in file or on the command line")
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}: 'params' must be a JSON object")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"{path}: 'seed' must be a non-negative integer")
    return Scenario(resolved, params, seed, str(path))


class Builder:
    """Collects validation problems while building domain objects."""

    def __init__(self):
        self.problems = []

    def check_keys(self, block, path, allowed, required=()):
        if not isinstance(block, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        unknown = sorted(set(block) - set(allowed))
        if unknown:
            raise ConfigError(f"{path}: unknown key(s) {unknown}; allowed: {sorted(allowed)}")
        missing = [k for k in required if k not in block]
        if missing:
            raise ConfigError(f"{path}: missing required key(s) {missing}")

    def number(self, block, key, path, default):
        value = block.get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
        return float(value)

    def vector(self, block, key, path, size, default=None):
        value = block.get(key, default)
        try:
            arr = np.asarray(value, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}.{key}: expected a list of numbers") from exc
        if arr.shape != (size,):
            raise ConfigError(f"{path}.{key}: expected {size} numbers, got shape {arr.shape}")
        return arr

    def make(self, cls, kwargs, path):
        try:
            return cls(**kwargs)
        except ValidationError as exc:
            self.problems.extend(f"{path}: {p}" for p in exc.problems)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return None

    def require(self, condition, message):
        if not condition:
            self.problems.append(message)

    def finish(self):
        if self.problems:
            raise ValidationError(self.problems)


def _dataclass_fields(cls):
    return {f.name for f in dataclasses.fields(cls)}


def build_motor(b, block, path="params.motor"):
    allowed = _dataclass_fields(SolidMotorSpec) | {"start_pressure"}
    b.check_keys(block, path, allowed)
    kwargs = {k: b.number(block, k, path, None) for k in block}
    if "burn_rate_coefficient" in kwargs:
        defaults = dict(grain_inner_radius=0.008, grain_outer_radius=0.018, grain_length=0.015,
                        throat_radius=0.002, nozzle_exit_radius=0.006)
        defaults.update(kwargs)
        defaults.pop("start_pressure", None)
        return b.make(SolidMotorSpec, defaults, path)
    try:
        return SolidMotorSpec.reference_pellet(**kwargs)
    except ValidationError as exc:
        b.problems.extend(f"{path}: {p}" for p in exc.problems)
    except ZeroDivisionError:
        b.problems.append(f"{path}: geometry gives zero burn area")
    return None


def build_vehicle(b, block, path="params.vehicle"):
    allowed = _dataclass_fields(VehicleParams)
    b.check_keys(block, path, allowed)
    kwargs = {}
    for key, value in block.items():
        if key == "body_inertia":
            arr = np.asarray(value, dtype=float)
            kwargs[key] = np.diag(arr) if arr.shape == (3,) else arr
        elif key == "thruster_positions":
            kwargs[key] = np.asarray(value, dtype=float)
        elif key in ("kp", "kd"):
            kwargs[key] = (np.full(3, float(value)) if isinstance(value, (int, float))
                           else b.vector(block, key, path, 3))
        else:
            kwargs[key] = b.number(block, key, path, None)
    return b.make(VehicleParams, kwargs, path)


def build_state(b, block, path="params.initial"):
    allowed = {"position", "velocity", "attitude", "euler", "body_rates", "wheel_speeds", "mass"}
    b.check_keys(block, path, allowed)
    if "attitude" in block and "euler" in block:
        raise ConfigError(f"{path}: give either 'attitude' (quaternion) or 'euler', not both")
    kwargs = {}
    for key in ("position", "velocity", "body_rates", "wheel_speeds"):
        if key in block:
            kwargs[key] = b.vector(block, key, path, 3)
    if "attitude" in block:
        kwargs["attitude"] = b.vector(block, "attitude", path, 4)
    if "euler" in block:
        kwargs["attitude"] = euler_to_quat(b.vector(block, "euler", path, 3))
    if "mass" in block:
        kwargs["mass"] = b.number(block, "mass", path, None)
    return b.make(RobotState, kwargs, path)


def build_plan(b, block, path="params.plan"):
    allowed = {"burn_duration", "target_attitude", "throttle_profile", "coast_termination",
               "slew_duration", "target_rates"}
    b.check_keys(block, path, allowed, required=("burn_duration",))
    kwargs = {k: b.number(block, k, path, None)
              for k in ("burn_duration", "coast_termination", "slew_duration") if k in block}
    for key in ("target_attitude", "target_rates"):
        if key in block:
            kwargs[key] = b.vector(block, key, path, 3)
    if "throttle_profile" in block:
        prof = block["throttle_profile"]
        if not isinstance(prof, (int, float, list)) or isinstance(prof, bool):
            raise ConfigError(f"{path}.throttle_profile: expected a number or [[t, u], ...]")
        kwargs["throttle_profile"] = prof
    return b.make(HopPlan, kwargs, path)


def build_world(b, block, path="params.world"):
    b.check_keys(block, path, {"obstacles", "goal", "bound_radius", "kappa"},
                 required=("obstacles", "goal"))
    obstacles = []
    if not isinstance(block["obstacles"], list):
        raise ConfigError(f"{path}.obstacles: expected a list")
    for i, ob in enumerate(block["obstacles"]):
        opath = f"{path}.obstacles[{i}]"
        b.check_keys(ob, opath, {"center", "radius"}, required=("center", "radius"))
        center = b.vector(ob, "center", opath, 2)
        obstacles.append(Obstacle(tuple(center.tolist()), b.number(ob, "radius", opath, None)))
    kwargs = dict(obstacles=obstacles, goal=b.vector(block, "goal", path, 2))
    for key in ("bound_radius", "kappa"):
        if key in block:
            kwargs[key] = b.number(block, key, path, None)
    return b.make(SphereWorld, kwargs, path)


def build_camera(b, block, path="params.camera"):
    allowed = {"n_h", "n_v", "focal_length", "hfov_deg", "vfov_deg", "sensor_width", "sensor_height"}
    b.check_keys(block, path, allowed)
    if not block:
        return CameraModel.reference()
    for key in ("n_h", "n_v"):
        if key in block and (isinstance(block[key], bool) or not isinstance(block[key], int)):
            raise ConfigError(f"{path}.{key}: expected an integer")
    n_h, n_v = block.get("n_h", 1280), block.get("n_v", 800)
    f = b.number(block, "focal_length", path, 2.5)
    if "sensor_width" in block or "sensor_height" in block:
        b.check_keys(block, path, allowed, required=("sensor_width", "sensor_height"))
        return b.make(CameraModel, dict(n_h=n_h, n_v=n_v, focal_length=f,
                                        sensor_width=b.number(block, "sensor_width", path, None),
                                        sensor_height=b.number(block, "sensor_height", path, None)),
                      path)
    hfov = b.number(block, "hfov_deg", path, 75.0)
    vfov = b.number(block, "vfov_deg", path, 47.0)
    b.require(0 < hfov < 180, f"{path}.hfov_deg must lie in (0, 180), got {hfov!r}")
    b.require(0 < vfov < 180, f"{path}.vfov_deg must lie in (0, 180), got {vfov!r}")
    if not (0 < hfov < 180 and 0 < vfov < 180):
        return None
    try:
        return CameraModel.from_fov(n_h, n_v, f, hfov, vfov)
    except ValidationError as exc:
        b.problems.extend(f"{path}: {p}" for p in exc.problems)
    return None


def build_cave(b, block, path="params.cave"):
    b.check_keys(block, path, _dataclass_fields(CaveSpec), required=("length",))
    return b.make(CaveSpec, {k: b.number(block, k, path, None) for k in block}, path)


def build_relay_chain(b, params, path="params"):
    kwargs = {}
    for key in ("link_rate", "link_latency", "comm_range"):
        if key in params:
            kwargs[key] = b.number(params, key, path, None)
    if "positions" in params:
        positions = params["positions"]
        if not isinstance(positions, list):
            raise ConfigError(f"{path}.positions: expected a list of numbers")
        return b.make(RelayChain, dict(positions=positions, **kwargs), path)
    length = b.number(params, "cave_length", path, 1000.0)
    if length <= 0:
        b.problems.append(f"{path}.cave_length must be > 0, got {length!r}")
        return None
    try:
        return RelayChain.for_cave(length, **kwargs)
    except ValidationError as exc:
        b.problems.extend(f"{path}: {p}" for p in exc.problems)
    return None
