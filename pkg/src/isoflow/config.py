"""Scenario configuration: JSON file -> validated scenario objects.

A config file holds one object with a "scenarios" array.  Every entry
names a run mode and the physical setup it needs; unknown keys are
rejected so typos fail loudly instead of silently running defaults.
Parse problems raise :class:`ConfigError` carrying the best available
position information: line/column for syntax errors, a dotted field
path for semantic ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

MODES = ("lemma-suite", "ode-flow", "levelset-flow", "mass-table")
METRIC_KINDS = ("euclidean", "schwarzschild")
SHAPE_KINDS = ("sphere", "dumbbell", "oval")


class ConfigError(ValueError):
    """Malformed configuration; message includes line or field path."""


@dataclass(frozen=True)
class ShapeSpec:
    """Initial region for level-set runs, as a signed distance recipe."""

    kind: str  # sphere | dumbbell | oval
    r0: float = 0.0  # sphere radius
    ball_radius: float = 0.0  # dumbbell ball radius
    separation: float = 0.0  # dumbbell center-to-center distance
    neck_radius: float = 0.0  # dumbbell connecting cylinder radius
    a: float = 0.0  # oval equatorial semi-axis (rho)
    b: float = 0.0  # oval polar semi-axis (z)

    def signed_distance(self, rho, z):
        """Vectorized level-set seed; negative inside the region."""
        if self.kind == "sphere":
            return np.hypot(rho, z) - self.r0
        if self.kind == "dumbbell":
            half = 0.5 * self.separation
            top = np.hypot(rho, z - half) - self.ball_radius
            bottom = np.hypot(rho, z + half) - self.ball_radius
            neck = np.maximum(rho - self.neck_radius, np.abs(z) - half)
            return np.minimum(np.minimum(top, bottom), neck)
        # oval: scaled ellipse level function (exact sign, near-distance)
        scaled = np.sqrt((rho / self.a) ** 2 + (z / self.b) ** 2)
        return (scaled - 1.0) * min(self.a, self.b)

    def bounding_radius(self) -> float:
        if self.kind == "sphere":
            return self.r0
        if self.kind == "dumbbell":
            return 0.5 * self.separation + self.ball_radius
        return max(self.a, self.b)


@dataclass(frozen=True)
class GridSpec:
    h: float
    rho_max: float
    z_min: float
    z_max: float


@dataclass(frozen=True)
class TimeSpec:
    t_max: float = 0.0
    sample_interval: float = 0.0
    dt: float | None = None  # None = auto-CFL
    sweep_cadence: int = 5
    reinit_cadence: int = 100


@dataclass(frozen=True)
class Scenario:
    name: str
    mode: str
    mass: float
    shape: ShapeSpec | None = None
    grid: GridSpec | None = None
    time: TimeSpec = field(default_factory=TimeSpec)
    threshold_mass: float | None = None
    # ode-flow initial radius (levelset runs take it from the shape)
    r0: float = 0.0
    # verdict slack for the monotone-Q check in levelset runs
    q_slack: float | None = None
    # mass-table radius grid
    r_values: tuple[float, ...] = ()


@dataclass(frozen=True)
class RunPlan:
    scenarios: tuple[Scenario, ...]


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ConfigError(f"{path}: missing required field '{key}'")
    return obj[key]


def _number(value, path: str, *, minimum=None, positive=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise ConfigError(f"{path}: must be finite")
    if positive and x <= 0:
        raise ConfigError(f"{path}: must be positive")
    if minimum is not None and x < minimum:
        raise ConfigError(f"{path}: must be at least {minimum}")
    return x


def _integer(value, path: str, *, minimum=0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{path}: must be at least {minimum}")
    return value


def _reject_unknown(obj: dict, allowed: set, path: str):
    extra = set(obj) - allowed
    if extra:
        raise ConfigError(f"{path}: unknown field(s) {sorted(extra)}")


def _parse_metric(obj, path: str) -> float:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    _reject_unknown(obj, {"kind", "mass"}, path)
    kind = obj.get("kind", "schwarzschild")
    if kind not in METRIC_KINDS:
        raise ConfigError(f"{path}.kind: expected one of {METRIC_KINDS}, got {kind!r}")
    mass = _number(obj.get("mass", 0.0), f"{path}.mass", minimum=0.0)
    if kind == "euclidean" and mass != 0.0:
        raise ConfigError(f"{path}: euclidean metric cannot carry mass {mass}")
    if kind == "schwarzschild" and mass == 0.0:
        raise ConfigError(f"{path}: schwarzschild metric needs a positive mass")
    return mass


def _parse_shape(obj, path: str) -> ShapeSpec:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = _require(obj, "kind", path)
    if kind == "sphere":
        _reject_unknown(obj, {"kind", "r0"}, path)
        return ShapeSpec(kind="sphere", r0=_number(_require(obj, "r0", path), f"{path}.r0", positive=True))
    if kind == "dumbbell":
        _reject_unknown(obj, {"kind", "ball_radius", "separation", "neck_radius"}, path)
        ball = _number(_require(obj, "ball_radius", path), f"{path}.ball_radius", positive=True)
        sep = _number(_require(obj, "separation", path), f"{path}.separation", positive=True)
        neck = _number(_require(obj, "neck_radius", path), f"{path}.neck_radius", positive=True)
        if neck >= ball:
            raise ConfigError(f"{path}.neck_radius: must be thinner than the balls")
        return ShapeSpec(kind="dumbbell", ball_radius=ball, separation=sep, neck_radius=neck)
    if kind == "oval":
        _reject_unknown(obj, {"kind", "a", "b"}, path)
        return ShapeSpec(
            kind="oval",
            a=_number(_require(obj, "a", path), f"{path}.a", positive=True),
            b=_number(_require(obj, "b", path), f"{path}.b", positive=True),
        )
    raise ConfigError(f"{path}.kind: expected one of {SHAPE_KINDS}, got {kind!r}")


def _parse_grid(obj, path: str) -> GridSpec:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    _reject_unknown(obj, {"h", "rho_max", "z_min", "z_max"}, path)
    h = _number(_require(obj, "h", path), f"{path}.h", positive=True)
    rho_max = _number(_require(obj, "rho_max", path), f"{path}.rho_max", positive=True)
    z_min = _number(_require(obj, "z_min", path), f"{path}.z_min")
    z_max = _number(_require(obj, "z_max", path), f"{path}.z_max")
    if z_max <= z_min:
        raise ConfigError(f"{path}.z_max: must exceed z_min")
    return GridSpec(h=h, rho_max=rho_max, z_min=z_min, z_max=z_max)


def _parse_time(obj, path: str) -> TimeSpec:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    allowed = {"t_max", "sample_interval", "dt", "sweep_cadence", "reinit_cadence"}
    _reject_unknown(obj, allowed, path)
    t_max = _number(_require(obj, "t_max", path), f"{path}.t_max", positive=True)
    interval = _number(
        _require(obj, "sample_interval", path), f"{path}.sample_interval", positive=True
    )
    dt = obj.get("dt")
    if dt is not None:
        dt = _number(dt, f"{path}.dt", positive=True)
    return TimeSpec(
        t_max=t_max,
        sample_interval=interval,
        dt=dt,
        sweep_cadence=_integer(obj.get("sweep_cadence", 5), f"{path}.sweep_cadence", minimum=1),
        reinit_cadence=_integer(obj.get("reinit_cadence", 100), f"{path}.reinit_cadence", minimum=0),
    )


def _parse_scenario(obj, path: str, seen_names: set) -> Scenario:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    allowed = {
        "name", "mode", "metric", "shape", "grid", "time",
        "threshold_mass", "r0", "q_slack", "r_values",
    }
    _reject_unknown(obj, allowed, path)
    name = _require(obj, "name", path)
    if not isinstance(name, str) or not name:
        raise ConfigError(f"{path}.name: expected a nonempty string")
    if any(c in name for c in "/\\") or name in (".", ".."):
        raise ConfigError(f"{path}.name: must be usable as a directory name")
    if name in seen_names:
        raise ConfigError(f"{path}.name: duplicate scenario name {name!r}")
    seen_names.add(name)
    mode = _require(obj, "mode", path)
    if mode not in MODES:
        raise ConfigError(f"{path}.mode: expected one of {MODES}, got {mode!r}")
    mass = _parse_metric(_require(obj, "metric", path), f"{path}.metric")

    shape = grid = None
    time = TimeSpec()
    threshold = obj.get("threshold_mass")
    if threshold is not None:
        threshold = _number(threshold, f"{path}.threshold_mass", minimum=0.0)
    r0 = 0.0
    q_slack = obj.get("q_slack")
    if q_slack is not None:
        q_slack = _number(q_slack, f"{path}.q_slack", positive=True)
    r_values: tuple[float, ...] = ()

    if mode == "levelset-flow":
        shape = _parse_shape(_require(obj, "shape", path), f"{path}.shape")
        grid = _parse_grid(_require(obj, "grid", path), f"{path}.grid")
        time = _parse_time(_require(obj, "time", path), f"{path}.time")
        if shape.bounding_radius() >= grid.rho_max:
            raise ConfigError(f"{path}.grid.rho_max: shape does not fit inside the grid")
    elif mode == "ode-flow":
        r0 = _number(_require(obj, "r0", path), f"{path}.r0", positive=True)
        time = _parse_time(_require(obj, "time", path), f"{path}.time")
        for key in ("shape", "grid"):
            if key in obj:
                raise ConfigError(f"{path}.{key}: not used by ode-flow")
    elif mode == "mass-table":
        raw = _require(obj, "r_values", path)
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{path}.r_values: expected a nonempty array")
        vals = tuple(
            _number(v, f"{path}.r_values[{i}]", positive=True) for i, v in enumerate(raw)
        )
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigError(f"{path}.r_values: must be strictly increasing")
        r_values = vals
    else:  # lemma-suite: only the metric matters
        for key in ("shape", "grid", "time", "r0", "r_values"):
            if key in obj:
                raise ConfigError(f"{path}.{key}: not used by lemma-suite")

    return Scenario(
        name=name,
        mode=mode,
        mass=mass,
        shape=shape,
        grid=grid,
        time=time,
        threshold_mass=threshold,
        r0=r0,
        q_slack=q_slack,
        r_values=r_values,
    )


def parse_plan(text: str) -> RunPlan:
    """Parse and validate a config document; raises ConfigError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected an object")
    _reject_unknown(doc, {"scenarios"}, "top level")
    raw = _require(doc, "scenarios", "top level")
    if not isinstance(raw, list):
        raise ConfigError("scenarios: expected an array")
    seen: set = set()
    scenarios = tuple(
        _parse_scenario(entry, f"scenarios[{i}]", seen) for i, entry in enumerate(raw)
    )
    return RunPlan(scenarios=scenarios)


def load_plan(path: str) -> RunPlan:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}") from e
    return parse_plan(text)
