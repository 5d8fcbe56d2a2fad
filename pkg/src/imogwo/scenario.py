"""Problem instances: sensor layout, UAV start positions, physical constants.

A :class:`Scenario` is immutable and JSON-serializable. Lengths are in
meters, powers in watts, frequencies in Hz except ``carrier_mhz``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

__all__ = [
    "Bounds",
    "ChannelParams",
    "EnergyParams",
    "InvalidConfigError",
    "Scenario",
    "ScenarioConfig",
    "ScenarioParseError",
    "SensorNode",
    "UavSpec",
    "generate_scenario",
    "load_scenario",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
]

START_DISTRIBUTIONS = ("uniform", "gaussian", "exponential")
TASK_UNIT_BITS = 2**20
CYCLES_UNIT = 100


class InvalidConfigError(ValueError):
    pass


class ScenarioParseError(ValueError):
    """Raised when a scenario document is malformed; ``path`` names the field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class EnergyParams:
    """Rotary-wing propulsion constants plus the flight speed profile."""

    p_blade_w: float = 79.86
    p_induced_w: float = 88.63
    tip_speed_ms: float = 120.0
    hover_induced_ms: float = 4.03
    drag_ratio: float = 0.6
    air_density: float = 1.225
    rotor_solidity: float = 0.05
    disk_area_m2: float = 0.503
    gravity_ms2: float = 9.8
    climb_speed_ms: float = 6.0
    descend_speed_ms: float = 2.0
    horizontal_speed_ms: float = 10.0

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise InvalidConfigError(f"energy.{f.name} must be > 0")


@dataclass(frozen=True)
class Bounds:
    xy_min: float = 0.0
    xy_max: float = 800.0
    z_min: float = 10.0
    z_max: float = 30.0
    p_min: float = 0.1
    p_max: float = 1.0
    f_u_min: float = 0.5e9
    f_u_max: float = 1.0e9
    p_total_w: float = 25.0
    safe_distance_m: float = 5.0

    def __post_init__(self):
        for lo, hi in (("xy_min", "xy_max"), ("z_min", "z_max"),
                       ("p_min", "p_max"), ("f_u_min", "f_u_max")):
            if not getattr(self, lo) < getattr(self, hi):
                raise InvalidConfigError(f"bounds.{lo} must be < bounds.{hi}")
        if not self.p_total_w > 0:
            raise InvalidConfigError("bounds.p_total_w must be > 0")
        if not self.safe_distance_m > 0:
            raise InvalidConfigError("bounds.safe_distance_m must be > 0")


@dataclass(frozen=True)
class ChannelParams:
    bandwidth_hz: float = 1.0e6
    carrier_mhz: float = 920.0
    noise_w: float = 1.0e-13
    forest_fraction: float = 0.2

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise InvalidConfigError("channel.bandwidth_hz must be > 0")
        if not self.noise_w > 0:
            raise InvalidConfigError("channel.noise_w must be > 0")
        if not 0.0 <= self.forest_fraction <= 1.0:
            raise InvalidConfigError("channel.forest_fraction must be in [0, 1]")


@dataclass(frozen=True)
class SensorNode:
    position: tuple[float, float, float]
    task_bits: int
    cycles_per_bit: int
    local_cpu_hz: float

    def __post_init__(self):
        if len(self.position) != 3 or self.position[2] != 0.0:
            raise InvalidConfigError("sensor position must be (x, y, 0)")
        if self.task_bits < 1 or self.cycles_per_bit < 1:
            raise InvalidConfigError("sensor task_bits and cycles_per_bit must be >= 1")
        if not self.local_cpu_hz > 0:
            raise InvalidConfigError("sensor local_cpu_hz must be > 0")


@dataclass(frozen=True)
class UavSpec:
    initial_position: tuple[float, float, float]
    mass_kg: float = 2.0
    energy: EnergyParams = field(default_factory=EnergyParams)

    def __post_init__(self):
        if not self.mass_kg > 0:
            raise InvalidConfigError("uav mass_kg must be > 0")


@dataclass(frozen=True)
class Scenario:
    """An immutable problem instance.

    The array views (``sensor_xy``, ``task_bits`` ...) are computed once
    and returned read-only so hot loops never rebuild them.
    """

    sensors: tuple[SensorNode, ...]
    uavs: tuple[UavSpec, ...]
    bounds: Bounds
    channel: ChannelParams
    seed: int = 0
    side: float = 800.0

    def __post_init__(self):
        object.__setattr__(self, "sensors", tuple(self.sensors))
        object.__setattr__(self, "uavs", tuple(self.uavs))
        if not len(self.sensors) >= len(self.uavs) >= 1:
            raise InvalidConfigError("need K >= M >= 1")
        b = self.bounds
        for j, sn in enumerate(self.sensors):
            x, y, _ = sn.position
            if not (b.xy_min <= x <= b.xy_max and b.xy_min <= y <= b.xy_max):
                raise InvalidConfigError(f"sensors[{j}] lies outside the area")
        for i, u in enumerate(self.uavs):
            if not b.z_min <= u.initial_position[2] <= b.z_max:
                raise InvalidConfigError(f"uavs[{i}] start altitude out of bounds")

    @property
    def m(self) -> int:
        return len(self.uavs)

    @property
    def k(self) -> int:
        return len(self.sensors)

    @property
    def dimension(self) -> int:
        return 3 * self.m + 4 * self.k

    def _frozen(self, arr):
        arr = np.asarray(arr)
        arr.setflags(write=False)
        return arr

    @cached_property
    def sensor_xy(self) -> np.ndarray:
        return self._frozen([sn.position[:2] for sn in self.sensors])

    @cached_property
    def task_bits(self) -> np.ndarray:
        return self._frozen(np.array([sn.task_bits for sn in self.sensors], dtype=float))

    @cached_property
    def cycles_per_bit(self) -> np.ndarray:
        return self._frozen(np.array([sn.cycles_per_bit for sn in self.sensors], dtype=float))

    @cached_property
    def local_cpu_hz(self) -> np.ndarray:
        return self._frozen(np.array([sn.local_cpu_hz for sn in self.sensors], dtype=float))

    @cached_property
    def uav_start(self) -> np.ndarray:
        return self._frozen(np.array([u.initial_position for u in self.uavs], dtype=float))

    @cached_property
    def uav_mass(self) -> np.ndarray:
        return self._frozen(np.array([u.mass_kg for u in self.uavs], dtype=float))

    @cached_property
    def continuous_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Lower/upper bounds of the flat continuous vector ``[q, p, f, c]``."""
        b, m, k = self.bounds, self.m, self.k
        q_lo = np.tile([b.xy_min, b.xy_min, b.z_min], m)
        q_hi = np.tile([b.xy_max, b.xy_max, b.z_max], m)
        lo = np.concatenate([q_lo, np.full(k, b.p_min), np.full(k, b.f_u_min), np.zeros(k)])
        hi = np.concatenate([q_hi, np.full(k, b.p_max), np.full(k, b.f_u_max), self.task_bits])
        return self._frozen(lo), self._frozen(hi)

    @property
    def energy(self) -> EnergyParams:
        # All generated fleets are homogeneous; heterogeneous fleets use uavs[i].energy.
        return self.uavs[0].energy

    @cached_property
    def homogeneous_energy(self) -> bool:
        return all(u.energy == self.uavs[0].energy for u in self.uavs)


@dataclass(frozen=True)
class ScenarioConfig:
    """Knobs for :func:`generate_scenario`; defaults give the small-scale network."""

    m: int = 6
    k: int = 50
    side: float = 800.0
    distribution: str = "uniform"
    z_min: float = 10.0
    z_max: float = 30.0
    p_min: float = 0.1
    p_max: float = 1.0
    f_u_min: float = 0.5e9
    f_u_max: float = 1.0e9
    local_cpu_hz: float = 0.1e9
    safe_distance_m: float = 5.0
    bandwidth_hz: float = 1.0e6
    carrier_mhz: float = 920.0
    noise_dbm: float = -100.0
    forest_fraction: float = 0.2
    mass_kg: float = 2.0
    energy: EnergyParams = field(default_factory=EnergyParams)

    def validate(self):
        if self.m < 1 or self.k < 1:
            raise InvalidConfigError("m and k must be positive")
        if self.k < self.m:
            raise InvalidConfigError(f"K={self.k} < M={self.m}")
        if not self.side > 0:
            raise InvalidConfigError("side must be positive")
        if self.distribution not in START_DISTRIBUTIONS:
            raise InvalidConfigError(
                f"distribution must be one of {START_DISTRIBUTIONS}, got {self.distribution!r}")


def _draw_starts(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    m, side = cfg.m, cfg.side
    z = rng.uniform(cfg.z_min, cfg.z_max, m)
    if cfg.distribution == "uniform":
        xy = rng.uniform(0.0, side, (m, 2))
    elif cfg.distribution == "gaussian":
        xy = rng.normal(side / 2, side / 6, (m, 2))
    else:
        xy = rng.exponential(side / 4, (m, 2))
    xy = np.clip(xy, 0.0, side)
    return np.column_stack([xy, z])


def generate_scenario(config: ScenarioConfig, seed: int) -> Scenario:
    """Draw a random instance.

    Sensors are uniform over ``[0, side]^2``. Task sizes are ``2^20 * w1``
    bits with ``w1`` in ``{1..4}`` and densities ``100 * w2`` cycles/bit
    with ``w2`` in ``{1..3}``. The total power budget is ``K * p_max / 2``.
    """
    config.validate()
    rng = np.random.default_rng(seed)
    xy = rng.uniform(0.0, config.side, (config.k, 2))
    w1 = rng.integers(1, 5, config.k)
    w2 = rng.integers(1, 4, config.k)
    starts = _draw_starts(config, rng)

    sensors = tuple(
        SensorNode(
            position=(float(xy[j, 0]), float(xy[j, 1]), 0.0),
            task_bits=int(TASK_UNIT_BITS * w1[j]),
            cycles_per_bit=int(CYCLES_UNIT * w2[j]),
            local_cpu_hz=float(config.local_cpu_hz),
        )
        for j in range(config.k)
    )
    uavs = tuple(
        UavSpec(initial_position=tuple(float(v) for v in starts[i]),
                mass_kg=float(config.mass_kg), energy=config.energy)
        for i in range(config.m)
    )
    bounds = Bounds(
        xy_min=0.0, xy_max=float(config.side),
        z_min=config.z_min, z_max=config.z_max,
        p_min=config.p_min, p_max=config.p_max,
        f_u_min=config.f_u_min, f_u_max=config.f_u_max,
        p_total_w=config.k * config.p_max / 2,
        safe_distance_m=config.safe_distance_m,
    )
    channel = ChannelParams(
        bandwidth_hz=config.bandwidth_hz,
        carrier_mhz=config.carrier_mhz,
        noise_w=10 ** ((config.noise_dbm - 30) / 10),
        forest_fraction=config.forest_fraction,
    )
    return Scenario(sensors=sensors, uavs=uavs, bounds=bounds, channel=channel,
                    seed=int(seed), side=float(config.side))


# -- serialization ----------------------------------------------------------

def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    return {
        "meta": {"seed": s.seed, "m": s.m, "k": s.k, "side": s.side},
        "sensors": [
            {"position": list(sn.position), "task_bits": sn.task_bits,
             "cycles_per_bit": sn.cycles_per_bit, "local_cpu_hz": sn.local_cpu_hz}
            for sn in s.sensors
        ],
        "uavs": [
            {"initial_position": list(u.initial_position), "mass_kg": u.mass_kg,
             "energy": asdict(u.energy)}
            for u in s.uavs
        ],
        "bounds": asdict(s.bounds),
        "channel": asdict(s.channel),
    }


def _require(doc: Any, key: str, path: str):
    if not isinstance(doc, dict):
        raise ScenarioParseError(path or "<root>", "expected an object")
    if key not in doc:
        raise ScenarioParseError(f"{path}.{key}" if path else key, "missing required key")
    return doc[key]


def _build(cls, doc: Any, path: str):
    if not isinstance(doc, dict):
        raise ScenarioParseError(path, "expected an object")
    kwargs = {}
    for f in fields(cls):
        if f.name in doc:
            kwargs[f.name] = doc[f.name]
    unknown = set(doc) - {f.name for f in fields(cls)}
    if unknown:
        raise ScenarioParseError(f"{path}.{sorted(unknown)[0]}", "unknown key")
    try:
        return cls(**kwargs)
    except (TypeError, InvalidConfigError) as exc:
        raise ScenarioParseError(path, str(exc)) from exc


def _position(value: Any, path: str) -> tuple[float, float, float]:
    if not (isinstance(value, list) and len(value) == 3):
        raise ScenarioParseError(path, "expected a 3-element list")
    return tuple(float(v) for v in value)


def scenario_from_dict(doc: dict[str, Any]) -> Scenario:
    meta = _require(doc, "meta", "")
    sensors_doc = _require(doc, "sensors", "")
    uavs_doc = _require(doc, "uavs", "")
    bounds = _build(Bounds, _require(doc, "bounds", ""), "bounds")
    channel = _build(ChannelParams, _require(doc, "channel", ""), "channel")
    seed = _require(meta, "seed", "meta")
    side = _require(meta, "side", "meta")

    if not isinstance(sensors_doc, list):
        raise ScenarioParseError("sensors", "expected a list")
    sensors = []
    for j, sd in enumerate(sensors_doc):
        p = f"sensors[{j}]"
        try:
            sensors.append(SensorNode(
                position=_position(_require(sd, "position", p), f"{p}.position"),
                task_bits=int(_require(sd, "task_bits", p)),
                cycles_per_bit=int(_require(sd, "cycles_per_bit", p)),
                local_cpu_hz=float(_require(sd, "local_cpu_hz", p)),
            ))
        except InvalidConfigError as exc:
            raise ScenarioParseError(p, str(exc)) from exc

    if not isinstance(uavs_doc, list):
        raise ScenarioParseError("uavs", "expected a list")
    uavs = []
    for i, ud in enumerate(uavs_doc):
        p = f"uavs[{i}]"
        energy = _build(EnergyParams, _require(ud, "energy", p), f"{p}.energy")
        try:
            uavs.append(UavSpec(
                initial_position=_position(_require(ud, "initial_position", p),
                                           f"{p}.initial_position"),
                mass_kg=float(_require(ud, "mass_kg", p)),
                energy=energy,
            ))
        except InvalidConfigError as exc:
            raise ScenarioParseError(p, str(exc)) from exc

    if _require(meta, "m", "meta") != len(uavs) or _require(meta, "k", "meta") != len(sensors):
        raise ScenarioParseError("meta", "m/k disagree with the uav/sensor lists")
    try:
        return Scenario(sensors=tuple(sensors), uavs=tuple(uavs), bounds=bounds,
                        channel=channel, seed=int(seed), side=float(side))
    except InvalidConfigError as exc:
        raise ScenarioParseError("<root>", str(exc)) from exc


def scenario_to_json(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=1, sort_keys=True)


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(scenario_to_json(s) + "\n", encoding="utf-8")


def load_scenario(path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError("<root>", f"invalid JSON: {exc}") from exc
    return scenario_from_dict(doc)
