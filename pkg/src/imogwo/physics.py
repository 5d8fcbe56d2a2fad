"""Channel, delay, and UAV motion-energy models.

Every function is pure and broadcasts over numpy arrays, so the same code
path serves scalar checks and population-wide evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import ChannelParams, EnergyParams

__all__ = [
    "DomainError",
    "InfeasibleLinkError",
    "LinkBudget",
    "MotionPlan",
    "edge_delay",
    "forest_path_loss",
    "free_space_path_loss",
    "link_budget",
    "link_rate",
    "local_delay",
    "motion_energy",
    "motion_plan",
    "propulsion_power",
]


class DomainError(ValueError):
    pass


class InfeasibleLinkError(ValueError):
    pass


@dataclass(frozen=True)
class LinkBudget:
    pl_forest_db: float
    pl_free_db: float
    pl_total_db: float
    rate_bps: float


@dataclass(frozen=True)
class MotionPlan:
    """Vertical-then-horizontal flight; ``segments`` holds ``(speed, duration)``."""

    vertical_delta_m: float
    horizontal_dist_m: float
    segments: tuple[tuple[float, float], ...]


def forest_path_loss(carrier_mhz, d_forest_m):
    """Empirical foliage loss ``0.0021 f^0.43 D^0.13`` in dB (f in MHz, D in m)."""
    d = np.asarray(d_forest_m, dtype=float)
    if np.any(d < 0):
        raise DomainError("forest distance must be nonnegative")
    return 0.0021 * np.power(carrier_mhz, 0.43) * np.power(d, 0.13)


def free_space_path_loss(carrier_mhz, d_free_m):
    d = np.asarray(d_free_m, dtype=float)
    if np.any(d <= 0):
        raise DomainError("free-space distance must be positive")
    return -27.56 + 20.0 * np.log10(carrier_mhz) + 20.0 * np.log10(d)


def link_rate(p_w, pl_total_db, channel: ChannelParams, assigned=True):
    """Shannon rate ``B log2(1 + p 10^(-PL/10) / noise)``; zero where unassigned."""
    snr = np.asarray(p_w, dtype=float) * np.power(10.0, -np.asarray(pl_total_db) / 10.0) / channel.noise_w
    rate = channel.bandwidth_hz * np.log2(1.0 + snr)
    return np.where(assigned, rate, 0.0)


def link_budget(uav_pos, sn_pos, p_w: float, channel: ChannelParams) -> LinkBudget:
    """Full breakdown for one UAV/sensor pair."""
    d = float(np.linalg.norm(np.asarray(uav_pos, float) - np.asarray(sn_pos, float)))
    d_forest = channel.forest_fraction * d
    pl_forest = float(forest_path_loss(channel.carrier_mhz, d_forest))
    pl_free = float(free_space_path_loss(channel.carrier_mhz, d - d_forest))
    total = pl_forest + pl_free
    return LinkBudget(pl_forest, pl_free, total, float(link_rate(p_w, total, channel)))


def local_delay(bits_local, cycles_per_bit, local_cpu_hz):
    f = np.asarray(local_cpu_hz, dtype=float)
    if np.any(f <= 0):
        raise DomainError("local CPU frequency must be positive")
    return np.asarray(bits_local, dtype=float) * cycles_per_bit / f


def edge_delay(bits_offloaded, cycles_per_bit, rate_bps, f_u_hz):
    """Upload time plus UAV compute time; zero when nothing is offloaded."""
    bits = np.asarray(bits_offloaded, dtype=float)
    rate = np.asarray(rate_bps, dtype=float)
    active = bits > 0
    if np.any(active & (rate <= 0)):
        raise InfeasibleLinkError("positive offload over a zero-rate link")
    with np.errstate(divide="ignore", invalid="ignore"):
        t = bits / rate + bits * cycles_per_bit / np.asarray(f_u_hz, dtype=float)
    out = np.where(active, t, 0.0)
    return out if out.ndim else float(out)


def propulsion_power(v_ms, e: EnergyParams):
    """Rotary-wing propulsion power at constant speed ``v_ms``.

    The induced-power bracket uses ``v0**4`` in its second term, not the
    ``v0**2`` of the usual rotary-wing form; see the README.
    """
    v = np.asarray(v_ms, dtype=float)
    v2 = v * v
    blade = e.p_blade_w * (1.0 + 3.0 * v2 / e.tip_speed_ms**2)
    v04 = e.hover_induced_ms**4
    induced = e.p_induced_w * np.sqrt(np.sqrt(1.0 + v2 * v2 / (4.0 * v04)) - v2 / (2.0 * v04))
    parasite = 0.5 * e.drag_ratio * e.air_density * e.rotor_solidity * e.disk_area_m2 * v2 * v
    return blade + induced + parasite


def motion_plan(start, end, e: EnergyParams) -> MotionPlan:
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    dz = float(end[2] - start[2])
    dist = float(np.hypot(end[0] - start[0], end[1] - start[1]))
    v_vert = e.climb_speed_ms if dz > 0 else e.descend_speed_ms
    segments = ((v_vert, abs(dz) / v_vert),
                (e.horizontal_speed_ms, dist / e.horizontal_speed_ms))
    return MotionPlan(dz, dist, segments)


def motion_energy(start, end, mass_kg, e: EnergyParams):
    """Energy to relocate from ``start`` to ``end`` (both at rest).

    Broadcasts over leading axes of ``start``/``end`` with shape ``(..., 3)``.
    Descents contribute a negative potential-energy term, which is kept.
    """
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    dz = end[..., 2] - start[..., 2]
    dist = np.hypot(end[..., 0] - start[..., 0], end[..., 1] - start[..., 1])
    v_vert = np.where(dz > 0, e.climb_speed_ms, e.descend_speed_ms)
    p_vert = np.where(dz > 0, propulsion_power(e.climb_speed_ms, e),
                      propulsion_power(e.descend_speed_ms, e))
    t_vert = np.abs(dz) / v_vert
    t_horiz = dist / e.horizontal_speed_ms
    energy = p_vert * t_vert + propulsion_power(e.horizontal_speed_ms, e) * t_horiz
    return energy + np.asarray(mass_kg) * e.gravity_ms2 * dz
