"""Candidate encoding, repair, and objective/constraint evaluation.

A solution is five blocks: UAV hover positions ``q`` (M x 3), SN transmit
powers ``p``, the compressed per-SN computing allocation ``f_alloc`` (the
share granted by the SN's own UAV), offloaded bits ``c_offload``, and the
1-based UAV index ``assign`` of every SN. The continuous part is laid out
flat as ``[q.ravel(), p, f_alloc, c_offload]`` (length ``3M + 3K``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import physics
from .scenario import Scenario

__all__ = [
    "DEAD_LINK_DELAY_S",
    "BatchObjectives",
    "MakespanInstance",
    "ObjectiveVector",
    "Solution",
    "delay_breakdown",
    "evaluate",
    "evaluate_batch",
    "evaluate_many",
    "makespan_fixture",
    "random_solution",
    "repair",
    "repair_arrays",
]

DEAD_LINK_DELAY_S = 1.0e9
DEFAULT_PENALTY = 5.0


@dataclass(eq=False)
class Solution:
    q: np.ndarray
    p: np.ndarray
    f_alloc: np.ndarray
    c_offload: np.ndarray
    assign: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).reshape(-1, 3)
        self.p = np.asarray(self.p, dtype=float)
        self.f_alloc = np.asarray(self.f_alloc, dtype=float)
        self.c_offload = np.asarray(self.c_offload, dtype=float)
        self.assign = np.asarray(self.assign, dtype=np.int64)

    @property
    def m(self) -> int:
        return self.q.shape[0]

    @property
    def k(self) -> int:
        return self.p.shape[0]

    def continuous(self) -> np.ndarray:
        return np.concatenate([self.q.ravel(), self.p, self.f_alloc, self.c_offload])

    def flatten(self) -> np.ndarray:
        """All ``3M + 4K`` decision variables, assignment last."""
        return np.concatenate([self.continuous(), self.assign.astype(float)])

    @classmethod
    def from_arrays(cls, x: np.ndarray, assign: np.ndarray, m: int) -> "Solution":
        k = assign.shape[0]
        o = 3 * m
        return cls(x[:o].reshape(m, 3).copy(), x[o:o + k].copy(), x[o + k:o + 2 * k].copy(),
                   x[o + 2 * k:o + 3 * k].copy(), np.array(assign, dtype=np.int64))

    @classmethod
    def from_flat(cls, flat: Sequence[float], m: int) -> "Solution":
        flat = np.asarray(flat, dtype=float)
        k = (flat.size - 3 * m) // 4
        if flat.size != 3 * m + 4 * k:
            raise ValueError(f"flat vector of length {flat.size} does not fit M={m}")
        return cls.from_arrays(flat[:3 * m + 3 * k], np.rint(flat[3 * m + 3 * k:]).astype(np.int64), m)

    def copy(self) -> "Solution":
        return Solution(self.q.copy(), self.p.copy(), self.f_alloc.copy(),
                        self.c_offload.copy(), self.assign.copy())

    def __eq__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(
            (self.q, self.p, self.f_alloc, self.c_offload, self.assign),
            (other.q, other.p, other.f_alloc, other.c_offload, other.assign)))

    def to_dict(self) -> dict:
        return {"q": self.q.tolist(), "p": self.p.tolist(), "f_alloc": self.f_alloc.tolist(),
                "c_offload": self.c_offload.tolist(), "assign": self.assign.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Solution":
        return cls(d["q"], d["p"], d["f_alloc"], d["c_offload"], d["assign"])


@dataclass(frozen=True)
class ObjectiveVector:
    """Delay [s], motion energy [J], peak computing resource [Hz].

    ``feasible`` is True iff every constraint holds and every offloaded bit
    has a live link. ``penalized`` marks a broken power budget or safety
    distance; the three values are then already multiplied by the penalty
    constant.
    """

    f1_s: float
    f2_j: float
    f3_hz: float
    feasible: bool = True
    penalized: bool = False

    @property
    def values(self) -> np.ndarray:
        return np.array([self.f1_s, self.f2_j, self.f3_hz])

    def raw(self, penalty: float = DEFAULT_PENALTY) -> np.ndarray:
        """Objective values with the penalty factor divided back out."""
        return self.values / penalty if self.penalized else self.values

    def to_dict(self) -> dict:
        return {"f1_s": self.f1_s, "f2_j": self.f2_j, "f3_hz": self.f3_hz,
                "feasible": self.feasible, "penalized": self.penalized}

    @classmethod
    def from_dict(cls, d: dict) -> "ObjectiveVector":
        return cls(float(d["f1_s"]), float(d["f2_j"]), float(d["f3_hz"]),
                   bool(d["feasible"]), bool(d["penalized"]))


class BatchObjectives(NamedTuple):
    values: np.ndarray       # (N, 3), penalty applied
    feasible: np.ndarray     # (N,)
    penalized: np.ndarray    # (N,)
    local_max: np.ndarray    # (N,) largest local delay
    uav_max: np.ndarray      # (N,) largest per-UAV edge load

    def vector(self, n: int) -> ObjectiveVector:
        f1, f2, f3 = self.values[n]
        return ObjectiveVector(float(f1), float(f2), float(f3),
                               bool(self.feasible[n]), bool(self.penalized[n]))


def random_solution(s: Scenario, rng: np.random.Generator) -> Solution:
    lo, hi = s.continuous_bounds
    x = rng.uniform(lo, hi)
    assign = rng.integers(1, s.m + 1, s.k)
    return Solution.from_arrays(x, assign, s.m)


def repair_arrays(x: np.ndarray, assign: np.ndarray, s: Scenario):
    """Clamp continuous values into bounds and assignments into ``[1, M]``."""
    lo, hi = s.continuous_bounds
    return np.clip(x, lo, hi), np.clip(assign, 1, s.m)


def repair(sol: Solution, s: Scenario) -> Solution:
    x, a = repair_arrays(sol.continuous(), sol.assign, s)
    return Solution.from_arrays(x, a, s.m)


def _fleet_energy(s: Scenario, q: np.ndarray) -> np.ndarray:
    start = s.uav_start
    if s.homogeneous_energy:
        return physics.motion_energy(start, q, s.uav_mass, s.energy).sum(axis=-1)
    per_uav = [physics.motion_energy(start[i], q[..., i, :], u.mass_kg, u.energy)
               for i, u in enumerate(s.uavs)]
    return np.sum(per_uav, axis=0)


def evaluate_batch(x: np.ndarray, assign: np.ndarray, s: Scenario,
                   penalty: float = DEFAULT_PENALTY) -> BatchObjectives:
    """Evaluate ``N`` repaired candidates at once.

    ``x`` has shape ``(N, 3M + 3K)`` and ``assign`` shape ``(N, K)``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    assign = np.atleast_2d(np.asarray(assign))
    n, m, k = x.shape[0], s.m, s.k
    o = 3 * m
    q = x[:, :o].reshape(n, m, 3)
    p = x[:, o:o + k]
    f_alloc = x[:, o + k:o + 2 * k]
    c_off = x[:, o + 2 * k:o + 3 * k]
    idx = assign - 1

    hover = np.take_along_axis(q, idx[..., None], axis=1)             # (N, K, 3)
    horiz = hover[..., :2] - s.sensor_xy
    dist = np.sqrt(np.einsum("nkd,nkd->nk", horiz, horiz) + hover[..., 2] ** 2)
    ch = s.channel
    d_forest = ch.forest_fraction * dist
    pl = (physics.forest_path_loss(ch.carrier_mhz, d_forest)
          + physics.free_space_path_loss(ch.carrier_mhz, dist - d_forest))
    rate = physics.link_rate(p, pl, ch)

    cyc = s.cycles_per_bit
    t_local = (s.task_bits - c_off) * cyc / s.local_cpu_hz
    active = c_off > 0
    dead = np.any(active & (rate <= 0), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_edge = np.where(active, c_off / rate + c_off * cyc / f_alloc, 0.0)
    t_edge = np.where(np.isfinite(t_edge), t_edge, 0.0)

    onehot = idx[..., None] == np.arange(m)                            # (N, K, M)
    loads = np.einsum("nk,nkm->nm", t_edge, onehot)
    local_max = t_local.max(axis=1)
    uav_max = loads.max(axis=1)
    f1 = np.where(dead, DEAD_LINK_DELAY_S, np.maximum(local_max, uav_max))
    f2 = _fleet_energy(s, q)
    f3 = np.where(onehot, f_alloc[..., None], 0.0).max(axis=1).max(axis=1)

    b = s.bounds
    over_budget = p.sum(axis=1) > b.p_total_w * (1 + 1e-12)
    if m > 1:
        iu, ju = np.triu_indices(m, 1)
        gaps = np.linalg.norm(q[:, iu] - q[:, ju], axis=-1)
        too_close = np.any(gaps < b.safe_distance_m, axis=1)
    else:
        too_close = np.zeros(n, dtype=bool)
    penalized = over_budget | too_close

    values = np.column_stack([f1, f2, f3])
    values = np.where(penalized[:, None], values * penalty, values)
    return BatchObjectives(values, ~dead & ~penalized, penalized, local_max, uav_max)


def evaluate(sol: Solution, s: Scenario, penalty: float = DEFAULT_PENALTY) -> ObjectiveVector:
    return evaluate_batch(sol.continuous()[None], sol.assign[None], s, penalty).vector(0)


def evaluate_many(solutions: Sequence[Solution], s: Scenario,
                  penalty: float = DEFAULT_PENALTY) -> list[ObjectiveVector]:
    if not solutions:
        return []
    x = np.stack([sol.continuous() for sol in solutions])
    a = np.stack([sol.assign for sol in solutions])
    batch = evaluate_batch(x, a, s, penalty)
    return [batch.vector(i) for i in range(len(solutions))]


def delay_breakdown(sol: Solution, s: Scenario) -> tuple[float, float]:
    """``(largest local delay, largest per-UAV edge load)``; f1 is their max."""
    batch = evaluate_batch(sol.continuous()[None], sol.assign[None], s)
    return float(batch.local_max[0]), float(batch.uav_max[0])


@dataclass(frozen=True)
class MakespanInstance:
    """Assignment-only subproblem with every task fully offloaded.

    ``delay[i, j]`` is the edge delay SN ``j`` incurs when served by UAV ``i``.
    """

    delay: np.ndarray

    def makespan(self, assign: Sequence[int]) -> float:
        a = np.asarray(assign) - 1
        m = self.delay.shape[0]
        loads = np.zeros(m)
        np.add.at(loads, a, self.delay[a, np.arange(a.size)])
        return float(loads.max())

    def solve_exhaustive(self) -> tuple[float, tuple[int, ...]]:
        m, k = self.delay.shape
        best, best_a = np.inf, None
        for a in itertools.product(range(1, m + 1), repeat=k):
            span = self.makespan(a)
            if span < best:
                best, best_a = span, a
        return best, best_a


def makespan_fixture(s: Scenario, q, p, f_alloc) -> MakespanInstance:
    """Build the per-(UAV, SN) delay matrix with offload = full task size."""
    q = np.asarray(q, dtype=float).reshape(s.m, 3)
    p = np.asarray(p, dtype=float)
    f_alloc = np.asarray(f_alloc, dtype=float)
    ch = s.channel
    horiz = q[:, None, :2] - s.sensor_xy[None]
    dist = np.sqrt((horiz**2).sum(-1) + q[:, None, 2] ** 2)
    d_forest = ch.forest_fraction * dist
    pl = (physics.forest_path_loss(ch.carrier_mhz, d_forest)
          + physics.free_space_path_loss(ch.carrier_mhz, dist - d_forest))
    rate = physics.link_rate(p[None], pl, ch)
    delay = physics.edge_delay(s.task_bits[None], s.cycles_per_bit[None], rate, f_alloc[None])
    return MakespanInstance(np.asarray(delay))
