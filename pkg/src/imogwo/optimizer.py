"""IMOGWO main loop, its ablation variants, and the RD/UD baselines."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

from .encoding import (BatchObjectives, ObjectiveVector, Solution, evaluate_batch,
                       evaluate_many, random_solution)
from .operators import (GwoCoefficients, block_mask, diffusion_update, discrete_update,
                        gwo_step, keep_better_mask, qbl_step)
from .pareto import Archive, leader_indices
from .scenario import Scenario

__all__ = ["RunReport", "SolverConfig", "Variant", "run", "run_repeated", "uniform_deployment"]


class Variant(str, Enum):
    IMOGWO = "IMOGWO"
    MOGWO = "MOGWO"
    MOGWO_DIFFUSION = "MOGWO-1"
    MOGWO_QBL = "MOGWO-2"
    MOGWO_DISCRETE = "MOGWO-3"
    RD = "RD"
    UD = "UD"

    @classmethod
    def parse(cls, name: str) -> "Variant":
        for v in cls:
            if name in (v.value, v.name):
                return v
        raise ValueError(f"unknown algorithm {name!r}")


# (diffusion archive update, quasi-opposition, archive-guided reassignment)
MECHANISMS = {
    Variant.IMOGWO: (True, True, True),
    Variant.MOGWO: (False, False, False),
    Variant.MOGWO_DIFFUSION: (True, False, False),
    Variant.MOGWO_QBL: (False, True, False),
    Variant.MOGWO_DISCRETE: (False, False, True),
}


@dataclass(frozen=True)
class SolverConfig:
    g_max: int = 200
    pop: int = 20
    sigma1: float = 0.1
    sigma2: float = 0.5
    penalty_c: float = 5.0
    variant: Variant = Variant.IMOGWO
    seed: int = 0
    archive_capacity: int | None = None
    n_grid: int = 10
    include_f_in_qbl_diffusion: bool = False
    gwo_unit_box: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant)
                           if isinstance(self.variant, str) else self.variant)
        if self.g_max < 1:
            raise ValueError("g_max must be >= 1")
        if self.pop < 2:
            raise ValueError("pop must be >= 2")
        if not 0 < self.sigma1 < self.sigma2 < 1:
            raise ValueError("need 0 < sigma1 < sigma2 < 1")
        if not self.penalty_c > 1:
            raise ValueError("penalty_c must be > 1")

    @property
    def capacity(self) -> int:
        return self.archive_capacity or self.pop

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        return cls(**d)


@dataclass
class RunReport:
    """Everything one run produced.

    ``archive_trace[it]`` holds the archive's objective triples after
    iteration ``it + 1`` and ``minima_trace[it]`` their per-objective
    minima. ``iteration_seconds`` is wall-clock and is left out of the
    canonical JSON unless asked for, so reruns serialize identically.
    """

    algorithm: str
    seed: int
    m: int
    config: dict
    final_front: list[tuple[Solution, ObjectiveVector]]
    archive_trace: list[np.ndarray] = field(default_factory=list)
    minima_trace: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    iteration_seconds: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def front_values(self) -> np.ndarray:
        return np.stack([o.values for _, o in self.final_front])

    def representative(self) -> np.ndarray:
        """Per-objective minimum over the final front (one scalar per objective)."""
        return self.front_values().min(axis=0)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "m": self.m,
            "config": self.config,
            "final_front": [{"solution": sol.flatten().tolist(), "objectives": obj.to_dict()}
                            for sol, obj in self.final_front],
            "archive_trace": [np.asarray(a).tolist() for a in self.archive_trace],
            "minima_trace": np.asarray(self.minima_trace).tolist(),
        }
        if include_timing:
            d["iteration_seconds"] = np.asarray(self.iteration_seconds).tolist()
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        m = int(d["m"])
        front = [(Solution.from_flat(e["solution"], m), ObjectiveVector.from_dict(e["objectives"]))
                 for e in d["final_front"]]
        return cls(
            algorithm=d["algorithm"], seed=int(d["seed"]), m=m, config=d["config"],
            final_front=front,
            archive_trace=[np.asarray(a, dtype=float).reshape(-1, 3) for a in d["archive_trace"]],
            minima_trace=np.asarray(d["minima_trace"], dtype=float).reshape(-1, 3),
            iteration_seconds=np.asarray(d.get("iteration_seconds", []), dtype=float),
        )


def _members(x: np.ndarray, a: np.ndarray, ev: BatchObjectives, m: int, rows=None):
    rows = range(x.shape[0]) if rows is None else rows
    return [(Solution.from_arrays(x[i], a[i], m), ev.vector(i)) for i in rows]


def _take(ev: BatchObjectives, new: BatchObjectives, mask: np.ndarray) -> BatchObjectives:
    return BatchObjectives(*(np.where(mask[:, None] if o.ndim == 2 else mask, n, o)
                             for o, n in zip(ev, new)))


def _grid_shape(m: int) -> tuple[int, int]:
    rows = max(d for d in range(1, int(np.sqrt(m)) + 1) if m % d == 0)
    return rows, m // rows


def uniform_deployment(s: Scenario, rng: np.random.Generator) -> Solution:
    """UAVs cell-centered on a near-square grid at mid altitude, equal power split,
    mid-range allocation and offload, random assignment."""
    b = s.bounds
    rows, cols = _grid_shape(s.m)
    w, h = (b.xy_max - b.xy_min) / cols, (b.xy_max - b.xy_min) / rows
    z = (b.z_min + b.z_max) / 2
    q = [(b.xy_min + (c + 0.5) * w, b.xy_min + (r + 0.5) * h, z)
         for r in range(rows) for c in range(cols)]
    p = np.full(s.k, np.clip(b.p_total_w / s.k, b.p_min, b.p_max))
    f = np.full(s.k, (b.f_u_min + b.f_u_max) / 2)
    c = s.task_bits / 2
    assign = rng.integers(1, s.m + 1, s.k)
    return Solution(np.array(q), p, f, c, assign)


def _baseline(s: Scenario, cfg: SolverConfig, rng: np.random.Generator) -> RunReport:
    if cfg.variant is Variant.RD:
        sols = [random_solution(s, rng) for _ in range(cfg.pop)]
    else:
        sols = [uniform_deployment(s, rng)]
    objs = evaluate_many(sols, s, cfg.penalty_c)
    archive = Archive(cfg.capacity, cfg.n_grid).update(zip(sols, objs), rng)
    return RunReport(cfg.variant.value, cfg.seed, s.m, cfg.to_dict(), list(archive.members))


def run(s: Scenario, cfg: SolverConfig) -> RunReport:
    """Run one optimization; deterministic for a fixed ``cfg.seed``."""
    rng = np.random.default_rng(cfg.seed)
    if cfg.variant in (Variant.RD, Variant.UD):
        return _baseline(s, cfg, rng)
    use_diffusion, use_qbl, use_discrete = MECHANISMS[cfg.variant]
    m, k, n, g_max = s.m, s.k, cfg.pop, cfg.g_max
    pen = cfg.penalty_c
    lo, hi = s.continuous_bounds
    qbl_mask = block_mask(s, f=cfg.include_f_in_qbl_diffusion)

    init = [random_solution(s, rng) for _ in range(n)]
    x = np.stack([sol.continuous() for sol in init])
    a = np.stack([sol.assign for sol in init])
    ev = evaluate_batch(x, a, s, pen)
    archive = Archive(cfg.capacity, cfg.n_grid).update(_members(x, a, ev, m), rng)

    def accept(x_new, a_new):
        nonlocal x, a, ev
        ev_new = evaluate_batch(x_new, a_new, s, pen)
        take = keep_better_mask(ev.values, ev_new.values, rng)
        x = np.where(take[:, None], x_new, x)
        a = np.where(take[:, None], a_new, a)
        ev = _take(ev, ev_new, take)

    archive_trace, minima, seconds = [], np.zeros((g_max, 3)), np.zeros(g_max)
    t0 = time.perf_counter()
    for it in range(1, g_max + 1):
        guide = archive
        if not len(guide):
            guide = Archive(n, cfg.n_grid).update(_members(x, a, ev, m), rng)
        guide_x = np.stack([sol.continuous() for sol in guide.solutions])
        leaders = guide_x[np.stack([leader_indices(guide, rng) for _ in range(n)])]
        coef = GwoCoefficients.draw(it, g_max, leaders.shape, rng)
        if cfg.gwo_unit_box:
            span = hi - lo
            moved = lo + gwo_step((x - lo) / span, (leaders - lo) / span, coef) * span
        else:
            moved = gwo_step(x, leaders, coef)
        accept(np.clip(moved, lo, hi), a)

        if use_discrete:
            a_new = np.stack([discrete_update(a[i], archive, cfg.sigma1, cfg.sigma2, rng, m)
                              for i in range(n)])
        else:
            a_new = rng.integers(1, m + 1, (n, k))
        accept(x, a_new)

        if use_qbl:
            accept(qbl_step(x, lo, hi, qbl_mask, rng), a)

        archive.update(_members(x, a, ev, m), rng)

        if use_diffusion and len(archive):
            src = archive.members
            offspring = diffusion_update(src, it, g_max, rng, s, cfg.include_f_in_qbl_diffusion)
            off_obj = evaluate_many(offspring, s, pen)
            take = keep_better_mask(np.stack([o.values for _, o in src]),
                                    np.stack([o.values for o in off_obj]), rng)
            archive.members = [(offspring[i], off_obj[i]) if take[i] else src[i]
                               for i in range(len(src))]
            # a replaced source that held an objective's minimum stays in the
            # pool so per-objective bests never regress
            best = set(np.argmin(np.stack([o.values for _, o in src]), axis=0).tolist())
            archive.update([src[i] for i in sorted(best) if take[i]], rng)

        vals = archive.values()
        archive_trace.append(vals)
        minima[it - 1] = vals.min(axis=0)
        seconds[it - 1] = time.perf_counter() - t0

    return RunReport(cfg.variant.value, cfg.seed, m, cfg.to_dict(), list(archive.members),
                     archive_trace, minima, seconds)


def _run_star(args):
    return run(*args)


def run_repeated(s: Scenario, cfg: SolverConfig, n_runs: int = 30,
                 workers: int | None = None) -> list[RunReport]:
    """Independent runs with seeds ``cfg.seed + r``; results are in seed order."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    jobs = [(s, replace(cfg, seed=cfg.seed + r)) for r in range(n_runs)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_star, jobs))
    return [run(*job) for job in jobs]
