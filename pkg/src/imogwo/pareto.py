"""Pareto dominance, the bounded grid archive, normalization, and IGD."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .encoding import ObjectiveVector, Solution

__all__ = [
    "Archive",
    "NormalizedFront",
    "RemovalRecord",
    "archive_update",
    "dominates",
    "grid_cells",
    "igd",
    "nondominated_mask",
    "normalize",
    "select_leaders",
]

Member = tuple[Solution, ObjectiveVector]


def _as_values(v) -> np.ndarray:
    return v.values if isinstance(v, ObjectiveVector) else np.asarray(v, dtype=float)


def dominates(a, b) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and better somewhere."""
    a, b = _as_values(a), _as_values(b)
    return bool(np.all(a <= b) and np.any(a < b))


def nondominated_mask(values: np.ndarray) -> np.ndarray:
    """Mask of non-dominated rows; exact duplicates keep only their first row."""
    f = np.asarray(values, dtype=float)
    n = f.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    le = np.all(f[:, None, :] <= f[None, :, :], axis=2)   # le[j, i]: f_j <= f_i
    lt = np.any(f[:, None, :] < f[None, :, :], axis=2)
    dominated = np.any(le & lt, axis=0)
    same = le & le.T
    earlier_dup = np.any(np.tril(same, -1), axis=1)
    return ~dominated & ~earlier_dup


def grid_cells(values: np.ndarray, n_grid: int = 10) -> np.ndarray:
    """Per-objective cell indices over the set's own min/max range."""
    f = np.asarray(values, dtype=float)
    lo, hi = f.min(axis=0), f.max(axis=0)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    cells = np.floor((f - lo) / safe * n_grid).astype(np.int64)
    cells = np.where(span > 0, cells, 0)
    return np.clip(cells, 0, n_grid - 1)


def _occupancy(cells: np.ndarray) -> np.ndarray:
    _, inverse, counts = np.unique(cells, axis=0, return_inverse=True, return_counts=True)
    return counts[inverse.ravel()]


@dataclass(frozen=True)
class RemovalRecord:
    values: tuple[float, float, float]
    occupancy: int
    max_eligible_occupancy: int


@dataclass
class Archive:
    """Bounded non-dominated set with a hypercube grid for crowding.

    Candidates flagged infeasible are admitted only while no feasible
    solution is on hand. When over capacity, members are dropped one at a
    time from the most crowded cell (uniformly within it). The current
    minimizer of each objective is never dropped, so with a capacity of at
    least three the per-objective best values never regress.
    """

    capacity: int = 20
    n_grid: int = 10
    members: list[Member] = field(default_factory=list)
    removal_log: list[RemovalRecord] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def solutions(self) -> list[Solution]:
        return [s for s, _ in self.members]

    @property
    def objectives(self) -> list[ObjectiveVector]:
        return [o for _, o in self.members]

    def values(self) -> np.ndarray:
        if not self.members:
            return np.zeros((0, 3))
        return np.stack([o.values for _, o in self.members])

    def occupancy(self) -> np.ndarray:
        if not self.members:
            return np.zeros(0, dtype=np.int64)
        return _occupancy(grid_cells(self.values(), self.n_grid))

    def update(self, candidates: Iterable[Member], rng: np.random.Generator) -> "Archive":
        pool = list(self.members) + list(candidates)
        if not pool:
            return self
        feasible = np.array([o.feasible for _, o in pool])
        if feasible.any():
            pool = [mem for mem, ok in zip(pool, feasible) if ok]
        f = np.stack([o.values for _, o in pool])
        keep = nondominated_mask(f)
        pool = [mem for mem, ok in zip(pool, keep) if ok]
        self.removal_log = []
        while len(pool) > self.capacity:
            pool = self._drop_one(pool, rng)
        self.members = pool
        return self

    def _drop_one(self, pool: list[Member], rng: np.random.Generator) -> list[Member]:
        f = np.stack([o.values for _, o in pool])
        occ = _occupancy(grid_cells(f, self.n_grid))
        eligible = np.ones(len(pool), dtype=bool)
        eligible[np.argmin(f, axis=0)] = False
        if not eligible.any():      # capacity below the number of distinct minimizers
            eligible[:] = True
        top = occ[eligible].max()
        choices = np.flatnonzero(eligible & (occ == top))
        victim = int(choices[rng.integers(choices.size)])
        self.removal_log.append(RemovalRecord(tuple(float(v) for v in f[victim]),
                                              int(occ[victim]), int(top)))
        return pool[:victim] + pool[victim + 1:]


def archive_update(arch: Archive, candidates: Iterable[Member],
                   rng: np.random.Generator) -> Archive:
    return arch.update(candidates, rng)


def leader_indices(arch: Archive, rng: np.random.Generator) -> np.ndarray:
    """Indices of the alpha, beta, delta leaders (roulette on 1/occupancy)."""
    n = len(arch)
    if n == 0:
        raise ValueError("cannot select leaders from an empty archive")
    w = 1.0 / arch.occupancy()
    w = w / w.sum()
    return rng.choice(n, size=3, replace=n < 3, p=w)


def select_leaders(arch: Archive, rng: np.random.Generator) -> tuple[Solution, Solution, Solution]:
    a, b, d = leader_indices(arch, rng)
    return arch.members[a][0], arch.members[b][0], arch.members[d][0]


@dataclass(frozen=True)
class NormalizedFront:
    points: np.ndarray
    mins: np.ndarray
    maxs: np.ndarray

    def apply(self, values) -> np.ndarray:
        """Map other objective vectors with this front's affine map."""
        f = _stack(values)
        span = self.maxs - self.mins
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (f - self.mins) / safe, 0.0)


def _stack(front) -> np.ndarray:
    if len(front) and isinstance(front[0], ObjectiveVector):
        return np.stack([o.values for o in front])
    return np.atleast_2d(np.asarray(front, dtype=float))


def normalize(front: Sequence) -> NormalizedFront:
    f = _stack(front)
    if f.shape[0] == 0:
        raise ValueError("cannot normalize an empty front")
    lo, hi = f.min(axis=0), f.max(axis=0)
    nf = NormalizedFront(np.zeros_like(f), lo, hi)
    return NormalizedFront(nf.apply(f), lo, hi)


def igd(front, reference) -> float:
    """Mean distance from each reference point to its nearest front point."""
    a = _stack(front)
    r = _stack(reference)
    d = np.linalg.norm(r[:, None, :] - a[None, :, :], axis=-1)
    return float(d.min(axis=1).mean())
