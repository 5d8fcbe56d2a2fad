"""Search operators: grey-wolf move, quasi-opposition, diffusion resampling,
discrete reassignment, and pairwise acceptance.

Each operator has an array form acting on a whole population (rows of the
flat continuous layout from :mod:`imogwo.encoding`) and a thin per-solution
wrapper. All randomness comes from the ``rng`` argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .encoding import ObjectiveVector, Solution
from .pareto import Archive, dominates, normalize
from .scenario import Scenario

__all__ = [
    "ALPHA_EPS",
    "DiffusionSchedule",
    "GwoCoefficients",
    "block_mask",
    "diffusion_alpha",
    "diffusion_sigma",
    "diffusion_step",
    "diffusion_update",
    "discrete_update",
    "gwo_step",
    "gwo_update",
    "keep_better",
    "keep_better_mask",
    "qbl_step",
    "qbl_update",
    "random_discrete_update",
]

ALPHA_EPS = 1e-12


def block_mask(s: Scenario, q=True, p=True, f=True, c=True) -> np.ndarray:
    """Boolean mask over the flat continuous layout selecting whole blocks."""
    m, k = s.m, s.k
    return np.concatenate([np.full(3 * m, q), np.full(k, p), np.full(k, f), np.full(k, c)])


# -- grey wolf ----------------------------------------------------------------

@dataclass(frozen=True)
class GwoCoefficients:
    u: float
    U: np.ndarray
    O: np.ndarray

    @staticmethod
    def control(it: int, g_max: int) -> float:
        """Linearly decreasing control parameter, 2 at ``it = 0`` and 0 at ``g_max``."""
        return 2.0 * (1.0 - it / g_max)

    @classmethod
    def draw(cls, it: int, g_max: int, shape, rng: np.random.Generator) -> "GwoCoefficients":
        u = cls.control(it, g_max)
        U = 2.0 * u * rng.random(shape) - u
        O = 2.0 * rng.random(shape)
        return cls(u, U, O)


def gwo_step(x: np.ndarray, leaders: np.ndarray, coef: GwoCoefficients) -> np.ndarray:
    """Move rows of ``x`` (N, D) toward their leaders (N, 3, D).

    ``coef.U`` and ``coef.O`` have shape (N, 3, D). Returns the average of
    the three leader-guided positions.
    """
    gap = np.abs(coef.O * leaders - x[:, None, :])
    return (leaders - coef.U * gap).mean(axis=1)


def gwo_update(sol: Solution, leaders: Sequence[Solution], it: int, g_max: int,
               rng: np.random.Generator, s: Scenario) -> Solution:
    x = sol.continuous()[None]
    lead = np.stack([l.continuous() for l in leaders])[None]
    coef = GwoCoefficients.draw(it, g_max, lead.shape, rng)
    lo, hi = s.continuous_bounds
    new = np.clip(gwo_step(x, lead, coef)[0], lo, hi)
    return Solution.from_arrays(new, sol.assign, s.m)


# -- quasi-opposition -------------------------------------------------------

def qbl_step(x: np.ndarray, lo: np.ndarray, hi: np.ndarray, mask: np.ndarray,
             rng: np.random.Generator) -> np.ndarray:
    """Quasi-opposite point: uniform between the interval midpoint and the reflection."""
    opposite = lo + hi - x
    mid = lo + (hi - lo) / 2
    quasi = mid + rng.random(x.shape) * (opposite - mid)
    return np.where(mask, np.clip(quasi, lo, hi), x)


def qbl_update(sol: Solution, s: Scenario, rng: np.random.Generator,
               include_f: bool = False) -> Solution:
    lo, hi = s.continuous_bounds
    mask = block_mask(s, f=include_f)
    new = qbl_step(sol.continuous()[None], lo, hi, mask, rng)[0]
    return Solution.from_arrays(new, sol.assign, s.m)


# -- diffusion ----------------------------------------------------------------

def diffusion_alpha(t, g_max: int):
    """Cosine schedule ``cos^2(pi t / 2G)``; step 0 reuses step 1.

    Values are clamped to ``[0, 1 - eps]`` and anything below ``eps`` is
    snapped to zero so the schedule ends exactly at 0.
    """
    t = np.maximum(np.asarray(t, dtype=float), 1.0)
    a = np.cos(np.pi * t / (2.0 * g_max)) ** 2
    a = np.where(a < ALPHA_EPS, 0.0, a)
    return np.clip(a, 0.0, 1.0 - ALPHA_EPS)


def diffusion_sigma(t, g_max: int):
    a_t = diffusion_alpha(t, g_max)
    a_next = diffusion_alpha(np.asarray(t) + 1, g_max)
    ratio = (1.0 - a_next) / (1.0 - a_t) - 1.0
    return np.sqrt(np.maximum(0.0, ratio) * (1.0 - a_next))


@dataclass(frozen=True)
class DiffusionSchedule:
    """Schedule values at reverse step ``t = g_max - it + 1``."""

    t: int
    g_max: int

    @classmethod
    def at_iteration(cls, it: int, g_max: int) -> "DiffusionSchedule":
        return cls(g_max - it + 1, g_max)

    @property
    def alpha(self) -> float:
        return float(diffusion_alpha(self.t, self.g_max))

    @property
    def alpha_prev(self) -> float:
        return float(diffusion_alpha(self.t - 1, self.g_max))

    @property
    def sigma(self) -> float:
        return float(diffusion_sigma(self.t, self.g_max))


def diffusion_step(z: np.ndarray, objectives: np.ndarray, sched: DiffusionSchedule,
                   rng: np.random.Generator) -> np.ndarray:
    """One training-free denoising step on unit-box coordinates ``z`` (n, d).

    Members closer to the ideal point of the normalized front get larger
    density weights; the estimate for each member is the density- and
    kernel-weighted average of all members.
    """
    fn = normalize(objectives).points
    ed = np.linalg.norm(fn - fn.min(axis=0), axis=1)
    log_pd = -ed - np.log(np.exp(-ed).sum())

    a_t, a_prev, sig = sched.alpha, sched.alpha_prev, sched.sigma
    diff = z[:, None, :] - np.sqrt(a_t) * z[None, :, :]
    log_w = log_pd[None, :] - np.einsum("ijd,ijd->ij", diff, diff) / (2.0 * (1.0 - a_t))
    log_w -= log_w.max(axis=1, keepdims=True)
    w = np.exp(log_w)
    w /= w.sum(axis=1, keepdims=True)
    z_hat = w @ z

    eps = (z - np.sqrt(a_t) * z_hat) / np.sqrt(1.0 - a_t)
    coef = np.sqrt(max(0.0, 1.0 - a_prev - sig**2))
    return np.sqrt(a_prev) * z_hat + coef * eps + sig * rng.standard_normal(z.shape)


def diffusion_update(members: Sequence[tuple[Solution, ObjectiveVector]], it: int, g_max: int,
                     rng: np.random.Generator, s: Scenario,
                     include_f: bool = False) -> list[Solution]:
    """Resample every archive member's (Q, P, C) blocks; F and A are copied."""
    if not members:
        return []
    x = np.stack([sol.continuous() for sol, _ in members])
    f = np.stack([o.values for _, o in members])
    lo, hi = s.continuous_bounds
    mask = block_mask(s, f=include_f)
    span = (hi - lo)[mask]
    z = (x[:, mask] - lo[mask]) / span
    z_new = diffusion_step(z, f, DiffusionSchedule.at_iteration(it, g_max), rng)
    out = x.copy()
    out[:, mask] = np.clip(lo[mask] + z_new * span, lo[mask], hi[mask])
    return [Solution.from_arrays(out[i], sol.assign, s.m) for i, (sol, _) in enumerate(members)]


# -- discrete assignment ------------------------------------------------------

def discrete_update(assign: np.ndarray, archive, sigma1: float, sigma2: float,
                    rng: np.random.Generator, m: int) -> np.ndarray:
    """Keep, copy from a random archive member, or regenerate the assignment.

    ``archive`` may be an :class:`Archive` or a sequence of assignment vectors.
    """
    if not 0 < sigma1 < sigma2 < 1:
        raise ValueError("need 0 < sigma1 < sigma2 < 1")
    pool = [sol.assign for sol in archive.solutions] if isinstance(archive, Archive) else list(archive)
    r = rng.random()
    if r < sigma1:
        return np.array(assign, dtype=np.int64)
    if r < sigma2 and pool:
        return np.array(pool[rng.integers(len(pool))], dtype=np.int64)
    return rng.integers(1, m + 1, len(assign))


def random_discrete_update(assign: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(1, m + 1, len(assign))


# -- acceptance ---------------------------------------------------------------

def keep_better(old: tuple[Solution, ObjectiveVector], new: tuple[Solution, ObjectiveVector],
                rng: np.random.Generator):
    """Dominance wins; mutual non-dominance is a fair coin."""
    if dominates(new[1], old[1]):
        return new
    if dominates(old[1], new[1]):
        return old
    return new if rng.random() < 0.5 else old


def keep_better_mask(old: np.ndarray, new: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Row-wise :func:`keep_better` on objective arrays; True selects ``new``.

    One coin is drawn per row regardless of outcome so the stream length
    does not depend on the data.
    """
    coin = rng.random(old.shape[0]) < 0.5
    new_dom = np.all(new <= old, axis=1) & np.any(new < old, axis=1)
    old_dom = np.all(old <= new, axis=1) & np.any(old < new, axis=1)
    return new_dom | (~old_dom & coin)
