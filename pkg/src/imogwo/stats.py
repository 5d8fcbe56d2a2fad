"""Per-objective summaries, rank-sum significance, and percentage gain.

All samples are one scalar per run. ``summarize`` uses the population
standard deviation (``ddof=0``).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import mannwhitneyu

__all__ = [
    "COMPARISON_COLUMNS",
    "ComparisonRow",
    "ObjectiveSample",
    "UndefinedGainError",
    "comparison_rows",
    "gain",
    "rows_to_csv",
    "summarize",
    "wilcoxon_rank_sum",
]

OBJECTIVES = ("f1", "f2", "f3")
COMPARISON_COLUMNS = ("algorithm", "objective", "mean", "std", "max", "min",
                      "p_value", "verdict", "gain_pct")
ALPHA = 0.05


class UndefinedGainError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class ObjectiveSample:
    algorithm: str
    objective: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("empty sample")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        object.__setattr__(self, "values", v)


def summarize(sample) -> tuple[float, float, float, float]:
    """(mean, std, max, min) with population std."""
    v = np.asarray(getattr(sample, "values", sample), dtype=float).ravel()
    if v.size == 0:
        raise ValueError("cannot summarize an empty sample")
    return float(v.mean()), float(v.std()), float(v.max()), float(v.min())


def wilcoxon_rank_sum(a, b) -> tuple[float, str]:
    """Two-sided rank-sum p-value (normal approximation, tie and continuity
    corrected) and a verdict for ``a`` against ``b``; lower is better.
    """
    a = np.asarray(getattr(a, "values", a), dtype=float).ravel()
    b = np.asarray(getattr(b, "values", b), dtype=float).ravel()
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least two values")
    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return 1.0, "="
    p = float(mannwhitneyu(a, b, use_continuity=True, alternative="two-sided",
                           method="asymptotic").pvalue)
    p = min(max(p, 0.0), 1.0)
    if p < ALPHA and a.mean() != b.mean():
        return p, "+" if a.mean() < b.mean() else "-"
    return p, "="


def gain(best, runner_up) -> float:
    """Percent improvement of ``best``'s mean over ``runner_up``'s mean."""
    mb = float(np.mean(getattr(best, "values", best)))
    mr = float(np.mean(getattr(runner_up, "values", runner_up)))
    if mr == 0:
        raise UndefinedGainError("runner-up mean is zero; gain undefined")
    return (mr - mb) / mr * 100.0


@dataclass(frozen=True)
class ComparisonRow:
    algorithm: str
    objective: str
    mean: float
    std: float
    max: float
    min: float
    p_value: float | None
    verdict: str
    gain_pct: float | None

    def as_list(self) -> list:
        return [getattr(self, c) for c in COMPARISON_COLUMNS]


def comparison_rows(samples: Mapping[str, np.ndarray], reference: str) -> list[ComparisonRow]:
    """Table rows for every algorithm and objective.

    ``samples`` maps algorithm tag to an (n_runs, 3) array of per-run
    representatives. Every other algorithm is tested against ``reference``.
    The reference row carries the gain over the best other algorithm on
    that objective (negative when the reference is not the best); its
    ``p_value`` and verdict are left blank.
    """
    if reference not in samples:
        raise KeyError(f"reference algorithm {reference!r} has no sample")
    arrs = {k: np.asarray(v, dtype=float).reshape(-1, 3) for k, v in samples.items()}
    sizes = {v.shape[0] for v in arrs.values()}
    if len(sizes) != 1:
        raise ValueError("sample sizes differ across algorithms")
    rows = []
    for j, obj in enumerate(OBJECTIVES):
        ref = arrs[reference][:, j]
        others = {k: v[:, j] for k, v in arrs.items() if k != reference}
        g = None
        if others:
            runner = min(others.values(), key=lambda v: v.mean())
            g = gain(ref, runner) if runner.mean() != 0 else None
        rows.append(ComparisonRow(reference, obj, *summarize(ref), None, "", g))
        for name, vals in others.items():
            p, verdict = wilcoxon_rank_sum(ref, vals)
            rows.append(ComparisonRow(name, obj, *summarize(vals), p, verdict, None))
    return rows


def rows_to_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARISON_COLUMNS)
    for r in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v)
                    for v in r.as_list()])
    return buf.getvalue()
