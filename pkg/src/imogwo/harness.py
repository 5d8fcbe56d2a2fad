"""Experiment orchestration: run plans, per-run artifacts, tables, IGD, drift.

Outputs of :func:`run_experiment` in ``out_dir``::

    scenario.json           the shared instance
    runs/<ALG>_s<seed>.json one RunReport per run (no wall-clock)
    results.csv             comparison table, rebuilt from runs/ alone
    manifest.json           seeds, files, scenario and config hashes
    timings.json            wall-clock per run (kept out of the manifest)

Kinds ``igd`` and ``drift`` additionally write ``igd.csv``/``drift.csv``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .encoding import Solution, delay_breakdown, evaluate
from .optimizer import RunReport, SolverConfig, Variant, run
from .pareto import igd, nondominated_mask, normalize
from .scenario import Scenario, ScenarioConfig, generate_scenario, load_scenario, scenario_to_json
from .stats import comparison_rows, rows_to_csv

__all__ = [
    "DEFAULT_ALGORITHMS",
    "DRIFT_LEVELS_M",
    "ExperimentPlan",
    "MissingRunFileError",
    "RunFailedError",
    "drift_rows",
    "drift_csv",
    "igd_rows",
    "igd_csv",
    "load_reports",
    "manifest_hash",
    "results_csv",
    "run_experiment",
    "workers_from_env",
]

KINDS = ("tables", "ablation", "igd", "drift", "distributions")
DEFAULT_ALGORITHMS = {
    "tables": ("IMOGWO", "MOGWO", "RD", "UD"),
    "ablation": ("MOGWO", "MOGWO-1", "MOGWO-2", "MOGWO-3", "IMOGWO"),
    "igd": ("IMOGWO",),
    "drift": ("IMOGWO",),
    "distributions": ("IMOGWO", "MOGWO"),
}
DRIFT_LEVELS_M = (0.2, 0.4, 0.6, 0.8, 1.0)
DIST_TAGS = {"uniform": "U", "gaussian": "G", "exponential": "E"}
WORKERS_ENV = "IMOGWO_WORKERS"


class RunFailedError(RuntimeError):
    def __init__(self, algorithm: str, seed: int, cause: BaseException):
        super().__init__(f"run {algorithm} seed={seed} failed: {cause!r}")
        self.algorithm = algorithm
        self.seed = seed


class MissingRunFileError(FileNotFoundError):
    def __init__(self, path):
        super().__init__(f"run file not found: {path}")
        self.path = str(path)


def workers_from_env() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(n, 1)


@dataclass(frozen=True)
class ExperimentPlan:
    kind: str
    out_dir: Path
    scenario_path: Path | None = None
    scenario_config: ScenarioConfig = field(default_factory=ScenarioConfig)
    scenario_seed: int = 1
    algorithms: tuple[str, ...] = ()
    n_runs: int = 30
    solver: SolverConfig = field(default_factory=SolverConfig)
    drift_levels: tuple[float, ...] = DRIFT_LEVELS_M
    drift_draws: int = 30

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        algs = tuple(self.algorithms) or DEFAULT_ALGORITHMS[self.kind]
        for a in algs:
            Variant.parse(a)
        object.__setattr__(self, "algorithms", algs)
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if self.kind == "distributions" and self.scenario_path is not None:
            raise ValueError("the distributions kind generates its own scenarios; drop the scenario path")

    def scenario(self) -> Scenario:
        if self.scenario_path is not None:
            return load_scenario(self.scenario_path)
        return generate_scenario(self.scenario_config, self.scenario_seed)


def manifest_hash(s: Scenario, cfg: SolverConfig) -> str:
    """sha256 over the scenario's canonical JSON and the solver config."""
    h = hashlib.sha256(scenario_to_json(s).encode())
    h.update(b"\0")
    h.update(json.dumps(cfg.to_dict(), sort_keys=True).encode())
    return h.hexdigest()


def _run_file(algorithm: str, seed: int) -> str:
    return f"runs/{algorithm}_s{seed}.json"


def _job(args):
    s, cfg = args
    try:
        return run(s, cfg), None
    except Exception as exc:  # reported with its seed by the caller
        return None, exc


def _execute(s: Scenario, jobs: list[SolverConfig], workers: int) -> list[RunReport]:
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_job, [(s, c) for c in jobs]))
    else:
        results = [_job((s, c)) for c in jobs]
    out = []
    for cfg, (rep, exc) in zip(jobs, results):
        if exc is not None:
            raise RunFailedError(cfg.variant.value, cfg.seed, exc) from exc
        out.append(rep)
    return out


def _run_single(plan: ExperimentPlan, s: Scenario, out: Path, workers: int) -> list[RunReport]:
    (out / "runs").mkdir(parents=True, exist_ok=True)
    (out / "scenario.json").write_text(scenario_to_json(s))
    jobs = [replace(plan.solver, variant=Variant.parse(a), seed=plan.solver.seed + r)
            for a in plan.algorithms for r in range(plan.n_runs)]
    reports = _execute(s, jobs, workers)

    entries, timings = [], {}
    for cfg, rep in zip(jobs, reports):
        name = _run_file(cfg.variant.value, cfg.seed)
        (out / name).write_text(rep.to_json())
        entries.append({"algorithm": cfg.variant.value, "seed": cfg.seed, "file": name,
                        "config_sha256": manifest_hash(s, cfg)})
        total = float(rep.iteration_seconds[-1]) if len(rep.iteration_seconds) else 0.0
        timings[name] = total
    manifest = {
        "kind": plan.kind,
        "algorithms": list(plan.algorithms),
        "n_runs": plan.n_runs,
        "scenario_file": "scenario.json",
        "scenario_sha256": hashlib.sha256(scenario_to_json(s).encode()).hexdigest(),
        "solver": plan.solver.to_dict(),
        "runs": entries,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
    (out / "timings.json").write_text(json.dumps(timings, indent=1, sort_keys=True))
    (out / "results.csv").write_text(results_csv(out))
    return reports


def run_experiment(plan: ExperimentPlan, workers: int | None = None) -> dict[str, list[RunReport]]:
    """Execute ``plan`` and write its artifacts; returns reports keyed by algorithm
    (or by ``<ALG>_<U|G|E>`` for the distributions kind)."""
    workers = workers_from_env() if workers is None else workers
    out = plan.out_dir
    out.mkdir(parents=True, exist_ok=True)
    grouped: dict[str, list[RunReport]] = {}

    if plan.kind == "distributions":
        tables = []
        for dist, tag in DIST_TAGS.items():
            sub = replace(plan, kind="tables", out_dir=out / dist, algorithms=plan.algorithms,
                          scenario_config=replace(plan.scenario_config, distribution=dist))
            for rep in _run_single(sub, sub.scenario(), sub.out_dir, workers):
                grouped.setdefault(f"{rep.algorithm}_{tag}", []).append(rep)
            tables.append((tag, sub.out_dir))
        (out / "results.csv").write_text(_tagged_results(tables))
        return grouped

    s = plan.scenario()
    for rep in _run_single(plan, s, out, workers):
        grouped.setdefault(rep.algorithm, []).append(rep)
    if plan.kind == "igd":
        (out / "igd.csv").write_text(igd_csv(out))
    if plan.kind == "drift":
        first = grouped[plan.algorithms[0]][0]
        (out / "drift.csv").write_text(
            drift_csv(drift_rows(s, first, plan.drift_levels, plan.drift_draws, plan.solver.seed)))
    return grouped


# -- re-derivation from run files --------------------------------------------

def load_reports(out_dir) -> dict[str, list[RunReport]]:
    """Reports listed in ``out_dir/manifest.json``, in manifest order."""
    out = Path(out_dir)
    mpath = out / "manifest.json"
    if not mpath.exists():
        raise MissingRunFileError(mpath)
    manifest = json.loads(mpath.read_text())
    grouped: dict[str, list[RunReport]] = {}
    for e in manifest["runs"]:
        path = out / e["file"]
        if not path.exists():
            raise MissingRunFileError(path)
        rep = RunReport.from_dict(json.loads(path.read_text()))
        grouped.setdefault(rep.algorithm, []).append(rep)
    return grouped


def _reference_name(grouped) -> str:
    return "IMOGWO" if "IMOGWO" in grouped else next(iter(grouped))


def results_csv(out_dir) -> str:
    grouped = load_reports(out_dir)
    samples = {k: np.stack([r.representative() for r in v]) for k, v in grouped.items()}
    return rows_to_csv(comparison_rows(samples, _reference_name(samples)))


def _tagged_results(tables) -> str:
    out = io.StringIO()
    for i, (tag, path) in enumerate(tables):
        lines = results_csv(path).splitlines()
        if i == 0:
            out.write(lines[0] + "\n")
        for line in lines[1:]:
            alg, rest = line.split(",", 1)
            out.write(f"{alg}_{tag},{rest}\n")
    return out.getvalue()


# -- IGD ---------------------------------------------------------------------

IGD_COLUMNS = ("algorithm", "seed", "iteration", "igd", "mean_igd")


def igd_rows(reports: Sequence[RunReport]) -> list[tuple]:
    """Per-iteration IGD of each run's archive against the pooled reference.

    The reference is the non-dominated union of every final front in
    ``reports``; everything is normalized with the reference's own range.
    ``mean_igd`` averages over runs of the same algorithm.
    """
    runs = [r for r in reports if len(r.archive_trace)]
    if not runs:
        raise ValueError("no run carries an archive trace")
    pooled = np.concatenate([r.front_values() for r in reports])
    ref = normalize(pooled[nondominated_mask(pooled)])
    per_run = np.array([[igd(ref.apply(a), ref.points) for a in r.archive_trace] for r in runs])
    rows = []
    for alg in dict.fromkeys(r.algorithm for r in runs):
        idx = [i for i, r in enumerate(runs) if r.algorithm == alg]
        mean = per_run[idx].mean(axis=0)
        for i in idx:
            for it, v in enumerate(per_run[i]):
                rows.append((alg, runs[i].seed, it + 1, float(v), float(mean[it])))
    return rows


def igd_csv(out_dir) -> str:
    grouped = load_reports(out_dir)
    return _csv(IGD_COLUMNS, igd_rows([r for v in grouped.values() for r in v]))


# -- drift -------------------------------------------------------------------

DRIFT_COLUMNS = ("max_drift_m", "draws", "f1_base_s", "f2_base_j", "f1_mean_s", "f2_mean_j",
                 "f1_change_pct", "f2_change_pct", "local_branch", "f1_unchanged_frac")


def drift_offsets(level: float, m: int, rng: np.random.Generator) -> np.ndarray:
    """(m, 3) zero-mean normal displacements, per-axis sd ``level/3``, norms clamped to ``level``."""
    d = rng.normal(0.0, level / 3.0, (m, 3)) if level > 0 else np.zeros((m, 3))
    norm = np.linalg.norm(d, axis=1, keepdims=True)
    scale = np.where(norm > level, level / np.where(norm > 0, norm, 1.0), 1.0)
    return d * scale


def drift_rows(s: Scenario, report: RunReport, levels: Sequence[float] = DRIFT_LEVELS_M,
               draws: int = 30, seed: int = 0) -> list[tuple]:
    """Perturb the f1-minimal front member's hovering positions.

    Objectives are reported without the constraint penalty so a drift that
    brushes the safety distance does not masquerade as a fivefold jump.
    """
    rng = np.random.default_rng(seed)
    pen = float(report.config.get("penalty_c", 5.0))
    sol, obj = min(report.final_front, key=lambda m: m[1].f1_s)
    base = obj.raw(pen)
    local, edge = delay_breakdown(sol, s)
    rows = []
    for level in levels:
        vals = np.empty((draws, 3))
        for d in range(draws):
            moved = Solution(sol.q + drift_offsets(level, s.m, rng), sol.p.copy(),
                             sol.f_alloc.copy(), sol.c_offload.copy(), sol.assign.copy())
            vals[d] = evaluate(moved, s, pen).raw(pen)
        # averaging deltas keeps an untouched objective bit-identical to its base
        f1m, f2m = base[:2] + (vals[:, :2] - base[:2]).mean(axis=0)
        rows.append((float(level), draws, float(base[0]), float(base[1]), float(f1m), float(f2m),
                     float((f1m - base[0]) / base[0] * 100), float((f2m - base[1]) / base[1] * 100),
                     bool(local >= edge), float(np.mean(vals[:, 0] == base[0]))))
    return rows


def drift_csv(rows) -> str:
    return _csv(DRIFT_COLUMNS, rows)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()
