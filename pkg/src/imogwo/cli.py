"""Command line entry point: ``imogwo {generate,experiment,igd,drift}``.

The worker count for experiments comes from ``IMOGWO_WORKERS`` (default 1).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .optimizer import RunReport, SolverConfig
from .scenario import (START_DISTRIBUTIONS, InvalidConfigError, ScenarioConfig, ScenarioParseError,
                       generate_scenario, load_scenario, save_scenario)


def _scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--uavs", type=int, default=6, help="number of UAVs (M)")
    p.add_argument("--sns", type=int, default=50, help="number of sensor nodes (K)")
    p.add_argument("--side", type=float, default=800.0, help="area side length in meters")
    p.add_argument("--dist", choices=START_DISTRIBUTIONS, default="uniform",
                   help="UAV start distribution")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="imogwo", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random scenario JSON")
    _scenario_flags(g)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--out", type=Path, required=True)

    e = sub.add_parser("experiment", help="run algorithms on one scenario and tabulate")
    e.add_argument("--kind", choices=harness.KINDS, default="tables")
    e.add_argument("--scenario", type=Path, help="scenario JSON; generated from flags when omitted")
    _scenario_flags(e)
    e.add_argument("--scenario-seed", type=int, default=1)
    e.add_argument("--algorithms", nargs="+", help="override the kind's default algorithm list")
    e.add_argument("--runs", type=int, default=30)
    e.add_argument("--g-max", type=int, default=200)
    e.add_argument("--pop", type=int, default=20)
    e.add_argument("--seed", type=int, default=0, help="seed of the first run")
    e.add_argument("--out", type=Path, required=True)

    i = sub.add_parser("igd", help="per-iteration IGD from a finished experiment")
    i.add_argument("--runs-dir", type=Path, required=True, help="experiment output directory")
    i.add_argument("--out", type=Path, required=True)

    d = sub.add_parser("drift", help="hovering-position drift test on a stored run")
    d.add_argument("--scenario", type=Path, required=True)
    d.add_argument("--run", type=Path, required=True, help="RunReport JSON")
    d.add_argument("--levels", type=float, nargs="+", default=list(harness.DRIFT_LEVELS_M))
    d.add_argument("--draws", type=int, default=30)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", type=Path, required=True)
    return ap


def _scenario_config(args) -> ScenarioConfig:
    return ScenarioConfig(m=args.uavs, k=args.sns, side=args.side, distribution=args.dist)


def main(argv: list[str] | None = None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "generate":
            cfg = _scenario_config(args)
            try:
                cfg.validate()
            except InvalidConfigError as exc:
                ap.error(str(exc))
            save_scenario(generate_scenario(cfg, args.seed), args.out)

        elif args.command == "experiment":
            try:
                plan = harness.ExperimentPlan(
                    kind=args.kind, out_dir=args.out, scenario_path=args.scenario,
                    scenario_config=_scenario_config(args), scenario_seed=args.scenario_seed,
                    algorithms=tuple(args.algorithms or ()), n_runs=args.runs,
                    solver=SolverConfig(g_max=args.g_max, pop=args.pop, seed=args.seed))
                if args.scenario is None:
                    plan.scenario_config.validate()
            except (ValueError, InvalidConfigError) as exc:
                ap.error(str(exc))
            harness.run_experiment(plan)

        elif args.command == "igd":
            args.out.write_text(harness.igd_csv(args.runs_dir))

        elif args.command == "drift":
            if not args.run.exists():
                raise harness.MissingRunFileError(args.run)
            report = RunReport.from_dict(json.loads(args.run.read_text()))
            rows = harness.drift_rows(load_scenario(args.scenario), report,
                                      args.levels, args.draws, args.seed)
            args.out.write_text(harness.drift_csv(rows))
    except (harness.RunFailedError, harness.MissingRunFileError, ScenarioParseError,
            OSError, ValueError) as exc:
        print(f"imogwo {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
