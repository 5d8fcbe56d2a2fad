# %% [markdown]
# A miniature ablation: each mechanism switched on alone, then all three
# together. Five seeds keep this under a minute; the acceptance suite runs
# thirty.

# %%
import tempfile
from pathlib import Path

from imogwo import harness
from imogwo.scenario import ScenarioConfig

out = Path(tempfile.mkdtemp(prefix="ablation-"))
plan = harness.ExperimentPlan(kind="ablation", out_dir=out, scenario_config=ScenarioConfig(),
                              scenario_seed=1, n_runs=5)
harness.run_experiment(plan)

# %%
# The table is rebuilt from the per-run JSON files; nothing else is needed.
print((out / "results.csv").read_text())

# %%
# IGD against the front pooled from every run in the directory.
rows = harness.igd_rows([r for reps in harness.load_reports(out).values() for r in reps])
seen = set()
for alg, _, it, _, mean in rows:
    if it in (1, 20, 100, 200) and (alg, it) not in seen:
        seen.add((alg, it))
        print(f"{alg:8s} it {it:3d}  mean IGD {mean:.4f}")
print("artifacts in", out)
