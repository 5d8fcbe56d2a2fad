# %% [markdown]
# One IMOGWO run on the small-scale network (6 UAVs, 50 sensors), and a
# look at the front it returns.

# %%
import numpy as np

from imogwo import ScenarioConfig, SolverConfig, generate_scenario, run
from imogwo.encoding import delay_breakdown

s = generate_scenario(ScenarioConfig(), seed=1)
print(f"M={s.m} UAVs, K={s.k} sensors, {s.dimension} decision variables")

# %%
rep = run(s, SolverConfig(seed=0))
front = rep.front_values()
print(f"{len(front)} non-dominated solutions; seconds: {rep.iteration_seconds[-1]:.2f}")
print("columns: delay [s], energy [kJ], peak CPU [GHz]")
print(np.round(front[np.argsort(front[:, 0])] / [1, 1e3, 1e9], 3))

# %%
# A fire-response operator cares about delay first: take the f1-minimal
# solution and see which delay branch decides it.
sol, obj = min(rep.final_front, key=lambda m: m[1].f1_s)
local, edge = delay_breakdown(sol, s)
print(f"f1={obj.f1_s:.3f} s  (largest local {local:.3f} s, largest UAV load {edge:.3f} s)")
print(f"offloaded share: {sol.c_offload.sum() / s.task_bits.sum():.1%}")
print("UAVs per sensor count:", np.bincount(sol.assign, minlength=s.m + 1)[1:])

# %%
# Per-objective minima over the archive, iteration by iteration. They never
# increase; the archive keeps each objective's best member.
for it in (1, 10, 50, 100, 200):
    f1, f2, f3 = rep.minima_trace[it - 1]
    print(f"it {it:3d}: {f1:7.3f} s  {f2 / 1e3:7.2f} kJ  {f3 / 1e9:.3f} GHz")
