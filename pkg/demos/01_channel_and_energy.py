# %% [markdown]
# Channel and flight-energy models on their own, before any optimization.
# Everything here is a pure function of numbers, so it is a good place to
# get a feel for magnitudes.

# %%
import numpy as np

from imogwo import physics
from imogwo.scenario import ChannelParams, EnergyParams

ch = ChannelParams()          # 1 MHz, 920 MHz carrier, -100 dBm noise, 20% foliage
e = EnergyParams()

# %%
# How fast does the link decay? A UAV at 20 m altitude, sliding sideways
# away from the sensor, transmitting at 0.5 W.
for offset in (0, 50, 100, 200, 400, 800):
    lb = physics.link_budget((offset, 0, 20), (0, 0, 0), 0.5, ch)
    print(f"{offset:4d} m  PL {lb.pl_total_db:6.2f} dB  (foliage {lb.pl_forest_db:.3f})"
          f"  rate {lb.rate_bps / 1e6:6.2f} Mbit/s")

# Foliage loss is tiny next to free-space loss at these distances; the
# free-space term does almost all the work.

# %%
# Upload plus UAV compute time for a 4 Mbit task at 300 cycles/bit, versus
# doing it all on the 0.1 GHz sensor.
bits, cyc = 4 * 2**20, 300
for offset in (0, 200, 800):
    rate = physics.link_budget((offset, 0, 20), (0, 0, 0), 0.5, ch).rate_bps
    print(f"{offset:4d} m  edge {physics.edge_delay(bits, cyc, rate, 1e9):6.3f} s",
          f"local {physics.local_delay(bits, cyc, 0.1e9):6.3f} s")

# %%
# Propulsion power against forward speed. Note the shallow dip at low speed
# before parasite drag (the V^3 term) takes over.
v = np.linspace(0, 30, 7)
print(np.round(physics.propulsion_power(v, e), 2))

# %%
# Relocation energy. Dropping 20 m costs more than climbing 20 m: at 2 m/s
# the descent lasts three times as long with the rotors still drawing about
# 170 W, and the potential-energy credit (about 392 J) does not cover that.
print("climb 10->30 m :", physics.motion_energy((0, 0, 10), (0, 0, 30), 2.0, e))
print("drop  30->10 m :", physics.motion_energy((0, 0, 30), (0, 0, 10), 2.0, e))
print("500 m level    :", physics.motion_energy((0, 0, 20), (300, 400, 20), 2.0, e))
