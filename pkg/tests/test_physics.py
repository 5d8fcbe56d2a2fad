import numpy as np
import pytest
from hypothesis import given, strategies as st

from imogwo import physics
from imogwo.scenario import ChannelParams, EnergyParams

E = EnergyParams()
CH = ChannelParams()

# Frozen from a math-module-only evaluation of the model (notes/oracle_values.py).
PL_FOREST_920_100 = 0.07188661938254713
PL_TOTAL_D20 = 55.84546215993523
RATE_D20_P1 = 24633604.31685684
POWER = {0: 168.49, 2: 168.62922664499976, 6: 188.23838470758326, 10: 245.48661250492333}
E_CLIMB = 13293.791907604776     # (0,0,10) -> (300,400,30)
E_DESCEND = 1294.2922664499977   # (0,0,30) -> (0,0,10)


def test_forest_loss_zero_distance():
    assert physics.forest_path_loss(920, 0.0) == 0.0


def test_forest_loss_hand_value():
    assert physics.forest_path_loss(920, 100.0) == pytest.approx(PL_FOREST_920_100, rel=1e-12)
    assert round(float(physics.forest_path_loss(920, 100.0)), 4) == 0.0719


def test_forest_loss_grows_with_distance():
    assert physics.forest_path_loss(920, 200.0) > physics.forest_path_loss(920, 100.0)


def test_negative_or_zero_distances_rejected():
    with pytest.raises(physics.DomainError):
        physics.forest_path_loss(920, -1.0)
    with pytest.raises(physics.DomainError):
        physics.free_space_path_loss(920, 0.0)


def test_link_budget_directly_overhead():
    lb = physics.link_budget((0, 0, 20), (0, 0, 0), 1.0, CH)
    assert lb.pl_total_db == pytest.approx(lb.pl_forest_db + lb.pl_free_db)
    assert lb.pl_total_db == pytest.approx(PL_TOTAL_D20, rel=1e-12)
    assert lb.rate_bps == pytest.approx(RATE_D20_P1, rel=1e-12)


def test_unassigned_link_has_no_rate():
    assert physics.link_rate(1.0, 60.0, CH, assigned=False) == 0.0


@given(st.floats(1.0, 2000.0), st.floats(1.0, 2000.0), st.floats(0.1, 1.0))
def test_rate_decreases_with_distance(d1, d2, p):
    lo, hi = sorted((d1, d2))
    r_lo = physics.link_budget((0, 0, lo), (0, 0, 0), p, CH).rate_bps
    r_hi = physics.link_budget((0, 0, hi), (0, 0, 0), p, CH).rate_bps
    assert r_hi <= r_lo + 1e-9 * r_lo


def test_delays():
    assert physics.local_delay(2**20, 300, 0.1e9) == pytest.approx(3.145728)
    assert physics.edge_delay(0.0, 100, 0.0, 0.75e9) == 0.0
    t = physics.edge_delay(2**20, 100, RATE_D20_P1, 0.75e9)
    assert t == pytest.approx(2**20 / RATE_D20_P1 + 2**20 * 100 / 0.75e9, rel=1e-12)
    with pytest.raises(physics.InfeasibleLinkError):
        physics.edge_delay(10.0, 100, 0.0, 0.75e9)
    with pytest.raises(physics.DomainError):
        physics.local_delay(1.0, 100, 0.0)


@pytest.mark.parametrize("v", sorted(POWER))
def test_propulsion_power_values(v):
    assert physics.propulsion_power(v, E) == pytest.approx(POWER[v], rel=1e-12)


def test_hover_power_is_blade_plus_induced():
    assert physics.propulsion_power(0.0, E) == pytest.approx(E.p_blade_w + E.p_induced_w)


def test_motion_energy_climb_and_descent():
    assert physics.motion_energy((0, 0, 10), (300, 400, 30), 2.0, E) == pytest.approx(E_CLIMB, rel=1e-12)
    assert physics.motion_energy((0, 0, 30), (0, 0, 10), 2.0, E) == pytest.approx(E_DESCEND, rel=1e-12)


def test_motion_energy_zero_for_no_move():
    assert physics.motion_energy((5, 5, 20), (5, 5, 20), 2.0, E) == 0.0


def test_motion_energy_broadcasts():
    start = np.array([[0, 0, 10], [0, 0, 30]], float)
    end = np.array([[300, 400, 30], [0, 0, 10]], float)
    got = physics.motion_energy(start, end, 2.0, E)
    assert got == pytest.approx([E_CLIMB, E_DESCEND], rel=1e-12)


def test_motion_plan_segments():
    plan = physics.motion_plan((0, 0, 10), (300, 400, 30), E)
    assert plan.vertical_delta_m == 20.0 and plan.horizontal_dist_m == 500.0
    assert plan.segments == ((6.0, 20 / 6), (10.0, 50.0))
    down = physics.motion_plan((0, 0, 30), (0, 0, 10), E)
    assert down.segments[0] == (2.0, 10.0)
