import numpy as np
import pytest

from imogwo.scenario import (Bounds, ChannelParams, EnergyParams, Scenario, ScenarioConfig,
                             SensorNode, UavSpec, generate_scenario)


def hand_scenario(sensor_xy, bits, cycles, starts, p_total=None, **bound_kw) -> Scenario:
    """Scenario with explicit sensors and UAV starts (default physics)."""
    sensors = tuple(SensorNode((float(x), float(y), 0.0), int(b), int(c), 0.1e9)
                    for (x, y), b, c in zip(sensor_xy, bits, cycles))
    uavs = tuple(UavSpec(tuple(map(float, q)), 2.0, EnergyParams()) for q in starts)
    k = len(sensors)
    bounds = Bounds(p_total_w=k * 1.0 / 2 if p_total is None else p_total, **bound_kw)
    return Scenario(sensors, uavs, bounds, ChannelParams(), seed=0, side=800.0)


@pytest.fixture(scope="session")
def small():
    """The M=6, K=50 instance used throughout the acceptance suite."""
    return generate_scenario(ScenarioConfig(), 1)


@pytest.fixture
def tiny():
    return generate_scenario(ScenarioConfig(m=2, k=3), 5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
