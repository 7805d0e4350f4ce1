import pytest

from qabc_offload.scenario import (
    ChannelParams,
    CloudNode,
    RsuNode,
    Scenario,
    TaskSpec,
    VehicleNode,
    reference_scenario,
)

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when not in ("setup", "call"):
        return
    number, title = marker.args
    ok, _ = _criteria.get(number, (True, title))
    if call.excinfo is not None:
        ok = False
    _criteria[number] = (ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        ok, title = _criteria[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}")


@pytest.fixture(scope="session")
def reference():
    return reference_scenario()


def make_scenario(tasks, *, cpu_hz=1e9, tx_power_w=1e-10, antenna_gain=1.0, noise_w=1e-10,
                  bandwidth_hz=1e6, mec_hz=2e9, backhaul_bps=1e7, cloud_hz=5e9,
                  prop_delay_s=0.05, rsu_capacity=1e12, cloud_capacity=1e13, n_rsus=1,
                  interference_w=0.0, horizon_s=None):
    """One vehicle at 0 m carrying ``tasks`` ((cycles, bits[, deadline]) tuples)."""
    specs = tuple(TaskSpec(t[0], t[1], t[2] if len(t) > 2 else 10.0) for t in tasks)
    vehicle = VehicleNode(0, 0.0, cpu_hz, tx_power_w, antenna_gain, specs)
    rsus = tuple(RsuNode(j, 10.0 * j, 100.0, mec_hz, rsu_capacity, backhaul_bps, interference_w)
                 for j in range(n_rsus))
    return Scenario((vehicle,), rsus, CloudNode(cloud_hz, prop_delay_s, cloud_capacity),
                    ChannelParams(bandwidth_hz, noise_w), horizon_s)


@pytest.fixture
def scenario_factory():
    return make_scenario
