import pytest

from feederkit.oracle import oracle_solve
from feederkit.solver import power_balance_residual, solve_power_flow

from helpers import (
    TWO_BUS_VR_PU,
    no_load_circuit,
    random_radial_circuit,
    small_feeder,
    two_bus_circuit,
)


def max_voltage_gap(a, b) -> float:
    gap = 0.0
    for bus in a.bus_voltages:
        for p in a.bus_voltages[bus]:
            gap = max(gap, abs(a.bus_voltages[bus][p] - b.bus_voltages[bus][p]))
    return gap


def test_oracle_no_load_flat():
    res = oracle_solve(no_load_circuit())
    for bus, phasors in res.bus_voltages.items():
        for v in phasors.values():
            assert abs(v) == pytest.approx(1.0, abs=1e-12)


def test_oracle_two_bus_closed_form():
    res = oracle_solve(two_bus_circuit())
    assert abs(res.bus_voltages["recv"]["a"]) == pytest.approx(
        TWO_BUS_VR_PU, abs=1e-9
    )


def test_oracle_matches_sweep_on_feeder():
    ckt = small_feeder(load_scale=1.4, taps=6)
    sweep = solve_power_flow(ckt)
    newton = oracle_solve(ckt)
    assert sweep.converged
    assert max_voltage_gap(sweep, newton) <= 1e-6
    assert sweep.total_loss_kw == pytest.approx(newton.total_loss_kw, abs=1e-3)


@pytest.mark.parametrize("seed", range(0, 100, 7))
def test_oracle_matches_sweep_random(seed):
    ckt = random_radial_circuit(seed)
    sweep = solve_power_flow(ckt)
    newton = oracle_solve(ckt)
    assert sweep.converged
    assert max_voltage_gap(sweep, newton) <= 1e-6
    assert power_balance_residual(ckt, sweep) <= 1e-6
