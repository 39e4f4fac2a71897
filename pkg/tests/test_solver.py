import cmath
import math

import numpy as np
import pytest

from feederkit.circuit import (
    EmptyPhasorSetError,
    NotRadialError,
    positive_sequence_magnitude,
)
from feederkit.editing import AddCapacitor, SetTap, apply_equipment_change
from feederkit.solver import power_balance_residual, solve_power_flow

from helpers import (
    TWO_BUS_VR_COMPLEX,
    TWO_BUS_VR_PU,
    no_load_circuit,
    small_feeder,
    two_bus_circuit,
)


def test_no_load_flat_profile():
    ckt = no_load_circuit()
    res = solve_power_flow(ckt)
    assert res.converged
    for bus in ("s", "m", "e"):
        for phase, v in res.bus_voltages[bus].items():
            assert abs(v) == pytest.approx(1.0, abs=1e-12)
    assert res.total_loss_kw == pytest.approx(0.0, abs=1e-9)
    assert res.total_loss_kvar == pytest.approx(0.0, abs=1e-9)


def test_two_bus_matches_closed_form():
    res = solve_power_flow(two_bus_circuit())
    assert res.converged
    v = res.bus_voltages["recv"]["a"]
    assert abs(v) == pytest.approx(TWO_BUS_VR_PU, abs=1e-9)
    assert v.real == pytest.approx(TWO_BUS_VR_COMPLEX.real, abs=1e-9)
    assert v.imag == pytest.approx(TWO_BUS_VR_COMPLEX.imag, abs=1e-9)


def test_two_bus_power_balance():
    ckt = two_bus_circuit()
    res = solve_power_flow(ckt)
    assert power_balance_residual(ckt, res) <= 1e-6


def test_loaded_feeder_power_balance():
    ckt = small_feeder(load_scale=1.2, taps=4)
    res = solve_power_flow(ckt)
    assert res.converged
    assert power_balance_residual(ckt, res) <= 1e-6


def test_determinism_bit_identical():
    a = solve_power_flow(small_feeder(load_scale=1.1, taps=3))
    b = solve_power_flow(small_feeder(load_scale=1.1, taps=3))
    assert a.iterations == b.iterations
    assert a.total_loss_kw == b.total_loss_kw
    assert a.total_loss_kvar == b.total_loss_kvar
    for bus in a.bus_voltages:
        for p in a.bus_voltages[bus]:
            assert a.bus_voltages[bus][p] == b.bus_voltages[bus][p]


def test_non_radial_rejected():
    ckt = no_load_circuit()
    ckt.lines.append(
        type(ckt.lines[0])(
            "loop", "e", "s", ("a", "b", "c"), ckt.lines[0].z_matrix.copy()
        )
    )
    with pytest.raises(NotRadialError):
        solve_power_flow(ckt)


def test_tap_raises_downstream_voltage_monotonically():
    prev = None
    for tap in (-8, -4, 0, 4, 8, 12, 16):
        ckt = small_feeder(load_scale=1.0, taps=tap)
        res = solve_power_flow(ckt)
        v = abs(res.bus_voltages["reg_out"]["a"])
        if prev is not None:
            assert v > prev
        prev = v


def test_tap_ratio_values():
    ckt = small_feeder()
    apply_equipment_change(ckt, SetTap("reg1", 0))
    assert ckt.regulators[0].ratio("a") == pytest.approx(1.0)
    apply_equipment_change(ckt, SetTap("reg1", 16))
    assert ckt.regulators[0].ratio("a") == pytest.approx(1.10)
    apply_equipment_change(ckt, SetTap("reg1", -16, phase="b"))
    assert ckt.regulators[0].ratio("b") == pytest.approx(0.90)
    assert ckt.regulators[0].ratio("a") == pytest.approx(1.10)


def test_capacitor_raises_local_voltage():
    ckt = small_feeder(load_scale=1.6)
    base = solve_power_flow(ckt)
    v_before = positive_sequence_magnitude(base.bus_voltages["b3"])
    apply_equipment_change(ckt, AddCapacitor(bus="b3", kvar=600.0))
    after = solve_power_flow(ckt)
    v_after = positive_sequence_magnitude(after.bus_voltages["b3"])
    assert v_after > v_before


def test_capacitor_injection_scales_with_v_squared():
    # at a depressed bus the same bank injects less than rated
    ckt = small_feeder(load_scale=1.6)
    apply_equipment_change(ckt, AddCapacitor(bus="b4", kvar=300.0, device_id="c1"))
    res = solve_power_flow(ckt)
    v = positive_sequence_magnitude(res.bus_voltages["b4"])
    assert v < 1.0
    bank = ckt.capacitors[0]
    bus = ckt.bus("b4")
    b_s = bank.susceptance(bus.base_v_ln)
    injected = sum(
        b_s * abs(res.bus_voltages["b4"][p] * bus.base_v_ln) ** 2
        for p in bank.phases
    )
    assert injected / 1000.0 < bank.kvar
    assert injected / 1000.0 == pytest.approx(bank.kvar * v**2, rel=0.01)


class TestPositiveSequence:
    def test_balanced_set_is_unity(self):
        phasors = {
            "a": cmath.rect(1.0, 0.0),
            "b": cmath.rect(1.0, math.radians(-120.0)),
            "c": cmath.rect(1.0, math.radians(120.0)),
        }
        assert positive_sequence_magnitude(phasors) == pytest.approx(1.0, abs=1e-15)

    def test_single_phase_falls_back_to_magnitude(self):
        phasors = {"a": cmath.rect(0.97, math.radians(-2.0))}
        assert positive_sequence_magnitude(phasors) == pytest.approx(0.97, abs=1e-15)

    def test_two_phase_mean_of_magnitudes(self):
        phasors = {"a": 0.98 + 0j, "c": cmath.rect(0.94, math.radians(118.0))}
        assert positive_sequence_magnitude(phasors) == pytest.approx(0.96, abs=1e-12)

    def test_unbalanced_set_matches_direct_transform(self):
        ckt = small_feeder(load_scale=1.5)
        res = solve_power_flow(ckt)
        ph = res.bus_voltages["b4"]
        alpha = cmath.exp(2j * math.pi / 3)
        expected = abs((ph["a"] + alpha * ph["b"] + alpha * alpha * ph["c"]) / 3.0)
        assert positive_sequence_magnitude(ph) == pytest.approx(expected, abs=1e-15)

    def test_empty_set_rejected(self):
        with pytest.raises(EmptyPhasorSetError):
            positive_sequence_magnitude({})


def test_load_multipliers_scale_demand():
    ckt = small_feeder(load_scale=1.0)
    res_full = solve_power_flow(ckt)
    res_half = solve_power_flow(
        ckt, load_multipliers={ld.id: 0.5 for ld in ckt.loads}
    )
    assert res_half.total_loss_kw < res_full.total_loss_kw
    v_full = positive_sequence_magnitude(res_full.bus_voltages["b4"])
    v_half = positive_sequence_magnitude(res_half.bus_voltages["b4"])
    assert v_half > v_full


def test_negative_load_raises_voltage():
    ckt = small_feeder(load_scale=1.0)
    base = positive_sequence_magnitude(
        solve_power_flow(ckt).bus_voltages["b4"]
    )
    ckt.loads[-1].kw = -800.0  # DER as negative load
    with_der = positive_sequence_magnitude(
        solve_power_flow(ckt).bus_voltages["b4"]
    )
    assert with_der > base
