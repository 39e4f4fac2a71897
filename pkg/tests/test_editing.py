import pytest

from feederkit.circuit import (
    DuplicateDeviceIdError,
    TapOutOfRangeError,
    UnknownBusError,
    UnknownDeviceError,
    positive_sequence_magnitude,
)
from feederkit.editing import (
    AddCapacitor,
    AddReactor,
    EditLoad,
    RemoveCapacitor,
    RemoveReactor,
    SetTap,
    apply_equipment_change,
)
from feederkit.packages import build_from_package, load_library_package
from feederkit.solver import solve_power_flow

from helpers import small_feeder


@pytest.fixture
def stressed():
    return build_from_package(load_library_package("ieee13_stressed")).circuit


def test_capacitor_at_675_raises_its_positive_sequence_voltage(stressed):
    baseline = solve_power_flow(stressed)
    v_before = positive_sequence_magnitude(baseline.bus_voltages["675"])
    apply_equipment_change(
        stressed, AddCapacitor(bus="675", kvar=600.0, device_id="study675")
    )
    after = solve_power_flow(stressed)
    v_after = positive_sequence_magnitude(after.bus_voltages["675"])
    assert v_after > v_before


def test_unknown_bus_rejected(stressed):
    with pytest.raises(UnknownBusError):
        apply_equipment_change(stressed, AddCapacitor(bus="nowhere", kvar=100))


def test_duplicate_device_id_rejected(stressed):
    apply_equipment_change(stressed, AddCapacitor(bus="675", kvar=100,
                                                  device_id="dup"))
    with pytest.raises(DuplicateDeviceIdError):
        apply_equipment_change(stressed, AddCapacitor(bus="632", kvar=100,
                                                      device_id="dup"))
    with pytest.raises(DuplicateDeviceIdError):
        apply_equipment_change(stressed, AddReactor(bus="632", kvar=100,
                                                    device_id="dup"))


def test_remove_absent_device(stressed):
    with pytest.raises(UnknownDeviceError):
        apply_equipment_change(stressed, RemoveCapacitor("ghost"))
    # lenient removal of an absent device is a no-op
    apply_equipment_change(stressed, RemoveCapacitor("ghost", lenient=True))
    with pytest.raises(UnknownDeviceError):
        apply_equipment_change(stressed, RemoveReactor("ghost"))
    apply_equipment_change(stressed, RemoveReactor("ghost", lenient=True))


def test_remove_then_re_add(stressed):
    n = len(stressed.capacitors)
    apply_equipment_change(stressed, RemoveCapacitor("cap675"))
    assert len(stressed.capacitors) == n - 1
    apply_equipment_change(
        stressed, AddCapacitor(bus="675", kvar=600, device_id="cap675")
    )
    assert len(stressed.capacitors) == n


def test_tap_out_of_range(stressed):
    with pytest.raises(TapOutOfRangeError):
        apply_equipment_change(stressed, SetTap("creg1", 17))
    with pytest.raises(TapOutOfRangeError):
        apply_equipment_change(stressed, SetTap("creg1", -17))
    with pytest.raises(UnknownDeviceError):
        apply_equipment_change(stressed, SetTap("creg1", 0, phase="q"))
    with pytest.raises(UnknownDeviceError):
        apply_equipment_change(stressed, SetTap("nope", 0))


def test_edit_load_partial_fields():
    ckt = small_feeder()
    apply_equipment_change(ckt, EditLoad("ld_b2", kw=-500.0))
    load = ckt.load("ld_b2")
    assert load.kw == -500.0
    assert load.kvar == 260.0  # untouched
    apply_equipment_change(ckt, EditLoad("ld_b2", kvar=0.0))
    assert load.kvar == 0.0
    with pytest.raises(UnknownDeviceError):
        apply_equipment_change(ckt, EditLoad("ghost", kw=1.0))
