"""What-if equipment studies: capacitor support, regulator taps, and a
PV plant modeled as negative load.

Each change mutates the circuit, so the next solve reflects it; every
step prints the voltage band to show the effect.
"""

from feederkit import (
    AddCapacitor,
    EditLoad,
    SetTap,
    apply_equipment_change,
    positive_sequence_magnitude,
)
from feederkit.packages import build_from_package, load_library_package
from feederkit.solver import solve_power_flow


def band(circuit, label):
    res = solve_power_flow(circuit)
    volts = {b: positive_sequence_magnitude(v) for b, v in res.bus_voltages.items()}
    lo_bus = min(volts, key=volts.get)
    hi_bus = max(volts, key=volts.get)
    print(f"{label:<42} min {volts[lo_bus]:.4f} @ {lo_bus:<5} "
          f"max {volts[hi_bus]:.4f} @ {hi_bus}")
    return volts


circuit = build_from_package(load_library_package("ieee13_stressed")).circuit
band(circuit, "stressed baseline")

# 1. shunt capacitor at the sagging end of the feeder
apply_equipment_change(circuit, AddCapacitor(bus="611", kvar=300, device_id="study"))
band(circuit, "after 300 kvar capacitor at 611")

# 2. back off the regulator (taps are +10/+8/+11 in the bundled data)
apply_equipment_change(circuit, SetTap("creg1", 6))
band(circuit, "after pulling all taps to +6")
apply_equipment_change(circuit, SetTap("creg1", 10, phase="a"))
apply_equipment_change(circuit, SetTap("creg1", 8, phase="b"))
apply_equipment_change(circuit, SetTap("creg1", 11, phase="c"))

# 3. 2 MW PV plant at bus 675, expressed as negative constant-power load
apply_equipment_change(circuit, EditLoad("675", kw=-2000.0, kvar=0.0))
band(circuit, "after 2 MW PV at 675 (negative load)")
