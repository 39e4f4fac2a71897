"""The three deterministic skills, end to end.

Each skill drives the engine purely through tool calls, so its report is
a complete audit trail: every add/remove/solve appears in tool_calls.
"""

from feederkit.mcp import EngineSession

# -- 1. violation analysis on the stressed feeder ------------------------

session = EngineSession()
session.dispatch("load_library_circuit", {"name": "ieee13_stressed"})
analysis = session.dispatch(
    "invoke_skill", {"skill_name": "voltage_violation_analysis"}
).data["report"]
print("violation analysis:", analysis["status"])
for item in analysis["recommendations"]:
    print("  -", item)

# -- 2. capacitor placement PSO on a peak-stressed copy ---------------------

peak = EngineSession()
peak.dispatch("load_library_circuit", {"name": "ieee13_stressed"})
for load in list(peak.circuit.loads):
    peak.dispatch("edit_load", {"load_id": load.id,
                                "kw": load.kw * 1.4, "kvar": load.kvar * 1.4})
pso = peak.dispatch(
    "invoke_skill",
    {"skill_name": "capacitor_placement", "config": {"seed": 42}},
).data["report"]
placement = pso["details"]["placement"]
print(f"\ncapacitor placement ({pso['details']['combinations']} combinations, "
      f"{pso['details']['evaluations']} evaluated):")
print(f"  best: {placement['kvar']:.0f} kvar at bus {placement['bus']}")
print(f"  undervoltage buses {pso['metrics_before']['undervoltage_buses']} -> "
      f"{pso['metrics_after']['undervoltage_buses']}")
print(f"  losses {pso['metrics_before']['loss_kw']:.1f} -> "
      f"{pso['metrics_after']['loss_kw']:.1f} kW "
      f"({len(pso['tool_calls'])} tool calls)")

# -- 3. overvoltage mitigation on a taps-at-+16 scenario ----------------------

hot = EngineSession()
hot.dispatch("load_library_circuit", {"name": "ieee13"})
hot.dispatch("set_tap_position", {"regulator_id": "creg1", "tap": 16})
fix = hot.dispatch(
    "invoke_skill", {"skill_name": "overvoltage_mitigation"}
).data["report"]
print(f"\novervoltage mitigation: {fix['status']} "
      f"(resolved during {fix['details']['resolved_during']})")
print(f"  overvoltage buses {fix['metrics_before']['overvoltage_buses']} -> "
      f"{fix['metrics_after']['overvoltage_buses']}")
taps = hot.dispatch("get_tap_positions").data["taps"]
print(f"  final taps: {taps}")

# the recommender picks the right skill for the state it sees
hot.dispatch("solve_power_flow")
ranked = hot.dispatch("recommend_skill").data["ranked"]
print("\nrecommended next:", [r["skill"] for r in ranked])
