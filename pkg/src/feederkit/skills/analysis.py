"""Voltage-violation classification and the rule-based skill recommender."""

from __future__ import annotations

from ..circuit import Circuit
from ..qsts import LOWER_LIMIT, UPPER_LIMIT
from .report import SkillContext, SkillError, SkillReport

SEVERE_PCT = 3.0
MODERATE_PCT = 2.0  # moderate band is the closed interval [2, 3] percent


class UnsolvedCircuitError(SkillError):
    def __init__(self):
        super().__init__(
            "circuit has no power-flow solution",
            "run solve_power_flow before analysing violations",
        )


def severity(deviation_pct: float) -> str:
    if deviation_pct > SEVERE_PCT:
        return "severe"
    if deviation_pct >= MODERATE_PCT:
        return "moderate"
    return "minor"


def path_reactance_pu(circuit: Circuit, bus_id: str) -> float:
    """Positive-sequence reactance from the source to `bus_id`, per-unit
    on the system base: the driving-point estimate skills size against."""
    z_base = (
        circuit.source.base_kv * circuit.source.base_kv * 1000.0
    ) / circuit.base_power
    x_ohm = 0.0
    for branch in circuit.path_to_source(bus_id):
        z = branch.z_matrix
        n = z.shape[0]
        self_x = sum(z[i, i].imag for i in range(n)) / n
        if n > 1:
            mutual = sum(
                z[i, j].imag for i in range(n) for j in range(n) if i != j
            ) / (n * (n - 1))
        else:
            mutual = 0.0
        x_ohm += self_x - mutual
    return x_ohm / z_base


def local_load_kw(circuit: Circuit, bus_id: str) -> float:
    return sum(ld.kw for ld in circuit.loads if ld.bus == bus_id)


def classify_violations(
    circuit: Circuit,
    voltages: dict[str, float],
    lower: float = LOWER_LIMIT,
    upper: float = UPPER_LIMIT,
) -> list[dict]:
    """Severity-tagged entries for every bus outside [lower, upper].

    Deviation is |v - 1.0| in percent; each entry carries a root-cause
    note correlating electrical distance from the source with the local
    load density. Sorted severe-first, then by deviation, then bus id.
    """
    entries = []
    for bus in sorted(voltages):
        v = voltages[bus]
        if lower <= v <= upper:
            continue
        kind = "under" if v < lower else "over"
        deviation = abs(v - 1.0) * 100.0
        x_pu = path_reactance_pu(circuit, bus)
        load_kw = local_load_kw(circuit, bus)
        if kind == "under":
            cause = (
                f"electrical distance from source x={x_pu:.4f} pu with "
                f"{load_kw:.0f} kW of local load depresses the voltage"
            )
        else:
            cause = (
                f"upstream boost (regulator taps or shunt capacitors) exceeds "
                f"the drop over x={x_pu:.4f} pu at {load_kw:.0f} kW local load"
            )
        entries.append(
            {
                "bus": bus,
                "voltage_pu": v,
                "kind": kind,
                "deviation_pct": deviation,
                "severity": severity(deviation),
                "electrical_distance_pu": x_pu,
                "local_load_kw": load_kw,
                "root_cause": cause,
            }
        )
    rank = {"severe": 0, "moderate": 1, "minor": 2}
    entries.sort(key=lambda e: (rank[e["severity"]], -e["deviation_pct"], e["bus"]))
    return entries


def _recommendation_for(entry: dict) -> str:
    if entry["kind"] == "under":
        action = "add capacitor support (capacitor_placement skill) or raise upstream taps"
    else:
        action = "run overvoltage_mitigation (lower taps, shunt reactor, or remove excess capacitors)"
    return (
        f"[{entry['severity']}] bus {entry['bus']}: {entry['kind']}voltage "
        f"{entry['voltage_pu']:.4f} pu ({entry['deviation_pct']:.1f}% deviation); "
        f"{entry['root_cause']}; {action}"
    )


def analyze_violations(ctx: SkillContext, config: dict) -> SkillReport:
    """The voltage_violation_analysis skill: solve, scan, classify, rank."""
    if ctx.session.circuit is None:
        raise SkillError(
            "no circuit is loaded", "load a circuit before invoking skills"
        )
    voltages = ctx.solve_and_read()
    metrics = ctx.metrics(voltages)
    entries = classify_violations(
        ctx.session.circuit,
        voltages,
        lower=float(config.get("lower", LOWER_LIMIT)),
        upper=float(config.get("upper", UPPER_LIMIT)),
    )
    recommendations = [_recommendation_for(e) for e in entries]
    if not entries:
        recommendations = [
            "all bus voltages are inside the limits; no corrective action needed"
        ]
    return SkillReport(
        skill="voltage_violation_analysis",
        status="completed",
        tool_calls=ctx.calls,
        metrics_before=dict(metrics),
        metrics_after=dict(metrics),
        recommendations=recommendations,
        iterations=1,
        details={"classified": entries},
    )


def recommend_skill(session, query: str | None = None) -> dict:
    """Deterministic rule-based ranking of the three skills."""
    ranked = []
    over = under = False
    if session.last_solve is not None:
        from .report import pos_seq_map

        voltages = pos_seq_map(session.last_solve)
        over = any(v > UPPER_LIMIT for v in voltages.values())
        under = any(v < LOWER_LIMIT for v in voltages.values())
    if over:
        ranked.append(
            {"skill": "overvoltage_mitigation",
             "reason": "buses above 1.05 pu detected in the latest solve"}
        )
    if under:
        ranked.append(
            {"skill": "capacitor_placement",
             "reason": "buses below 0.95 pu detected in the latest solve"}
        )
    ranked.append(
        {"skill": "voltage_violation_analysis",
         "reason": "classify and explain limit violations"
         if (over or under) else
         "no violations in the latest solve; analysis confirms compliance"}
    )
    return {"ranked": ranked, "query": query}
