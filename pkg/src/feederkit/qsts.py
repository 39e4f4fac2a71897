"""Quasi-static time-series driver, violation detection, and exports.

A QSTS run is a sequence of snapshot solves: at step t every load is
scaled by its assigned shape's multiplier (index wraps past the shape
length), equipment state is held fixed, and the per-bus positive-sequence
voltage, system losses, and limit violations are recorded.
"""

from __future__ import annotations

import html
import json
from dataclasses import dataclass, field

from .circuit import Circuit, positive_sequence_magnitude
from .loadshapes import ShapeRegistry
from .solver import solve_power_flow

EXPORT_SCHEMA_VERSION = 1

LOWER_LIMIT = 0.95
UPPER_LIMIT = 1.05


class LimitsInvertedError(ValueError):
    pass


class UnknownFormatError(ValueError):
    pass


@dataclass
class Violation:
    step: int
    bus: str
    voltage: float
    kind: str  # under | over

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "bus": self.bus,
            "voltage_pu": self.voltage,
            "kind": self.kind,
        }


@dataclass
class QstsResult:
    steps: int
    step_hours: float
    bus_ids: list[str]
    voltages: list[dict[str, float]]  # per step: bus -> pos-seq pu
    loss_kw: list[float]
    loss_kvar: list[float]
    violations: list[Violation]
    diverged_at: int | None = None
    lower: float = LOWER_LIMIT
    upper: float = UPPER_LIMIT

    @property
    def summary(self) -> dict:
        min_v, max_v = float("inf"), float("-inf")
        min_loc = max_loc = ("", -1)
        for t, step_v in enumerate(self.voltages):
            for bus, v in step_v.items():
                if v < min_v:
                    min_v, min_loc = v, (bus, t)
                if v > max_v:
                    max_v, max_loc = v, (bus, t)
        violation_steps = sorted({v.step for v in self.violations})
        return {
            "steps": len(self.voltages),
            "step_hours": self.step_hours,
            "min_voltage_pu": min_v if self.voltages else None,
            "min_voltage_bus": min_loc[0] or None,
            "min_voltage_step": min_loc[1] if self.voltages else None,
            "max_voltage_pu": max_v if self.voltages else None,
            "max_voltage_bus": max_loc[0] or None,
            "max_voltage_step": max_loc[1] if self.voltages else None,
            "violation_count": len(self.violations),
            "violation_step_count": len(violation_steps),
            "violation_steps": violation_steps,
            "total_energy_loss_kwh": sum(self.loss_kw) * self.step_hours,
            "total_energy_loss_kvarh": sum(self.loss_kvar) * self.step_hours,
            "diverged_at": self.diverged_at,
        }

    def to_dict(self) -> dict:
        return {
            "schema_version": EXPORT_SCHEMA_VERSION,
            "steps": self.steps,
            "step_hours": self.step_hours,
            "limits_pu": {"lower": self.lower, "upper": self.upper},
            "bus_ids": list(self.bus_ids),
            "voltages_pu": [dict(sorted(v.items())) for v in self.voltages],
            "loss_kw": list(self.loss_kw),
            "loss_kvar": list(self.loss_kvar),
            "violations": [v.to_dict() for v in self.violations],
            "diverged_at": self.diverged_at,
            "summary": self.summary,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QstsResult":
        return cls(
            steps=data["steps"],
            step_hours=data["step_hours"],
            bus_ids=list(data["bus_ids"]),
            voltages=[dict(v) for v in data["voltages_pu"]],
            loss_kw=list(data["loss_kw"]),
            loss_kvar=list(data["loss_kvar"]),
            violations=[
                Violation(v["step"], v["bus"], v["voltage_pu"], v["kind"])
                for v in data["violations"]
            ],
            diverged_at=data.get("diverged_at"),
            lower=data.get("limits_pu", {}).get("lower", LOWER_LIMIT),
            upper=data.get("limits_pu", {}).get("upper", UPPER_LIMIT),
        )


def detect_violations(
    voltages: dict[str, float],
    lower: float = LOWER_LIMIT,
    upper: float = UPPER_LIMIT,
    step: int = 0,
) -> list[Violation]:
    """Strictly-outside-[lower, upper] check; boundary values comply."""
    if lower >= upper:
        raise LimitsInvertedError(f"lower {lower} must be < upper {upper}")
    out = []
    for bus in sorted(voltages):
        v = voltages[bus]
        if v < lower:
            out.append(Violation(step, bus, v, "under"))
        elif v > upper:
            out.append(Violation(step, bus, v, "over"))
    return out


def run_qsts(
    circuit: Circuit,
    registry: ShapeRegistry,
    steps: int,
    step_hours: float = 1.0,
    lower: float = LOWER_LIMIT,
    upper: float = UPPER_LIMIT,
) -> QstsResult:
    """Drive `steps` snapshot solves with per-step load-shape scaling.

    A non-converging step truncates the result at the previous step and
    marks diverged_at; upstream callers decide whether that is fatal.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    bus_ids = [b.id for b in circuit.buses]
    result = QstsResult(
        steps=steps,
        step_hours=step_hours,
        bus_ids=bus_ids,
        voltages=[],
        loss_kw=[],
        loss_kvar=[],
        violations=[],
        lower=lower,
        upper=upper,
    )
    shape_cache = {
        ld.id: registry.get(ld.shape_ref)
        for ld in circuit.loads
        if ld.shape_ref is not None
    }
    for t in range(steps):
        multipliers = {
            load_id: shape.at(t) for load_id, shape in shape_cache.items()
        }
        solve = solve_power_flow(circuit, load_multipliers=multipliers)
        if not solve.converged:
            result.diverged_at = t
            break
        step_v = {
            bus: positive_sequence_magnitude(phasors)
            for bus, phasors in solve.bus_voltages.items()
        }
        result.voltages.append(step_v)
        result.loss_kw.append(solve.total_loss_kw)
        result.loss_kvar.append(solve.total_loss_kvar)
        result.violations.extend(
            detect_violations(step_v, lower=lower, upper=upper, step=t)
        )
    return result


def export_results(result: QstsResult, format: str) -> str:
    """CSV or JSON text; byte-stable for identical inputs."""
    fmt = format.lower()
    if fmt == "json":
        return json.dumps(result.to_dict(), indent=2, sort_keys=True)
    if fmt == "csv":
        lines = ["step,bus,voltage_pu"]
        for t, step_v in enumerate(result.voltages):
            for bus in sorted(step_v):
                lines.append(f"{t},{bus},{step_v[bus]:.6f}")
        lines.append("")
        lines.append("step,loss_kw,loss_kvar")
        for t in range(len(result.loss_kw)):
            lines.append(f"{t},{result.loss_kw[t]:.6f},{result.loss_kvar[t]:.6f}")
        return "\n".join(lines) + "\n"
    raise UnknownFormatError(f"unknown export format {format!r}; use csv or json")


def generate_report(result: QstsResult) -> str:
    """Self-contained minimal HTML report: KPIs plus the violation table."""
    s = result.summary
    min_v = "n/a" if s["min_voltage_pu"] is None else f"{s['min_voltage_pu']:.4f}"
    max_v = "n/a" if s["max_voltage_pu"] is None else f"{s['max_voltage_pu']:.4f}"
    rows = "\n".join(
        "<tr><td>{}</td><td>{}</td><td>{:.4f}</td><td>{}</td></tr>".format(
            v.step, html.escape(v.bus), v.voltage, v.kind
        )
        for v in result.violations
    )
    if result.violations:
        violation_block = (
            "<table><tr><th>step</th><th>bus</th><th>voltage (p.u.)</th>"
            f"<th>kind</th></tr>\n{rows}\n</table>"
        )
    else:
        violation_block = "<p>0 violations</p>"
    return f"""<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>QSTS report</title>
<style>body{{font-family:sans-serif;margin:2em}}table{{border-collapse:collapse}}
td,th{{border:1px solid #999;padding:4px 8px}}</style></head>
<body>
<h1>QSTS simulation report</h1>
<ul>
<li>Steps: {s["steps"]} x {s["step_hours"]} h</li>
<li>Minimum voltage: {min_v} p.u. (bus {html.escape(str(s["min_voltage_bus"]))}, step {s["min_voltage_step"]})</li>
<li>Maximum voltage: {max_v} p.u. (bus {html.escape(str(s["max_voltage_bus"]))}, step {s["max_voltage_step"]})</li>
<li>Violations: {s["violation_count"]} across {s["violation_step_count"]} steps</li>
<li>Total losses: {s["total_energy_loss_kwh"]:.1f} kWh / {s["total_energy_loss_kvarh"]:.1f} kvarh</li>
</ul>
{violation_block}
</body></html>
"""
