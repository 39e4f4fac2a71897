"""Skill execution reports and the tool-call recorder.

Skills never touch the engine directly: every mutation and read goes
through the session's tool dispatcher via SkillContext, so the report's
tool_calls list is a complete audit trail. Envelope digests exclude
timing, which keeps reports bit-identical across same-seed runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..circuit import positive_sequence_magnitude
from ..qsts import LOWER_LIMIT, UPPER_LIMIT


class SkillError(Exception):
    def __init__(self, message: str, hint: str):
        super().__init__(message)
        self.hint = hint


@dataclass
class RecordedCall:
    tool: str
    args: dict
    digest: str
    success: bool

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "args": self.args,
            "envelope_digest": self.digest,
            "success": self.success,
        }


@dataclass
class SkillReport:
    skill: str
    status: str  # completed | failed | partial
    tool_calls: list[RecordedCall] = field(default_factory=list)
    metrics_before: dict = field(default_factory=dict)
    metrics_after: dict = field(default_factory=dict)
    recommendations: list[str] = field(default_factory=list)
    iterations: int = 0
    details: dict = field(default_factory=dict)  # skill-specific extras

    def to_dict(self) -> dict:
        return {
            "skill": self.skill,
            "status": self.status,
            "tool_calls": [c.to_dict() for c in self.tool_calls],
            "metrics_before": self.metrics_before,
            "metrics_after": self.metrics_after,
            "recommendations": list(self.recommendations),
            "iterations": self.iterations,
            "details": self.details,
        }


class SkillContext:
    """Inversion-of-control handle a skill uses to reach the tools."""

    def __init__(self, session):
        self.session = session
        self.calls: list[RecordedCall] = []

    def call(self, tool: str, args: dict | None = None):
        envelope = self.session.dispatch(tool, args or {})
        self.calls.append(
            RecordedCall(tool, dict(args or {}), envelope.digest(), envelope.success)
        )
        return envelope

    def solve_and_read(self) -> dict[str, float]:
        """solve_power_flow + get_all_bus_voltages -> bus -> pos-seq pu."""
        solve = self.call("solve_power_flow")
        if not solve.success:
            raise SkillError(
                f"power flow failed: {solve.data.get('error')}",
                solve.hint or "fix the circuit and retry",
            )
        volts = self.call("get_all_bus_voltages")
        return {
            bus: entry["per_unit"]
            for bus, entry in volts.data["voltages"].items()
        }

    def metrics(self, voltages: dict[str, float]) -> dict:
        losses = None
        # latest successful solve envelope carries the losses
        if self.session.last_solve is not None:
            losses = self.session.last_solve.total_loss_kw
        under = sorted(b for b, v in voltages.items() if v < LOWER_LIMIT)
        over = sorted(b for b, v in voltages.items() if v > UPPER_LIMIT)
        return {
            "violation_count": len(under) + len(over),
            "undervoltage_buses": under,
            "overvoltage_buses": over,
            "min_voltage_pu": min(voltages.values()),
            "max_voltage_pu": max(voltages.values()),
            "loss_kw": losses,
        }


def pos_seq_map(solve_result) -> dict[str, float]:
    return {
        bus: positive_sequence_magnitude(phasors)
        for bus, phasors in solve_result.bus_voltages.items()
    }
