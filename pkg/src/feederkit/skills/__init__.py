"""Deterministic multi-step workflows invoked through the tool layer."""

from .analysis import (
    analyze_violations,
    classify_violations,
    recommend_skill,
    severity,
)
from .capacitor import brute_force_best, candidate_buses, optimize_capacitors
from .mitigation import (
    NoOvervoltageError,
    NonPositiveReactanceError,
    mitigate_overvoltage,
    size_reactor,
)
from .report import SkillContext, SkillError, SkillReport

SKILLS = {
    "voltage_violation_analysis": analyze_violations,
    "capacitor_placement": optimize_capacitors,
    "overvoltage_mitigation": mitigate_overvoltage,
}


def run_skill(session, skill_name: str, config: dict | None = None) -> SkillReport:
    fn = SKILLS.get(skill_name)
    if fn is None:
        raise SkillError(
            f"unknown skill {skill_name!r}",
            "valid skills: " + ", ".join(sorted(SKILLS)),
        )
    ctx = SkillContext(session)
    return fn(ctx, config or {})


__all__ = [
    "SKILLS",
    "SkillContext",
    "SkillError",
    "SkillReport",
    "analyze_violations",
    "brute_force_best",
    "candidate_buses",
    "classify_violations",
    "mitigate_overvoltage",
    "NonPositiveReactanceError",
    "NoOvervoltageError",
    "optimize_capacitors",
    "recommend_skill",
    "run_skill",
    "severity",
    "size_reactor",
]
