"""Overvoltage mitigation: a prioritized three-strategy sequence.

Strategies run in a fixed order - regulator tap reduction, sized shunt
reactor placement, excess capacitor removal - re-solving after every
change and stopping as soon as no bus exceeds the upper limit. A step
that would drag a previously-healthy bus below 0.945 pu (the lower limit
minus a 0.005 safety slack) is rolled back.
"""

from __future__ import annotations

from ..circuit import TAP_MIN
from ..qsts import LOWER_LIMIT, UPPER_LIMIT
from .analysis import path_reactance_pu
from .report import SkillContext, SkillError, SkillReport

ROLLBACK_FLOOR = LOWER_LIMIT - 0.005
MAX_REACTOR_KVAR = 1200.0  # largest single bank the skill will install
TARGET_PU = UPPER_LIMIT

STRATEGY_ORDER = ("tap_adjustment", "reactor_placement", "capacitor_removal")


class NonPositiveReactanceError(ValueError):
    pass


class NoOvervoltageError(ValueError):
    pass


def size_reactor(v_actual: float, v_target: float, x: float) -> float:
    """Reactive absorption (pu) needed to pull v_actual down to v_target
    through a driving-point reactance x: q = (v_actual^2 - v_target^2)/x."""
    if x <= 0:
        raise NonPositiveReactanceError(f"reactance must be > 0, got {x}")
    if v_actual <= v_target:
        raise NoOvervoltageError(
            f"v_actual {v_actual} does not exceed v_target {v_target}"
        )
    return (v_actual * v_actual - v_target * v_target) / x


def _over_buses(voltages: dict[str, float]) -> list[str]:
    return sorted(
        (b for b, v in voltages.items() if v > UPPER_LIMIT),
        key=lambda b: (-voltages[b], b),
    )


def _new_unders(before: dict[str, float], after: dict[str, float]) -> list[str]:
    return sorted(
        b
        for b, v in after.items()
        if v < ROLLBACK_FLOOR and before.get(b, 1.0) >= ROLLBACK_FLOOR
    )


def mitigate_overvoltage(ctx: SkillContext, config: dict) -> SkillReport:
    session = ctx.session
    if session.circuit is None:
        raise SkillError("no circuit is loaded", "load a circuit before invoking skills")

    voltages = ctx.solve_and_read()
    metrics_before = ctx.metrics(voltages)
    over = _over_buses(voltages)
    if not over:
        raise SkillError(
            "no bus exceeds the upper limit; nothing to mitigate",
            "run voltage_violation_analysis to inspect the current profile",
        )

    notes = [f"strategy order: {' -> '.join(STRATEGY_ORDER)}"]
    steps = 0
    rollbacks = 0

    # strategy 1: lower upstream regulator taps one step at a time
    circuit = session.circuit
    while over:
        candidates = []
        for reg in circuit.regulators:
            branch = circuit.line(reg.branch_ref)
            upstream_of_violating = any(
                reg.branch_ref in (b.id for b in circuit.path_to_source(bus))
                for bus in over
            )
            if not upstream_of_violating:
                continue
            if any(reg.taps.get(p, 0) > TAP_MIN for p in branch.phases):
                candidates.append((reg, branch))
        if not candidates:
            break
        reg, branch = candidates[0]
        before = voltages
        for phase in branch.phases:
            current = reg.taps.get(phase, 0)
            if current > TAP_MIN:
                ctx.call(
                    "set_tap_position",
                    {"regulator_id": reg.id, "tap": current - 1, "phase": phase},
                )
        voltages = ctx.solve_and_read()
        steps += 1
        harmed = _new_unders(before, voltages)
        if harmed:
            for phase in branch.phases:
                ctx.call(
                    "set_tap_position",
                    {"regulator_id": reg.id, "tap": reg.taps.get(phase, 0) + 1,
                     "phase": phase},
                )
            voltages = ctx.solve_and_read()
            rollbacks += 1
            notes.append(
                f"tap step on {reg.id} rolled back: would push "
                f"{', '.join(harmed)} below {ROLLBACK_FLOOR} pu"
            )
            break
        over = _over_buses(voltages)
    resolved_during = "tap_adjustment" if not over else None

    # strategy 2: one sized reactor per still-violating bus
    placed_reactors: list[str] = []
    if over:
        tried = set()
        while over:
            bus = next((b for b in over if b not in tried), None)
            if bus is None:
                break
            tried.add(bus)
            x_pu = path_reactance_pu(circuit, bus)
            if x_pu <= 0:
                notes.append(f"bus {bus}: no driving-point reactance; reactor skipped")
                continue
            q_pu = size_reactor(voltages[bus], TARGET_PU, x_pu)
            kvar = min(q_pu * circuit.base_power, MAX_REACTOR_KVAR)
            kvar = max(round(kvar / 10.0) * 10.0, 10.0)
            before = voltages
            added = ctx.call(
                "add_reactor",
                {"bus": bus, "kvar": kvar, "reactor_id": f"mitigation_{bus}"},
            )
            if not added.success:
                notes.append(f"bus {bus}: reactor placement failed; skipped")
                continue
            voltages = ctx.solve_and_read()
            steps += 1
            harmed = _new_unders(before, voltages)
            if harmed:
                ctx.call("remove_reactor", {"reactor_id": f"mitigation_{bus}"})
                voltages = ctx.solve_and_read()
                rollbacks += 1
                notes.append(
                    f"reactor at {bus} rolled back: would push "
                    f"{', '.join(harmed)} below {ROLLBACK_FLOOR} pu"
                )
                continue
            placed_reactors.append(f"mitigation_{bus}")
            over = _over_buses(voltages)
        if not over and resolved_during is None:
            resolved_during = "reactor_placement"

    # strategy 3: remove capacitor banks at/downstream of violating buses.
    # Reactors placed above were sized against the capacitor-driven profile;
    # they are stale once banks start coming out, so retire them first.
    if over:
        if placed_reactors:
            for reactor_id in placed_reactors:
                ctx.call("remove_reactor", {"reactor_id": reactor_id})
            voltages = ctx.solve_and_read()
            over = _over_buses(voltages)
            notes.append(
                "retired interim mitigation reactors before capacitor removal: "
                + ", ".join(placed_reactors)
            )
        removed_ids: set[str] = set()
        while over:
            in_zone = []
            for bank in circuit.capacitors:
                if bank.id in removed_ids:
                    continue
                # bank is at or downstream of v iff v is bank's bus or an ancestor
                ancestors = {b.from_bus for b in circuit.path_to_source(bank.bus)}
                ancestors.add(bank.bus)
                if any(v in ancestors for v in over):
                    in_zone.append(bank)
            if not in_zone:
                break
            bank = sorted(in_zone, key=lambda b: (-b.kvar, b.id))[0]
            removed_ids.add(bank.id)
            spec = {"bus": bank.bus, "kvar": bank.kvar, "phases": list(bank.phases),
                    "capacitor_id": bank.id}
            before = voltages
            ctx.call("remove_capacitor", {"capacitor_id": bank.id})
            voltages = ctx.solve_and_read()
            steps += 1
            harmed = _new_unders(before, voltages)
            if harmed:
                ctx.call("add_capacitor", spec)
                voltages = ctx.solve_and_read()
                rollbacks += 1
                notes.append(
                    f"removal of {bank.id} rolled back: would push "
                    f"{', '.join(harmed)} below {ROLLBACK_FLOOR} pu"
                )
                break
            over = _over_buses(voltages)
        if not over and resolved_during is None:
            resolved_during = "capacitor_removal"

    metrics_after = ctx.metrics(voltages)
    if over:
        status = "partial"
        notes.append(
            "unresolved: all strategies exhausted with "
            f"{len(over)} bus(es) still above {UPPER_LIMIT} pu"
        )
    else:
        status = "completed"
        notes.append(f"resolved during: {resolved_during}")
    return SkillReport(
        skill="overvoltage_mitigation",
        status=status,
        tool_calls=ctx.calls,
        metrics_before=metrics_before,
        metrics_after=metrics_after,
        recommendations=notes,
        iterations=steps,
        details={
            "strategy_order": list(STRATEGY_ORDER),
            "resolved_during": resolved_during,
            "rollbacks": rollbacks,
            "remaining_overvoltage": over,
        },
    )
