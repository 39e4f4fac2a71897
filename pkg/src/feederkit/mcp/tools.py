"""The 36-tool registry: descriptors, handlers, and the dispatcher.

Category census (11 categories, 36 tools): core 6, loadshape 6, qsts 4,
profile 3, export 2, capacitor 3, reactor 3, regulator 3,
circuit_library 2, topology 1, skill 3.

Every handler runs behind schema validation and inside the session lock;
any exception becomes a failure envelope with a recovery hint. No tool
executes arbitrary directives.
"""

from __future__ import annotations

import time

from .. import editing, qsts as qsts_mod
from ..circuit import (
    CircuitError,
    TAP_MAX,
    TAP_MIN,
    positive_sequence_magnitude,
)
from ..loadshapes import ShapeError, parse_profile_csv
from ..packages import (
    PathEscapesWhitelistError,
    build_from_package,
    list_library_circuits,
    load_library_package,
    read_circuit_package,
    topology_graph,
)
from ..solver import solve_power_flow
from .envelope import ToolEnvelope, fail, ok
from .schema import SchemaViolation, ToolDescriptor, validate_call


class ToolError(Exception):
    """Handler-level failure with an actionable recovery hint."""

    def __init__(self, message: str, hint: str):
        super().__init__(message)
        self.hint = hint


_REGISTRY: dict[str, ToolDescriptor] = {}
_HANDLERS: dict[str, callable] = {}

HINT_LOAD_FIRST = (
    "load the circuit first (call load_library_circuit or load_circuit)"
)
HINT_SOLVE_FIRST = "run solve_power_flow first to produce bus voltages"
HINT_QSTS_FIRST = "run run_qsts first to produce time-series results"


def tool(name: str, category: str, description: str, schema: dict | None = None):
    def wrap(fn):
        _REGISTRY[name] = ToolDescriptor(
            name, category, description,
            schema or {"type": "object", "properties": {}, "required": []},
        )
        _HANDLERS[name] = fn
        return fn

    return wrap


def registry() -> dict[str, ToolDescriptor]:
    return dict(_REGISTRY)


def list_tools() -> list[dict]:
    return [_REGISTRY[name].to_dict() for name in _REGISTRY]


def category_counts() -> dict[str, int]:
    counts: dict[str, int] = {}
    for desc in _REGISTRY.values():
        counts[desc.category] = counts.get(desc.category, 0) + 1
    return counts


def dispatch_tool(tool_name: str, args: dict, session) -> ToolEnvelope:
    """Validate then execute; never raises across this boundary."""
    start = time.perf_counter()

    def elapsed() -> float:
        return (time.perf_counter() - start) * 1000.0

    desc = _REGISTRY.get(tool_name)
    if desc is None:
        return fail(
            tool_name or "<unnamed>",
            f"unknown tool {tool_name!r}",
            "call tools/list for the catalog of 36 available tools",
            elapsed(),
        )
    try:
        coerced = validate_call(desc, args)
    except SchemaViolation as sv:
        envelope = fail(tool_name, str(sv), sv.hint, elapsed())
        envelope.data["schema_violation"] = {"path": sv.path, "expected": sv.expected}
        return envelope
    try:
        with session.lock:
            data = _HANDLERS[tool_name](session, coerced)
        return ok(tool_name, data, elapsed())
    except ToolError as err:
        return fail(tool_name, str(err), err.hint, elapsed())
    except (CircuitError, ShapeError, PathEscapesWhitelistError) as err:
        return fail(
            tool_name, str(err),
            f"adjust the arguments of {tool_name} and retry: {err}", elapsed(),
        )
    except Exception as err:  # handler panic: still an envelope, never a raise
        return fail(
            tool_name,
            f"{type(err).__name__}: {err}",
            f"tool {tool_name} failed unexpectedly; check the arguments or "
            "load a fresh circuit",
            elapsed(),
        )


def _require_circuit(session):
    if session.circuit is None:
        raise ToolError("no circuit is loaded", HINT_LOAD_FIRST)
    return session.circuit


def _require_solve(session):
    _require_circuit(session)
    if session.last_solve is None:
        raise ToolError("power flow has not been solved", HINT_SOLVE_FIRST)
    return session.last_solve


def _require_qsts(session):
    if session.qsts_result is None:
        raise ToolError("no QSTS results available", HINT_QSTS_FIRST)
    return session.qsts_result


def _voltage_payload(solve) -> dict:
    return {
        "voltages": {
            bus: {
                "per_unit": positive_sequence_magnitude(phasors),
                "phases": {
                    p: {"magnitude_pu": abs(v), "angle_deg": _angle_deg(v)}
                    for p, v in phasors.items()
                },
            }
            for bus, phasors in solve.bus_voltages.items()
        },
        "units": {"voltage": "per_unit on each bus base kV"},
        "limits_pu": {"lower": qsts_mod.LOWER_LIMIT, "upper": qsts_mod.UPPER_LIMIT},
    }


def _angle_deg(v: complex) -> float:
    import cmath
    import math

    return math.degrees(cmath.phase(v))


# -- core (6) ---------------------------------------------------------------


@tool(
    "load_circuit", "core",
    "Load a circuit package (master.dss plus components) from a directory "
    "under the configured whitelist root.",
    {
        "type": "object",
        "properties": {
            "path": {
                "type": "string",
                "description": "Package directory, relative to the whitelist root.",
            }
        },
        "required": ["path"],
    },
)
def _load_circuit(session, args):
    if session.whitelist_root is None:
        raise ToolError(
            "no whitelist root configured",
            "configure the server's circuit directory before loading packages",
        )
    try:
        pkg = read_circuit_package(
            session.whitelist_root / args["path"], session.whitelist_root
        )
    except PathEscapesWhitelistError as err:
        raise ToolError(
            str(err),
            "circuit packages must stay inside the whitelisted directory",
        ) from err
    except FileNotFoundError as err:
        raise ToolError(
            str(err),
            "check the package path; it must contain master.dss",
        ) from err
    built = build_from_package(pkg)
    session.install_circuit(built.circuit, pkg, built.shapes)
    return {
        "name": built.circuit.name,
        "buses": len(built.circuit.buses),
        "lines": len(built.circuit.lines),
        "loads": len(built.circuit.loads),
        "warnings": built.warnings,
    }


@tool(
    "solve_power_flow", "core",
    "Run a snapshot power flow on the loaded circuit and report convergence "
    "and total losses.",
)
def _solve_power_flow(session, args):
    ckt = _require_circuit(session)
    res = solve_power_flow(ckt)
    if not res.converged:
        raise ToolError(
            f"power flow did not converge (mismatch {res.max_mismatch:.2e} pu)",
            "reduce loading or check the circuit data, then solve again",
        )
    session.last_solve = res
    return {
        "converged": res.converged,
        "iterations": res.iterations,
        "max_mismatch_pu": res.max_mismatch,
        "total_loss": {"kw": res.total_loss_kw, "kvar": res.total_loss_kvar},
        "units": {"total_loss": "kW / kvar", "voltage": "per_unit"},
    }


@tool(
    "get_bus_voltage", "core",
    "Per-phase and positive-sequence voltage at one bus from the latest solve.",
    {
        "type": "object",
        "properties": {
            "bus": {"type": "string", "description": "Bus id, e.g. '675'."}
        },
        "required": ["bus"],
    },
)
def _get_bus_voltage(session, args):
    solve = _require_solve(session)
    bus = args["bus"]
    if bus not in solve.bus_voltages:
        known = ", ".join(sorted(solve.bus_voltages))
        raise ToolError(
            f"unknown bus {bus!r}", f"valid bus ids are: {known}"
        )
    phasors = solve.bus_voltages[bus]
    return {
        "bus": bus,
        "per_unit": positive_sequence_magnitude(phasors),
        "phases": {
            p: {"magnitude_pu": abs(v), "angle_deg": _angle_deg(v)}
            for p, v in phasors.items()
        },
        "units": {"voltage": "per_unit on the bus base kV"},
    }


@tool(
    "get_all_bus_voltages", "core",
    "System-wide bus voltages (positive-sequence per-unit plus per-phase "
    "detail) from the latest solve.",
)
def _get_all_bus_voltages(session, args):
    return _voltage_payload(_require_solve(session))


@tool(
    "get_circuit_info", "core",
    "Name, element counts, bases, and total demand of the loaded circuit.",
)
def _get_circuit_info(session, args):
    ckt = _require_circuit(session)
    return {
        "name": ckt.name,
        "counts": {
            "buses": len(ckt.buses),
            "lines": len(ckt.lines),
            "loads": len(ckt.loads),
            "capacitors": len(ckt.capacitors),
            "reactors": len(ckt.reactors),
            "regulators": len(ckt.regulators),
        },
        "base_kv": ckt.source.base_kv,
        "base_power_kva": ckt.base_power,
        "total_load": {
            "kw": sum(ld.kw for ld in ckt.loads),
            "kvar": sum(ld.kvar for ld in ckt.loads),
        },
        "units": {"total_load": "kW / kvar", "base_kv": "kV line-to-line"},
    }


@tool(
    "edit_load", "core",
    "Set a load's real and/or reactive demand; negative kW models "
    "distributed generation as injection.",
    {
        "type": "object",
        "properties": {
            "load_id": {"type": "string", "description": "Load id, e.g. '675'."},
            "kw": {"type": "number", "description": "New total kW (negative = injection)."},
            "kvar": {"type": "number", "description": "New total kvar."},
        },
        "required": ["load_id"],
    },
)
def _edit_load(session, args):
    ckt = _require_circuit(session)
    try:
        load = ckt.load(args["load_id"])
    except CircuitError as err:
        known = ", ".join(sorted(ld.id for ld in ckt.loads))
        raise ToolError(str(err), f"valid load ids are: {known}") from err
    editing.apply_equipment_change(
        ckt,
        editing.EditLoad(args["load_id"], args.get("kw"), args.get("kvar")),
    )
    session.invalidate_results()
    return {
        "load_id": load.id,
        "kw": load.kw,
        "kvar": load.kvar,
        "units": {"kw": "kW total over the load's phases", "kvar": "kvar"},
    }


# -- loadshape (6) -----------------------------------------------------------


@tool(
    "create_loadshape", "loadshape",
    "Create a named per-unit multiplier time series.",
    {
        "type": "object",
        "properties": {
            "name": {"type": "string", "description": "Unique shape name."},
            "interval_hours": {
                "type": "number", "description": "Hours per point.", "default": 1.0,
            },
            "multipliers": {
                "type": "array", "items": {"type": "number"},
                "description": "Per-unit multipliers, all >= 0.",
            },
        },
        "required": ["name", "multipliers"],
    },
)
def _create_loadshape(session, args):
    shape = session.shapes.create(
        args["name"], args.get("interval_hours", 1.0), args["multipliers"]
    )
    return {"shape": shape.to_dict()}


@tool(
    "edit_loadshape", "loadshape",
    "Replace the multipliers and/or interval of a custom shape.",
    {
        "type": "object",
        "properties": {
            "name": {"type": "string", "description": "Existing shape name."},
            "multipliers": {"type": "array", "items": {"type": "number"},
                            "description": "New multiplier list."},
            "interval_hours": {"type": "number", "description": "New interval."},
        },
        "required": ["name"],
    },
)
def _edit_loadshape(session, args):
    shape = session.shapes.edit(
        args["name"], args.get("multipliers"), args.get("interval_hours")
    )
    return {"shape": shape.to_dict()}


@tool(
    "delete_loadshape", "loadshape",
    "Delete a custom shape; assigned or built-in shapes are protected.",
    {
        "type": "object",
        "properties": {
            "name": {"type": "string", "description": "Shape to delete."}
        },
        "required": ["name"],
    },
)
def _delete_loadshape(session, args):
    session.shapes.delete(args["name"])
    return {"deleted": args["name"]}


@tool("list_loadshapes", "loadshape", "List every registered shape by name.")
def _list_loadshapes(session, args):
    return {
        "shapes": [
            {"name": s.name, "points": len(s.multipliers),
             "interval_hours": s.interval_hours, "source": s.source}
            for s in session.shapes.list()
        ]
    }


@tool(
    "get_loadshape", "loadshape",
    "Full definition of one shape, multipliers included.",
    {
        "type": "object",
        "properties": {"name": {"type": "string", "description": "Shape name."}},
        "required": ["name"],
    },
)
def _get_loadshape(session, args):
    return {"shape": session.shapes.get(args["name"]).to_dict()}


@tool(
    "assign_loadshape", "loadshape",
    "Attach a shape to a load for QSTS scaling; omit shape_name to detach.",
    {
        "type": "object",
        "properties": {
            "load_id": {"type": "string", "description": "Load to modify."},
            "shape_name": {
                "type": "string",
                "description": "Shape to assign; omit or null to unassign.",
            },
        },
        "required": ["load_id"],
    },
)
def _assign_loadshape(session, args):
    ckt = _require_circuit(session)
    try:
        load = ckt.load(args["load_id"])
    except CircuitError as err:
        known = ", ".join(sorted(ld.id for ld in ckt.loads))
        raise ToolError(str(err), f"valid load ids are: {known}") from err
    shape_name = args.get("shape_name")
    if shape_name:
        session.shapes.get(shape_name)  # raises UnknownShape with names intact
        load.shape_ref = shape_name
    else:
        load.shape_ref = None
    session.qsts_result = None
    return {"load_id": load.id, "shape_ref": load.shape_ref}


# -- qsts (4) -----------------------------------------------------------------


@tool(
    "run_qsts", "qsts",
    "Run a quasi-static time series: one snapshot solve per step with "
    "shape-scaled loads.",
    {
        "type": "object",
        "properties": {
            "steps": {"type": "integer", "minimum": 1, "maximum": 8760,
                      "description": "Number of time steps (at most one year hourly)."},
            "step_hours": {"type": "number", "minimum": 1e-3, "maximum": 24.0,
                           "default": 1.0, "description": "Hours per step."},
        },
        "required": ["steps"],
    },
)
def _run_qsts(session, args):
    ckt = _require_circuit(session)
    result = qsts_mod.run_qsts(
        ckt, session.shapes, args["steps"], args.get("step_hours", 1.0)
    )
    if result.diverged_at is not None and not result.voltages:
        raise ToolError(
            f"QSTS diverged at step {result.diverged_at}",
            "reduce loading or shape multipliers and rerun",
        )
    session.qsts_result = result
    return {"summary": result.summary, "units": _qsts_units()}


def _qsts_units() -> dict:
    return {
        "voltage": "per_unit",
        "losses": "kW / kvar per step",
        "energy": "kWh / kvarh",
    }


@tool(
    "get_qsts_voltage_profile", "qsts",
    "Per-step positive-sequence voltages, for one bus or every bus.",
    {
        "type": "object",
        "properties": {
            "bus": {"type": "string",
                    "description": "Optional bus id; omit for all buses."}
        },
        "required": [],
    },
)
def _get_qsts_voltage_profile(session, args):
    result = _require_qsts(session)
    bus = args.get("bus")
    if bus is not None:
        if not result.voltages or bus not in result.voltages[0]:
            known = ", ".join(sorted(result.voltages[0])) if result.voltages else ""
            raise ToolError(
                f"unknown bus {bus!r}", f"valid bus ids are: {known}"
            )
        series = [step[bus] for step in result.voltages]
        return {
            "bus": bus,
            "steps": list(range(len(series))),
            "voltage_pu": series,
            "units": {"voltage": "per_unit"},
        }
    return {
        "steps": list(range(len(result.voltages))),
        "series": {
            bus: [step[bus] for step in result.voltages]
            for bus in (result.voltages[0] if result.voltages else {})
        },
        "units": {"voltage": "per_unit"},
    }


@tool("get_qsts_losses", "qsts", "Per-step real and reactive system losses.")
def _get_qsts_losses(session, args):
    result = _require_qsts(session)
    return {
        "steps": list(range(len(result.loss_kw))),
        "loss_kw": list(result.loss_kw),
        "loss_kvar": list(result.loss_kvar),
        "units": {"loss_kw": "kW", "loss_kvar": "kvar"},
    }


@tool(
    "get_qsts_summary", "qsts",
    "KPIs of the latest QSTS run: extremes, violations, energy losses.",
)
def _get_qsts_summary(session, args):
    result = _require_qsts(session)
    return {
        "summary": result.summary,
        "violations": [v.to_dict() for v in result.violations],
        "units": _qsts_units(),
    }


# -- profile (3) ---------------------------------------------------------------


@tool(
    "list_profiles", "profile",
    "Browse the load-profile library (built-in synthetics plus uploads).",
)
def _list_profiles(session, args):
    return {
        "profiles": [
            {"name": s.name, "source": s.source, "points": len(s.multipliers)}
            for s in session.shapes.list()
        ]
    }


@tool(
    "get_profile", "profile",
    "Full multiplier series of one library profile.",
    {
        "type": "object",
        "properties": {"name": {"type": "string", "description": "Profile name."}},
        "required": ["name"],
    },
)
def _get_profile(session, args):
    return {"profile": session.shapes.get(args["name"]).to_dict()}


@tool(
    "load_profile_csv", "profile",
    "Register a custom profile from two-column CSV text (hour, multiplier).",
    {
        "type": "object",
        "properties": {
            "name": {"type": "string", "description": "Name for the new profile."},
            "csv_text": {"type": "string", "description": "CSV content."},
        },
        "required": ["name", "csv_text"],
    },
)
def _load_profile_csv(session, args):
    shape = parse_profile_csv(args["csv_text"], name=args["name"])
    session.shapes.create(shape.name, shape.interval_hours, shape.multipliers)
    return {"shape": shape.to_dict()}


# -- export (2) -----------------------------------------------------------------


@tool(
    "export_results", "export",
    "Export the latest QSTS results as CSV or JSON text.",
    {
        "type": "object",
        "properties": {
            "format": {"type": "string", "enum": ["csv", "json"],
                       "description": "Output format."}
        },
        "required": ["format"],
    },
)
def _export_results(session, args):
    result = _require_qsts(session)
    text = qsts_mod.export_results(result, args["format"])
    return {"format": args["format"], "content": text}


@tool(
    "generate_report", "export",
    "Produce a self-contained HTML report of the latest QSTS run.",
)
def _generate_report(session, args):
    result = _require_qsts(session)
    return {"format": "html", "content": qsts_mod.generate_report(result)}


# -- capacitor (3) ----------------------------------------------------------------


def _bank_args_schema(kind: str) -> dict:
    return {
        "type": "object",
        "properties": {
            "bus": {"type": "string", "description": "Bus to attach the bank to."},
            "kvar": {"type": "number", "minimum": 1e-9,
                     "description": "Rated kvar at nominal voltage."},
            "phases": {"type": "array", "items": {"type": "string"},
                       "description": "Phases, e.g. ['a','c']; default all at bus."},
            f"{kind}_id": {"type": "string", "description": "Optional device id."},
        },
        "required": ["bus", "kvar"],
    }


def _remove_schema(kind: str) -> dict:
    return {
        "type": "object",
        "properties": {
            f"{kind}_id": {"type": "string", "description": "Device to remove."},
            "lenient": {"type": "boolean", "default": False,
                        "description": "True: removing an absent device is a no-op."},
        },
        "required": [f"{kind}_id"],
    }


def _add_bank(session, args, kind: str):
    ckt = _require_circuit(session)
    change_cls = editing.AddCapacitor if kind == "capacitor" else editing.AddReactor
    try:
        editing.apply_equipment_change(
            ckt,
            change_cls(
                bus=args["bus"],
                kvar=args["kvar"],
                phases=tuple(args["phases"]) if args.get("phases") else None,
                device_id=args.get(f"{kind}_id"),
            ),
        )
    except CircuitError as err:
        known = ", ".join(sorted(b.id for b in ckt.buses))
        raise ToolError(str(err), f"valid bus ids are: {known}") from err
    session.invalidate_results()
    banks = ckt.capacitors if kind == "capacitor" else ckt.reactors
    bank = banks[-1]
    return {
        f"{kind}_id": bank.id, "bus": bank.bus, "kvar": bank.kvar,
        "phases": list(bank.phases), "units": {"kvar": "kvar rated at 1.0 pu"},
    }


def _remove_bank(session, args, kind: str):
    ckt = _require_circuit(session)
    change_cls = (
        editing.RemoveCapacitor if kind == "capacitor" else editing.RemoveReactor
    )
    dev = args[f"{kind}_id"]
    banks = ckt.capacitors if kind == "capacitor" else ckt.reactors
    try:
        editing.apply_equipment_change(
            ckt, change_cls(dev, lenient=args.get("lenient", False))
        )
    except CircuitError as err:
        known = ", ".join(sorted(b.id for b in banks)) or "(none)"
        raise ToolError(
            str(err),
            f"existing {kind} ids are: {known}; pass lenient=true to ignore",
        ) from err
    session.invalidate_results()
    return {"removed": dev}


def _list_banks(session, kind: str):
    ckt = _require_circuit(session)
    banks = ckt.capacitors if kind == "capacitor" else ckt.reactors
    return {
        f"{kind}s": [
            {"id": b.id, "bus": b.bus, "kvar": b.kvar,
             "phases": list(b.phases), "enabled": b.enabled}
            for b in banks
        ],
        "units": {"kvar": "kvar rated at 1.0 pu"},
    }


@tool("add_capacitor", "capacitor",
      "Add a shunt capacitor bank at a bus (injects kvar, scaling with V^2).",
      _bank_args_schema("capacitor"))
def _add_capacitor(session, args):
    return _add_bank(session, args, "capacitor")


@tool("remove_capacitor", "capacitor", "Remove a capacitor bank by id.",
      _remove_schema("capacitor"))
def _remove_capacitor(session, args):
    return _remove_bank(session, args, "capacitor")


@tool("list_capacitors", "capacitor", "List installed capacitor banks.")
def _list_capacitors(session, args):
    return _list_banks(session, "capacitor")


# -- reactor (3) ---------------------------------------------------------------


@tool("add_reactor", "reactor",
      "Add a shunt reactor at a bus (absorbs kvar for overvoltage control).",
      _bank_args_schema("reactor"))
def _add_reactor(session, args):
    return _add_bank(session, args, "reactor")


@tool("remove_reactor", "reactor", "Remove a reactor bank by id.",
      _remove_schema("reactor"))
def _remove_reactor(session, args):
    return _remove_bank(session, args, "reactor")


@tool("list_reactors", "reactor", "List installed shunt reactors.")
def _list_reactors(session, args):
    return _list_banks(session, "reactor")


# -- regulator (3) ---------------------------------------------------------------


@tool("list_regulators", "regulator",
      "List voltage regulators with their branches and per-phase taps.")
def _list_regulators(session, args):
    ckt = _require_circuit(session)
    return {
        "regulators": [
            {
                "id": r.id,
                "branch": r.branch_ref,
                "taps": {p: r.taps[p] for p in sorted(r.taps)},
                "step_pu": r.step_pu,
                "tap_range": [TAP_MIN, TAP_MAX],
            }
            for r in ckt.regulators
        ]
    }


@tool(
    "get_tap_positions", "regulator",
    "Current tap positions, for one regulator or all.",
    {
        "type": "object",
        "properties": {
            "regulator_id": {"type": "string",
                             "description": "Optional regulator id."}
        },
        "required": [],
    },
)
def _get_tap_positions(session, args):
    ckt = _require_circuit(session)
    regs = ckt.regulators
    if args.get("regulator_id"):
        try:
            regs = [ckt.regulator(args["regulator_id"])]
        except CircuitError as err:
            known = ", ".join(sorted(r.id for r in ckt.regulators)) or "(none)"
            raise ToolError(str(err), f"existing regulator ids are: {known}") from err
    return {
        "taps": {
            r.id: {p: r.taps[p] for p in sorted(r.taps)} for r in regs
        },
        "tap_range": [TAP_MIN, TAP_MAX],
    }


@tool(
    "set_tap_position", "regulator",
    "Set a regulator tap (integer steps of 0.625 percent) on one phase or all.",
    {
        "type": "object",
        "properties": {
            "regulator_id": {"type": "string", "description": "Regulator id."},
            "tap": {"type": "integer", "minimum": TAP_MIN, "maximum": TAP_MAX,
                    "description": f"Tap position in [{TAP_MIN}, {TAP_MAX}]."},
            "phase": {"type": "string", "enum": ["a", "b", "c"],
                      "description": "Optional single phase; default all."},
        },
        "required": ["regulator_id", "tap"],
    },
)
def _set_tap_position(session, args):
    ckt = _require_circuit(session)
    try:
        reg = ckt.regulator(args["regulator_id"])
        editing.apply_equipment_change(
            ckt,
            editing.SetTap(args["regulator_id"], args["tap"], args.get("phase")),
        )
    except CircuitError as err:
        known = ", ".join(sorted(r.id for r in ckt.regulators)) or "(none)"
        raise ToolError(
            str(err),
            f"existing regulator ids are: {known}; taps range "
            f"{TAP_MIN} to {TAP_MAX}",
        ) from err
    session.invalidate_results()
    return {
        "regulator_id": reg.id,
        "taps": {p: reg.taps[p] for p in sorted(reg.taps)},
        "ratio": {p: reg.ratio(p) for p in sorted(reg.taps)},
    }


# -- circuit_library (2) ----------------------------------------------------------


@tool("list_library_circuits", "circuit_library",
      "List the bundled test feeders available to load.")
def _list_library_circuits(session, args):
    return {"circuits": list_library_circuits()}


@tool(
    "load_library_circuit", "circuit_library",
    "Load a bundled test feeder by name (e.g. 'ieee13').",
    {
        "type": "object",
        "properties": {
            "name": {"type": "string", "description": "Library circuit name."}
        },
        "required": ["name"],
    },
)
def _load_library_circuit(session, args):
    try:
        pkg = load_library_package(args["name"])
    except FileNotFoundError as err:
        raise ToolError(str(err), "call list_library_circuits for valid names") from err
    built = build_from_package(pkg)
    session.install_circuit(built.circuit, pkg, built.shapes)
    return {
        "name": built.circuit.name,
        "buses": len(built.circuit.buses),
        "lines": len(built.circuit.lines),
        "loads": len(built.circuit.loads),
        "warnings": built.warnings,
    }


# -- topology (1) -------------------------------------------------------------------


@tool("get_topology", "topology",
      "Bus coordinates, element kinds, and branch connectivity for rendering.")
def _get_topology(session, args):
    ckt = _require_circuit(session)
    graph = topology_graph(ckt)
    payload = graph.to_dict()
    if session.last_solve is not None:
        payload["voltages_pu"] = {
            bus: positive_sequence_magnitude(v)
            for bus, v in session.last_solve.bus_voltages.items()
        }
    return payload


# -- skill (3) -----------------------------------------------------------------------


@tool(
    "recommend_skill", "skill",
    "Rank the available multi-step skills against the current circuit state.",
    {
        "type": "object",
        "properties": {
            "query": {"type": "string",
                      "description": "Optional free-text intent, recorded only."}
        },
        "required": [],
    },
)
def _recommend_skill(session, args):
    from ..skills import recommend_skill

    return recommend_skill(session, query=args.get("query"))


@tool(
    "invoke_skill", "skill",
    "Execute a deterministic multi-step skill; returns its full report.",
    {
        "type": "object",
        "properties": {
            "skill_name": {
                "type": "string",
                "enum": [
                    "voltage_violation_analysis",
                    "capacitor_placement",
                    "overvoltage_mitigation",
                ],
                "description": "Skill to run.",
            },
            "config": {"type": "object",
                       "description": "Skill-specific options (seed, swarm...)."},
        },
        "required": ["skill_name"],
    },
)
def _invoke_skill(session, args):
    from ..skills import run_skill, SkillError

    try:
        report = run_skill(session, args["skill_name"], args.get("config") or {})
    except SkillError as err:
        raise ToolError(str(err), err.hint) from err
    session.skill_reports[args["skill_name"]] = report.to_dict()
    return {"report": report.to_dict()}


@tool(
    "get_skill_status", "skill",
    "Latest report for one skill, or the set of completed skill runs.",
    {
        "type": "object",
        "properties": {
            "skill_name": {"type": "string", "description": "Optional skill name."}
        },
        "required": [],
    },
)
def _get_skill_status(session, args):
    name = args.get("skill_name")
    if name:
        report = session.skill_reports.get(name)
        if report is None:
            raise ToolError(
                f"skill {name!r} has not run",
                "invoke_skill first, or call get_skill_status with no name "
                "to see completed runs",
            )
        return {"report": report}
    return {"completed": sorted(session.skill_reports)}
