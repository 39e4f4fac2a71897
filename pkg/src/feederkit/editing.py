"""What-if equipment changes: capacitor/reactor banks, regulator taps,
load edits. Changes mutate the circuit in place and return it, so a
subsequent solve reflects the new state.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import (
    TAP_MAX,
    TAP_MIN,
    Circuit,
    DuplicateDeviceIdError,
    ShuntBank,
    TapOutOfRangeError,
    UnknownBusError,
    UnknownDeviceError,
)


@dataclass
class AddCapacitor:
    bus: str
    kvar: float
    phases: tuple[str, ...] | None = None  # default: all phases at the bus
    device_id: str | None = None


@dataclass
class RemoveCapacitor:
    device_id: str
    lenient: bool = False  # True: removing an absent bank is a no-op


@dataclass
class AddReactor:
    bus: str
    kvar: float
    phases: tuple[str, ...] | None = None
    device_id: str | None = None


@dataclass
class RemoveReactor:
    device_id: str
    lenient: bool = False


@dataclass
class SetTap:
    regulator_id: str
    tap: int
    phase: str | None = None  # None: every phase of the regulator's branch


@dataclass
class EditLoad:
    load_id: str
    kw: float | None = None
    kvar: float | None = None


EquipmentChange = (
    AddCapacitor | RemoveCapacitor | AddReactor | RemoveReactor | SetTap | EditLoad
)


def _add_bank(circuit: Circuit, change, kind: str) -> None:
    if not circuit.has_bus(change.bus):
        raise UnknownBusError(f"unknown bus {change.bus!r}")
    bus = circuit.bus(change.bus)
    phases = tuple(change.phases) if change.phases else bus.phases
    banks = circuit.capacitors if kind == "capacitor" else circuit.reactors
    dev_id = change.device_id or f"{kind}_{change.bus}_{len(banks) + 1}"
    if any(b.id == dev_id for b in circuit.shunts()):
        raise DuplicateDeviceIdError(f"shunt bank id {dev_id!r} already exists")
    banks.append(
        ShuntBank(id=dev_id, bus=change.bus, phases=phases, kvar=change.kvar, kind=kind)
    )


def _remove_bank(circuit: Circuit, change, kind: str) -> None:
    banks = circuit.capacitors if kind == "capacitor" else circuit.reactors
    for i, b in enumerate(banks):
        if b.id == change.device_id:
            del banks[i]
            return
    if not change.lenient:
        raise UnknownDeviceError(f"unknown {kind} {change.device_id!r}")


def apply_equipment_change(circuit: Circuit, change: EquipmentChange) -> Circuit:
    if isinstance(change, AddCapacitor):
        _add_bank(circuit, change, "capacitor")
    elif isinstance(change, RemoveCapacitor):
        _remove_bank(circuit, change, "capacitor")
    elif isinstance(change, AddReactor):
        _add_bank(circuit, change, "reactor")
    elif isinstance(change, RemoveReactor):
        _remove_bank(circuit, change, "reactor")
    elif isinstance(change, SetTap):
        reg = circuit.regulator(change.regulator_id)
        if not TAP_MIN <= change.tap <= TAP_MAX:
            raise TapOutOfRangeError(
                f"tap {change.tap} outside [{TAP_MIN}, {TAP_MAX}]"
            )
        branch = circuit.line(reg.branch_ref)
        if change.phase is None:
            for p in branch.phases:
                reg.taps[p] = change.tap
        else:
            if change.phase not in branch.phases:
                raise UnknownDeviceError(
                    f"regulator {reg.id} has no phase {change.phase!r}"
                )
            reg.taps[change.phase] = change.tap
    elif isinstance(change, EditLoad):
        load = circuit.load(change.load_id)
        if change.kw is not None:
            load.kw = float(change.kw)
        if change.kvar is not None:
            load.kvar = float(change.kvar)
    else:
        raise TypeError(f"unsupported change {change!r}")
    return circuit
