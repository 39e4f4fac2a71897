"""Three-phase radial circuit model.

All electrical quantities are stored in physical units (ohms, kW, kvar,
line-to-line kV); solved voltages are reported in per-unit on each bus's
own base kV. A circuit is a tree rooted at the source bus: exactly one
path from the source to every other bus.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

PHASES = ("a", "b", "c")

# 120-degree operator used by the positive-sequence transform
ALPHA = cmath.exp(2j * math.pi / 3)

# phase angle offsets for a standard abc rotation, degrees
PHASE_OFFSET_DEG = {"a": 0.0, "b": -120.0, "c": 120.0}

TAP_MIN, TAP_MAX = -16, 16


class CircuitError(ValueError):
    """Base class for circuit-model validation failures."""


class NotRadialError(CircuitError):
    """Branch graph is disconnected or contains a loop."""


class UnknownBusError(CircuitError):
    pass


class UnknownDeviceError(CircuitError):
    pass


class TapOutOfRangeError(CircuitError):
    pass


class DuplicateDeviceIdError(CircuitError):
    pass


class EmptyPhasorSetError(CircuitError):
    pass


def _check_phases(phases) -> tuple[str, ...]:
    out = tuple(p for p in PHASES if p in phases)
    if not out or len(set(phases)) != len(out):
        raise CircuitError(f"invalid phase set {phases!r}; expected subset of {PHASES}")
    return out


@dataclass
class Bus:
    id: str
    phases: tuple[str, ...] = PHASES
    base_kv: float = 4.16  # line-to-line
    coord: tuple[float, float] | None = None

    def __post_init__(self):
        self.phases = _check_phases(self.phases)
        if self.base_kv <= 0:
            raise CircuitError(f"bus {self.id}: base_kv must be > 0")

    @property
    def base_v_ln(self) -> float:
        """Line-to-neutral base voltage in volts."""
        return self.base_kv * 1000.0 / math.sqrt(3.0)


@dataclass
class SourceSpec:
    bus: str
    v_pu: tuple[float, ...] = (1.0, 1.0, 1.0)  # per-phase magnitude
    angle_deg: float = 0.0
    base_kv: float = 4.16

    def voltage(self, phase: str, base_v_ln: float) -> complex:
        i = PHASES.index(phase)
        mag = self.v_pu[i % len(self.v_pu)] * base_v_ln
        ang = math.radians(self.angle_deg + PHASE_OFFSET_DEG[phase])
        return cmath.rect(mag, ang)


@dataclass
class LineBranch:
    id: str
    from_bus: str
    to_bus: str
    phases: tuple[str, ...]
    z_matrix: np.ndarray  # complex ohms, square over `phases`
    shunt_b: np.ndarray | None = None  # per-phase total charging susceptance, S

    def __post_init__(self):
        self.phases = _check_phases(self.phases)
        z = np.asarray(self.z_matrix, dtype=complex)
        n = len(self.phases)
        if z.shape != (n, n):
            raise CircuitError(
                f"branch {self.id}: z_matrix shape {z.shape} != ({n}, {n})"
            )
        if not np.allclose(z, z.T):
            raise CircuitError(f"branch {self.id}: z_matrix must be symmetric")
        self.z_matrix = z
        if self.shunt_b is not None:
            b = np.asarray(self.shunt_b, dtype=float)
            if b.shape != (n,):
                raise CircuitError(f"branch {self.id}: shunt_b must have {n} entries")
            self.shunt_b = b


@dataclass
class LoadSpec:
    id: str
    bus: str
    phases: tuple[str, ...]
    kw: float  # total over the load's phases; negative = injection (DER)
    kvar: float
    connection: str = "wye"  # wye | delta
    shape_ref: str | None = None

    def __post_init__(self):
        self.phases = _check_phases(self.phases)
        if self.connection not in ("wye", "delta"):
            raise CircuitError(f"load {self.id}: connection must be wye or delta")
        if self.connection == "delta" and len(self.phases) < 2:
            raise CircuitError(f"load {self.id}: delta connection needs >= 2 phases")

    def phase_powers(self, multiplier: float = 1.0) -> dict[str, complex]:
        """Wye-equivalent per-phase complex power in VA.

        Delta loads are converted to an equivalent wye by splitting the
        total demand equally across the connected phases; this is the
        documented model simplification shared by every solver.
        """
        n = len(self.phases)
        s = complex(self.kw, self.kvar) * 1000.0 * multiplier / n
        return {p: s for p in self.phases}


@dataclass
class ShuntBank:
    id: str
    bus: str
    phases: tuple[str, ...]
    kvar: float  # rated three-phase total at nominal voltage
    kind: str = "capacitor"  # capacitor | reactor
    enabled: bool = True

    def __post_init__(self):
        self.phases = _check_phases(self.phases)
        if self.kvar <= 0:
            raise CircuitError(f"shunt {self.id}: kvar must be > 0")
        if self.kind not in ("capacitor", "reactor"):
            raise CircuitError(f"shunt {self.id}: kind must be capacitor or reactor")

    def susceptance(self, base_v_ln: float) -> float:
        """Per-phase susceptance (S) reproducing the kvar rating at 1.0 pu.

        Injected (capacitor) or absorbed (reactor) Q scales with |V|^2,
        i.e. the bank is a fixed admittance, not a fixed-Q device.
        """
        q_phase = self.kvar * 1000.0 / len(self.phases)
        return q_phase / (base_v_ln * base_v_ln)


@dataclass
class RegulatorSpec:
    id: str
    branch_ref: str
    taps: dict[str, int] = field(default_factory=dict)  # phase -> tap
    step_pu: float = 0.00625  # 5/8 % per step

    def __post_init__(self):
        for p, t in self.taps.items():
            if p not in PHASES:
                raise CircuitError(f"regulator {self.id}: bad phase {p!r}")
            if not TAP_MIN <= int(t) <= TAP_MAX:
                raise TapOutOfRangeError(
                    f"regulator {self.id}: tap {t} outside [{TAP_MIN}, {TAP_MAX}]"
                )
            self.taps[p] = int(t)

    def ratio(self, phase: str) -> float:
        return 1.0 + self.step_pu * self.taps.get(phase, 0)


@dataclass
class Circuit:
    name: str
    buses: list[Bus] = field(default_factory=list)
    source: SourceSpec | None = None
    lines: list[LineBranch] = field(default_factory=list)
    loads: list[LoadSpec] = field(default_factory=list)
    capacitors: list[ShuntBank] = field(default_factory=list)
    reactors: list[ShuntBank] = field(default_factory=list)
    regulators: list[RegulatorSpec] = field(default_factory=list)
    base_power: float = 1000.0  # system base, kVA

    # -- lookup helpers -------------------------------------------------

    def bus(self, bus_id: str) -> Bus:
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise UnknownBusError(f"unknown bus {bus_id!r}")

    def has_bus(self, bus_id: str) -> bool:
        return any(b.id == bus_id for b in self.buses)

    def line(self, branch_id: str) -> LineBranch:
        for ln in self.lines:
            if ln.id == branch_id:
                return ln
        raise UnknownDeviceError(f"unknown branch {branch_id!r}")

    def load(self, load_id: str) -> LoadSpec:
        for ld in self.loads:
            if ld.id == load_id:
                return ld
        raise UnknownDeviceError(f"unknown load {load_id!r}")

    def regulator(self, reg_id: str) -> RegulatorSpec:
        for rg in self.regulators:
            if rg.id == reg_id:
                return rg
        raise UnknownDeviceError(f"unknown regulator {reg_id!r}")

    def regulator_for_branch(self, branch_id: str) -> RegulatorSpec | None:
        for rg in self.regulators:
            if rg.branch_ref == branch_id:
                return rg
        return None

    def shunts(self) -> list[ShuntBank]:
        return list(self.capacitors) + list(self.reactors)

    # -- structure ------------------------------------------------------

    def children(self) -> dict[str, list[LineBranch]]:
        out: dict[str, list[LineBranch]] = {b.id: [] for b in self.buses}
        for ln in self.lines:
            out[ln.from_bus].append(ln)
        return out

    def parent_branch(self) -> dict[str, LineBranch]:
        """Map bus id -> the branch feeding it (absent for the source)."""
        return {ln.to_bus: ln for ln in self.lines}

    def bus_order(self) -> list[str]:
        """Buses in breadth-first order from the source.

        Raises NotRadialError if the branch graph is not a tree rooted at
        the source bus.
        """
        if self.source is None:
            raise CircuitError(f"circuit {self.name}: no source defined")
        kids = self.children()
        order = [self.source.bus]
        seen = {self.source.bus}
        i = 0
        while i < len(order):
            for ln in kids[order[i]]:
                if ln.to_bus in seen:
                    raise NotRadialError(
                        f"circuit {self.name}: bus {ln.to_bus} fed twice (loop)"
                    )
                seen.add(ln.to_bus)
                order.append(ln.to_bus)
            i += 1
        if len(order) != len(self.buses):
            missing = sorted(b.id for b in self.buses if b.id not in seen)
            raise NotRadialError(
                f"circuit {self.name}: buses unreachable from source: {missing}"
            )
        if len(self.lines) != len(self.buses) - 1:
            raise NotRadialError(
                f"circuit {self.name}: {len(self.lines)} branches for "
                f"{len(self.buses)} buses breaks radiality"
            )
        return order

    def path_to_source(self, bus_id: str) -> list[LineBranch]:
        """Branches from `bus_id` up to the source, nearest first."""
        parent = self.parent_branch()
        path = []
        cur = bus_id
        while cur in parent:
            ln = parent[cur]
            path.append(ln)
            cur = ln.from_bus
        return path

    def validate(self) -> None:
        if self.base_power <= 0:
            raise CircuitError("base_power must be > 0")
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise CircuitError("duplicate bus ids")
        if self.source is None or not self.has_bus(self.source.bus):
            raise CircuitError("source bus missing")
        by_id = {b.id: b for b in self.buses}
        for ln in self.lines:
            for end in (ln.from_bus, ln.to_bus):
                if end not in by_id:
                    raise UnknownBusError(f"branch {ln.id}: unknown bus {end!r}")
            if not set(ln.phases) <= set(by_id[ln.from_bus].phases):
                raise CircuitError(
                    f"branch {ln.id}: phases {ln.phases} not present at {ln.from_bus}"
                )
            if set(by_id[ln.to_bus].phases) != set(ln.phases):
                raise CircuitError(
                    f"branch {ln.id}: bus {ln.to_bus} phases must match the "
                    f"feeding branch ({ln.phases})"
                )
        for dev in list(self.loads) + self.shunts():
            if dev.bus not in by_id:
                raise UnknownBusError(f"device {dev.id}: unknown bus {dev.bus!r}")
            if not set(dev.phases) <= set(by_id[dev.bus].phases):
                raise CircuitError(
                    f"device {dev.id}: phases {dev.phases} not present at {dev.bus}"
                )
        branch_ids = {ln.id for ln in self.lines}
        for rg in self.regulators:
            if rg.branch_ref not in branch_ids:
                raise UnknownDeviceError(
                    f"regulator {rg.id}: unknown branch {rg.branch_ref!r}"
                )
        self.bus_order()  # radiality + connectivity

    # -- serialization (deterministic) ----------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "base_power": self.base_power,
            "source": {
                "bus": self.source.bus,
                "v_pu": list(self.source.v_pu),
                "angle_deg": self.source.angle_deg,
                "base_kv": self.source.base_kv,
            },
            "buses": [
                {
                    "id": b.id,
                    "phases": list(b.phases),
                    "base_kv": b.base_kv,
                    "coord": list(b.coord) if b.coord else None,
                }
                for b in self.buses
            ],
            "lines": [
                {
                    "id": ln.id,
                    "from": ln.from_bus,
                    "to": ln.to_bus,
                    "phases": list(ln.phases),
                    "z_real": np.real(ln.z_matrix).tolist(),
                    "z_imag": np.imag(ln.z_matrix).tolist(),
                    "shunt_b": None if ln.shunt_b is None else ln.shunt_b.tolist(),
                }
                for ln in self.lines
            ],
            "loads": [
                {
                    "id": ld.id,
                    "bus": ld.bus,
                    "phases": list(ld.phases),
                    "kw": ld.kw,
                    "kvar": ld.kvar,
                    "connection": ld.connection,
                    "shape_ref": ld.shape_ref,
                }
                for ld in self.loads
            ],
            "capacitors": [_shunt_dict(s) for s in self.capacitors],
            "reactors": [_shunt_dict(s) for s in self.reactors],
            "regulators": [
                {
                    "id": rg.id,
                    "branch_ref": rg.branch_ref,
                    "taps": {p: rg.taps[p] for p in sorted(rg.taps)},
                    "step_pu": rg.step_pu,
                }
                for rg in self.regulators
            ],
        }

    def state_digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _shunt_dict(s: ShuntBank) -> dict:
    return {
        "id": s.id,
        "bus": s.bus,
        "phases": list(s.phases),
        "kvar": s.kvar,
        "kind": s.kind,
        "enabled": s.enabled,
    }


def positive_sequence_magnitude(phasors: dict[str, complex]) -> float:
    """Collapse per-phase voltage phasors to one per-unit scalar.

    Three phases: |(Va + a*Vb + a^2*Vc) / 3| with a = 1 at 120 degrees.
    One or two phases: mean of the available magnitudes (the sequence
    transform needs all three).
    """
    if not phasors:
        raise EmptyPhasorSetError("no phase voltages given")
    if set(phasors) == set(PHASES):
        v = (phasors["a"] + ALPHA * phasors["b"] + ALPHA * ALPHA * phasors["c"]) / 3.0
        return abs(v)
    return sum(abs(v) for v in phasors.values()) / len(phasors)
