"""Forward-backward sweep power flow for radial three-phase feeders.

The sweep alternates a backward pass (aggregate branch currents from the
leaves toward the source) with a forward pass (propagate voltage drops
from the source outward) until the largest per-phase voltage change falls
below tolerance. Loads are constant-power, shunt banks are fixed
admittances (Q scales with |V|^2), and regulator taps act as an ideal
per-phase ratio of 1 + step_pu * tap on the regulated branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, LineBranch, positive_sequence_magnitude

DEFAULT_TOL = 1e-8  # pu voltage change between sweeps
DEFAULT_MAX_ITER = 100


class NoConvergenceError(RuntimeError):
    """Raised by callers that require a converged result."""


@dataclass
class SolveResult:
    converged: bool
    iterations: int
    bus_voltages: dict[str, dict[str, complex]]  # bus -> phase -> pu phasor
    total_loss_kw: float
    total_loss_kvar: float
    max_mismatch: float

    def voltage_pu(self, bus_id: str) -> float:
        return positive_sequence_magnitude(self.bus_voltages[bus_id])

    def all_voltages_pu(self) -> dict[str, float]:
        return {b: positive_sequence_magnitude(v) for b, v in self.bus_voltages.items()}

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "total_loss_kw": self.total_loss_kw,
            "total_loss_kvar": self.total_loss_kvar,
            "max_mismatch": self.max_mismatch,
            "bus_voltages": {
                b: {
                    p: {"real": v.real, "imag": v.imag, "magnitude": abs(v)}
                    for p, v in phs.items()
                }
                for b, phs in self.bus_voltages.items()
            },
        }


@dataclass
class _Net:
    """Per-solve working arrays keyed by bus id / branch id."""

    circuit: Circuit
    order: list[str] = field(default_factory=list)
    v: dict[str, np.ndarray] = field(default_factory=dict)  # bus -> volts per phase
    phase_index: dict[str, dict[str, int]] = field(default_factory=dict)
    base_v_ln: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        ckt = self.circuit
        self.order = ckt.bus_order()
        for b in ckt.buses:
            self.phase_index[b.id] = {p: i for i, p in enumerate(b.phases)}
            self.base_v_ln[b.id] = b.base_v_ln

    def init_flat(self) -> None:
        """Source voltage propagated down the tree with regulator ratios."""
        ckt = self.circuit
        src = ckt.source
        src_bus = ckt.bus(src.bus)
        self.v[src.bus] = np.array(
            [src.voltage(p, src_bus.base_v_ln) for p in src_bus.phases], dtype=complex
        )
        parent = ckt.parent_branch()
        for bid in self.order[1:]:
            ln = parent[bid]
            ratios = _branch_ratios(ckt, ln)
            vp = self.v[ln.from_bus]
            from_idx = self.phase_index[ln.from_bus]
            bus = ckt.bus(bid)
            self.v[bid] = np.array(
                [vp[from_idx[p]] * ratios[ln.phases.index(p)] for p in bus.phases],
                dtype=complex,
            )


def _branch_ratios(ckt: Circuit, ln: LineBranch) -> np.ndarray:
    reg = ckt.regulator_for_branch(ln.id)
    if reg is None:
        return np.ones(len(ln.phases))
    return np.array([reg.ratio(p) for p in ln.phases])


def _injection_currents(net: _Net, multipliers: dict[str, float] | None) -> dict[str, np.ndarray]:
    """Per-bus currents drawn out of each bus by loads, banks and charging."""
    ckt = net.circuit
    inj = {b.id: np.zeros(len(b.phases), dtype=complex) for b in ckt.buses}
    for ld in ckt.loads:
        m = 1.0 if multipliers is None else multipliers.get(ld.id, 1.0)
        powers = ld.phase_powers(m)
        idx = net.phase_index[ld.bus]
        vbus = net.v[ld.bus]
        for p, s in powers.items():
            vp = vbus[idx[p]]
            if abs(vp) < 1e-9:
                continue
            inj[ld.bus][idx[p]] += np.conj(s / vp)
    for bank in ckt.shunts():
        if not bank.enabled:
            continue
        b_s = bank.susceptance(net.base_v_ln[bank.bus])
        # capacitor admittance +jB injects Q; reactor -jB absorbs it
        y = 1j * b_s if bank.kind == "capacitor" else -1j * b_s
        idx = net.phase_index[bank.bus]
        for p in bank.phases:
            inj[bank.bus][idx[p]] += y * net.v[bank.bus][idx[p]]
    for ln in ckt.lines:
        if ln.shunt_b is None:
            continue
        for end in (ln.from_bus, ln.to_bus):
            idx = net.phase_index[end]
            for k, p in enumerate(ln.phases):
                if p in idx:
                    y = 1j * ln.shunt_b[k] / 2.0
                    inj[end][idx[p]] += y * net.v[end][idx[p]]
    return inj


def solve_power_flow(
    circuit: Circuit,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    load_multipliers: dict[str, float] | None = None,
) -> SolveResult:
    """Solve the circuit; returns converged=False after max_iter sweeps.

    `load_multipliers` scales individual loads (QSTS uses this); an absent
    entry means 1.0.
    """
    circuit.validate()
    net = _Net(circuit)
    net.init_flat()
    parent = circuit.parent_branch()
    kids = circuit.children()

    mismatch = float("inf")
    iterations = 0
    branch_primary: dict[str, np.ndarray] = {}
    for iterations in range(1, max_iter + 1):
        inj = _injection_currents(net, load_multipliers)

        # backward: leaf-to-source current aggregation
        branch_primary = {}
        for bid in reversed(net.order):
            if bid not in parent:
                continue
            ln = parent[bid]
            sec = np.zeros(len(ln.phases), dtype=complex)
            bus_idx = net.phase_index[bid]
            for k, p in enumerate(ln.phases):
                if p in bus_idx:
                    sec[k] += inj[bid][bus_idx[p]]
            for child in kids[bid]:
                cp = branch_primary[child.id]
                for k, p in enumerate(child.phases):
                    sec[ln.phases.index(p)] += cp[k]
            branch_primary[ln.id] = _branch_ratios(circuit, ln) * sec

        # forward: source-to-leaf voltage propagation
        mismatch = 0.0
        for bid in net.order[1:]:
            ln = parent[bid]
            from_idx = net.phase_index[ln.from_bus]
            v_from = np.array(
                [net.v[ln.from_bus][from_idx[p]] for p in ln.phases], dtype=complex
            )
            v_mid = v_from - ln.z_matrix @ branch_primary[ln.id]
            v_to = _branch_ratios(circuit, ln) * v_mid
            bus_idx = net.phase_index[bid]
            new = net.v[bid].copy()
            for k, p in enumerate(ln.phases):
                if p in bus_idx:
                    new[bus_idx[p]] = v_to[k]
            delta = np.max(np.abs(new - net.v[bid])) / net.base_v_ln[bid]
            mismatch = max(mismatch, delta)
            net.v[bid] = new

        if mismatch < tol:
            break

    converged = bool(mismatch < tol)

    loss = 0j
    for ln in circuit.lines:
        i_prim = branch_primary.get(ln.id)
        if i_prim is None:
            continue
        v_drop = ln.z_matrix @ i_prim
        loss += np.sum(v_drop * np.conj(i_prim))

    voltages = {
        b.id: {
            p: complex(net.v[b.id][net.phase_index[b.id][p]]) / net.base_v_ln[b.id]
            for p in b.phases
        }
        for b in circuit.buses
    }
    return SolveResult(
        converged=converged,
        iterations=iterations,
        bus_voltages=voltages,
        total_loss_kw=float(loss.real) / 1000.0,
        total_loss_kvar=float(loss.imag) / 1000.0,
        max_mismatch=float(mismatch),
    )


def power_balance_residual(
    circuit: Circuit,
    result: SolveResult,
    load_multipliers: dict[str, float] | None = None,
) -> float:
    """|source injection - loads - shunts - charging - losses| in pu.

    Recomputed from the solved voltages and the circuit data alone; the
    residual is normalized on the system base power.
    """
    volts = {
        b.id: {p: result.bus_voltages[b.id][p] * b.base_v_ln for p in b.phases}
        for b in circuit.buses
    }

    s_drawn = 0j
    for ld in circuit.loads:
        m = 1.0 if load_multipliers is None else load_multipliers.get(ld.id, 1.0)
        s_drawn += sum(ld.phase_powers(m).values())
    for bank in circuit.shunts():
        if not bank.enabled:
            continue
        b_s = bank.susceptance(circuit.bus(bank.bus).base_v_ln)
        y = 1j * b_s if bank.kind == "capacitor" else -1j * b_s
        for p in bank.phases:
            v = volts[bank.bus][p]
            s_drawn += v * np.conj(y * v)
    for ln in circuit.lines:
        if ln.shunt_b is None:
            continue
        for end in (ln.from_bus, ln.to_bus):
            end_phases = circuit.bus(end).phases
            for k, p in enumerate(ln.phases):
                if p in end_phases:
                    y = 1j * ln.shunt_b[k] / 2.0
                    v = volts[end][p]
                    s_drawn += v * np.conj(y * v)

    # recompute branch currents bottom-up from the drawn currents
    net = _Net(circuit)
    net.v = {
        b.id: np.array([volts[b.id][p] for p in b.phases], dtype=complex)
        for b in circuit.buses
    }
    inj = _injection_currents(net, load_multipliers)
    parent = circuit.parent_branch()
    kids = circuit.children()
    branch_primary: dict[str, np.ndarray] = {}
    for bid in reversed(net.order):
        if bid not in parent:
            continue
        ln = parent[bid]
        sec = np.zeros(len(ln.phases), dtype=complex)
        bus_idx = net.phase_index[bid]
        for k, p in enumerate(ln.phases):
            if p in bus_idx:
                sec[k] += inj[bid][bus_idx[p]]
        for child in kids[bid]:
            cp = branch_primary[child.id]
            for k, p in enumerate(child.phases):
                sec[ln.phases.index(p)] += cp[k]
        branch_primary[ln.id] = _branch_ratios(circuit, ln) * sec

    loss = 0j
    for ln in circuit.lines:
        i_prim = branch_primary[ln.id]
        loss += complex(np.sum((ln.z_matrix @ i_prim) * np.conj(i_prim)))

    src_bus = circuit.bus(circuit.source.bus)
    src_idx = net.phase_index[src_bus.id]
    i_src = inj[src_bus.id].copy()
    for child in kids[src_bus.id]:
        cp = branch_primary[child.id]
        for k, p in enumerate(child.phases):
            i_src[src_idx[p]] += cp[k]
    s_source = complex(np.sum(net.v[src_bus.id] * np.conj(i_src)))

    residual = s_source - s_drawn - loss
    return abs(residual) / (circuit.base_power * 1000.0)
