"""Independent power-flow oracle: Newton iteration on the full complex
nodal current-balance equations.

This module shares only the circuit *model* (device semantics) with the
sweep solver; the solution path is entirely different. It assembles the
bus admittance matrix over all (bus, phase) nodes, treats source-bus
phases as fixed, and drives the current mismatch

    F(V) = Y V + I_drawn(V) = 0

to zero with an analytic Jacobian in rectangular coordinates. Regulated
branches enter Y as a series impedance behind an ideal per-phase ratio;
shunt banks and line charging are constant admittances on the diagonal.

Used by the test suite as the ground truth the sweep is checked against.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit
from .solver import SolveResult


class SingularJacobianError(RuntimeError):
    pass


class OracleNoConvergenceError(RuntimeError):
    pass


def _node_index(circuit: Circuit) -> dict[tuple[str, str], int]:
    idx = {}
    for b in circuit.buses:
        for p in b.phases:
            idx[(b.id, p)] = len(idx)
    return idx


def _assemble_y(circuit: Circuit, idx: dict[tuple[str, str], int]) -> np.ndarray:
    n = len(idx)
    y = np.zeros((n, n), dtype=complex)
    for ln in circuit.lines:
        yl = np.linalg.inv(ln.z_matrix)
        reg = circuit.regulator_for_branch(ln.id)
        if reg is None:
            r_inv = np.eye(len(ln.phases))
        else:
            r_inv = np.diag([1.0 / reg.ratio(p) for p in ln.phases])
        # two-port blocks for series Z followed by an ideal 1:r transformer
        blocks = {
            ("f", "f"): yl,
            ("f", "t"): -yl @ r_inv,
            ("t", "f"): -r_inv @ yl,
            ("t", "t"): r_inv @ yl @ r_inv,
        }
        ends = {"f": ln.from_bus, "t": ln.to_bus}
        for (ea, eb), blk in blocks.items():
            for i, pi in enumerate(ln.phases):
                ka = (ends[ea], pi)
                if ka not in idx:
                    continue
                for j, pj in enumerate(ln.phases):
                    kb = (ends[eb], pj)
                    if kb in idx:
                        y[idx[ka], idx[kb]] += blk[i, j]
        if ln.shunt_b is not None:
            for k, p in enumerate(ln.phases):
                for end in (ln.from_bus, ln.to_bus):
                    key = (end, p)
                    if key in idx:
                        y[idx[key], idx[key]] += 1j * ln.shunt_b[k] / 2.0
    for bank in circuit.shunts():
        if not bank.enabled:
            continue
        b_s = bank.susceptance(circuit.bus(bank.bus).base_v_ln)
        y_sh = 1j * b_s if bank.kind == "capacitor" else -1j * b_s
        for p in bank.phases:
            k = idx[(bank.bus, p)]
            y[k, k] += y_sh
    return y


def oracle_solve(
    circuit: Circuit,
    tol_pu: float = 1e-11,
    max_iter: int = 60,
    load_multipliers: dict[str, float] | None = None,
) -> SolveResult:
    circuit.validate()
    idx = _node_index(circuit)
    n = len(idx)
    y = _assemble_y(circuit, idx)

    base_ln = np.empty(n)
    for b in circuit.buses:
        for p in b.phases:
            base_ln[idx[(b.id, p)]] = b.base_v_ln

    s_node = np.zeros(n, dtype=complex)  # constant-power demand per node, VA
    for ld in circuit.loads:
        m = 1.0 if load_multipliers is None else load_multipliers.get(ld.id, 1.0)
        for p, s in ld.phase_powers(m).items():
            s_node[idx[(ld.bus, p)]] += s

    src = circuit.source
    src_bus = circuit.bus(src.bus)
    fixed = np.zeros(n, dtype=bool)
    v = np.empty(n, dtype=complex)
    for b in circuit.buses:
        for p in b.phases:
            k = idx[(b.id, p)]
            if b.id == src.bus:
                fixed[k] = True
                v[k] = src.voltage(p, src_bus.base_v_ln)
            else:
                v[k] = src.voltage(p, b.base_v_ln)
    free = ~fixed
    fi = np.where(free)[0]

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        f = y @ v + np.conj(s_node / v)
        f = f[fi]
        # analytic Jacobian of [Re F; Im F] w.r.t. [Re V; Im V] at free nodes
        m = len(fi)
        de = y[np.ix_(fi, fi)].copy()
        df = 1j * y[np.ix_(fi, fi)]
        diag = np.conj(s_node[fi]) / np.conj(v[fi]) ** 2
        de[np.arange(m), np.arange(m)] += -diag
        df[np.arange(m), np.arange(m)] += 1j * diag
        jac = np.block(
            [[de.real, df.real],
             [de.imag, df.imag]]
        )
        rhs = np.concatenate([f.real, f.imag])
        try:
            step = np.linalg.solve(jac, -rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(str(exc)) from exc
        dv = step[:m] + 1j * step[m:]
        v[fi] += dv
        if np.max(np.abs(dv) / base_ln[fi]) < tol_pu:
            converged = True
            break
    if not converged:
        raise OracleNoConvergenceError(
            f"oracle did not converge in {max_iter} iterations"
        )

    # branch losses from nodal voltages (series elements only)
    loss = 0j
    for ln in circuit.lines:
        reg = circuit.regulator_for_branch(ln.id)
        ratios = np.array(
            [1.0 if reg is None else reg.ratio(p) for p in ln.phases]
        )
        v_from = np.array([v[idx[(ln.from_bus, p)]] for p in ln.phases])
        v_to = np.array(
            [
                v[idx[(ln.to_bus, p)]] if (ln.to_bus, p) in idx else 0j
                for p in ln.phases
            ]
        )
        v_mid = v_to / ratios
        i_series = np.linalg.inv(ln.z_matrix) @ (v_from - v_mid)
        loss += np.sum((v_from - v_mid) * np.conj(i_series))

    voltages = {
        b.id: {p: complex(v[idx[(b.id, p)]]) / b.base_v_ln for p in b.phases}
        for b in circuit.buses
    }
    residual = y @ v + np.conj(s_node / v)
    return SolveResult(
        converged=True,
        iterations=iterations,
        bus_voltages=voltages,
        total_loss_kw=float(loss.real) / 1000.0,
        total_loss_kvar=float(loss.imag) / 1000.0,
        max_mismatch=float(np.max(np.abs(residual[fi]))),
    )
