"""Shared circuit builders for the test suite."""

from __future__ import annotations

import math

import numpy as np

from feederkit.circuit import PHASES, Bus, Circuit, LineBranch, LoadSpec, RegulatorSpec, ShuntBank, SourceSpec

# Two-bus single-phase golden case. Chosen so that per-unit quantities are
# exactly v_s=1.0, z=0.01+0.02j, s=0.1+0.05j on a 1 MVA per-phase base:
# the receiving voltage then equals the closed-form quadratic root below.
TWO_BUS_VR_PU = 0.9979948521210231  # sqrt of the high root of
# u^2 + u*(2a - 1) + a^2 + b^2 = 0, a = Re(z conj(s)) = 0.002,
# b = Im(z conj(s)) = 0.0015 (computed independently before the solver).
TWO_BUS_VR_COMPLEX = 0.9979937248600629 - 0.0015j


def two_bus_circuit() -> Circuit:
    base_kv = 4.16
    v_ln = base_kv * 1000.0 / math.sqrt(3.0)
    s_phase_base = 1_000_000.0  # VA
    z_base = v_ln * v_ln / s_phase_base
    z = (0.01 + 0.02j) * z_base
    return Circuit(
        name="two_bus",
        buses=[
            Bus("src", phases=("a",), base_kv=base_kv),
            Bus("recv", phases=("a",), base_kv=base_kv),
        ],
        source=SourceSpec(bus="src", v_pu=(1.0, 1.0, 1.0), base_kv=base_kv),
        lines=[
            LineBranch("ln1", "src", "recv", ("a",), np.array([[z]], dtype=complex))
        ],
        loads=[LoadSpec("ld1", "recv", ("a",), kw=100.0, kvar=50.0)],
        base_power=3000.0,
    )


def no_load_circuit() -> Circuit:
    z = np.array(
        [
            [0.2 + 0.5j, 0.05 + 0.15j, 0.05 + 0.15j],
            [0.05 + 0.15j, 0.2 + 0.5j, 0.05 + 0.15j],
            [0.05 + 0.15j, 0.05 + 0.15j, 0.2 + 0.5j],
        ]
    )
    return Circuit(
        name="no_load",
        buses=[Bus("s"), Bus("m"), Bus("e")],
        source=SourceSpec(bus="s"),
        lines=[
            LineBranch("l1", "s", "m", PHASES, z),
            LineBranch("l2", "m", "e", PHASES, 0.5 * z),
        ],
        base_power=1000.0,
    )


def small_feeder(load_scale: float = 1.0, taps: int = 0) -> Circuit:
    """Six-bus three-phase feeder with a regulator; heavily loaded when
    load_scale pushes remote buses under 0.95 pu."""
    z_cfg = np.array(
        [
            [0.35 + 1.0j, 0.15 + 0.5j, 0.15 + 0.45j],
            [0.15 + 0.5j, 0.35 + 1.05j, 0.15 + 0.46j],
            [0.15 + 0.45j, 0.15 + 0.46j, 0.35 + 1.1j],
        ]
    )
    mk = lambda s: (z_cfg * s).copy()
    ckt = Circuit(
        name="small_feeder",
        buses=[
            Bus("sub"),
            Bus("reg_out"),
            Bus("b1"),
            Bus("b2"),
            Bus("b3"),
            Bus("b4"),
        ],
        source=SourceSpec(bus="sub"),
        lines=[
            LineBranch("reg_branch", "sub", "reg_out", PHASES, mk(0.02)),
            LineBranch("f1", "reg_out", "b1", PHASES, mk(1.0)),
            LineBranch("f2", "b1", "b2", PHASES, mk(1.0)),
            LineBranch("f3", "b2", "b3", PHASES, mk(0.8)),
            LineBranch("f4", "b3", "b4", PHASES, mk(0.8)),
        ],
        loads=[
            LoadSpec("ld_b1", "b1", PHASES, kw=400.0 * load_scale, kvar=200.0 * load_scale),
            LoadSpec("ld_b2", "b2", PHASES, kw=500.0 * load_scale, kvar=260.0 * load_scale),
            LoadSpec("ld_b3", "b3", PHASES, kw=350.0 * load_scale, kvar=180.0 * load_scale),
            LoadSpec("ld_b4", "b4", PHASES, kw=300.0 * load_scale, kvar=150.0 * load_scale),
        ],
        regulators=[
            RegulatorSpec("reg1", "reg_branch", taps={p: taps for p in PHASES})
        ],
        base_power=5000.0,
    )
    return ckt


def random_radial_circuit(seed: int, max_buses: int = 10) -> Circuit:
    """Seeded random radial circuit: mixed phasing, loads (some negative),
    banks, sometimes a regulator and line charging."""
    rng = np.random.default_rng(seed)
    n_buses = int(rng.integers(2, max_buses + 1))
    buses = [Bus("bus0", phases=PHASES, base_kv=4.16)]
    lines = []
    loads = []
    caps = []
    reactors = []
    regulators = []
    for i in range(1, n_buses):
        parent = buses[int(rng.integers(0, len(buses)))]
        k = int(rng.integers(1, len(parent.phases) + 1))
        phase_pick = sorted(rng.choice(len(parent.phases), size=k, replace=False))
        phases = tuple(parent.phases[j] for j in phase_pick)
        n = len(phases)
        self_z = rng.uniform(0.05, 0.3) + 1j * rng.uniform(0.15, 0.6)
        mutual = (rng.uniform(0.01, 0.04) + 1j * rng.uniform(0.05, 0.15)) if n > 1 else 0
        z = np.full((n, n), mutual, dtype=complex)
        np.fill_diagonal(z, [self_z * rng.uniform(0.9, 1.1) for _ in range(n)])
        z = (z + z.T) / 2.0
        shunt_b = None
        if rng.random() < 0.3:
            shunt_b = np.full(n, rng.uniform(1e-6, 8e-6))
        bus = Bus(f"bus{i}", phases=phases, base_kv=4.16)
        buses.append(bus)
        lines.append(
            LineBranch(f"line{i}", parent.id, bus.id, phases, z, shunt_b=shunt_b)
        )
        if rng.random() < 0.8:
            kw = rng.uniform(-80.0, 250.0)
            kvar = rng.uniform(0.0, 120.0)
            conn = "delta" if (n >= 2 and rng.random() < 0.3) else "wye"
            loads.append(
                LoadSpec(f"load{i}", bus.id, phases, kw=kw, kvar=kvar, connection=conn)
            )
        if rng.random() < 0.25:
            caps.append(
                ShuntBank(f"cap{i}", bus.id, phases, kvar=float(rng.uniform(50, 300)))
            )
        elif rng.random() < 0.1:
            reactors.append(
                ShuntBank(
                    f"rx{i}", bus.id, phases, kvar=float(rng.uniform(50, 200)),
                    kind="reactor",
                )
            )
    if lines and rng.random() < 0.4:
        branch = lines[int(rng.integers(0, len(lines)))]
        taps = {p: int(rng.integers(-16, 17)) for p in branch.phases}
        regulators.append(RegulatorSpec("rreg", branch.id, taps=taps))
    return Circuit(
        name=f"random_{seed}",
        buses=buses,
        source=SourceSpec(bus="bus0"),
        lines=lines,
        loads=loads,
        capacitors=caps,
        reactors=reactors,
        regulators=regulators,
        base_power=1000.0,
    )
