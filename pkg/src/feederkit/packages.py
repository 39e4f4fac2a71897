"""Circuit packages: whitelisted loading, DSS-directive circuit building,
bundled feeder library, and topology-graph export.

A package is a directory holding master.dss, optional component .dss
files referenced via Redirect, an optional buscoords.csv ("bus,x,y"),
and an optional manifest.json with name/version.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .circuit import Bus, Circuit, LineBranch, LoadSpec, RegulatorSpec, ShuntBank, SourceSpec
from .dss import (
    Directive,
    UndefinedLineCodeError,
    UnresolvedRedirectError,
    UNIT_METERS,
    parse_bus_ref,
    parse_dss_subset,
)
from .loadshapes import LoadShape

FREQ_HZ = 60.0


class PathEscapesWhitelistError(PermissionError):
    """Requested path resolves outside the configured whitelist root."""


@dataclass
class CircuitPackage:
    name: str
    version: str
    root: Path
    master_file: str = "master.dss"
    files: dict[str, str] = field(default_factory=dict)  # filename -> text

    @property
    def buscoords(self) -> str | None:
        return self.files.get("buscoords.csv")


@dataclass
class TopologyGraph:
    nodes: list[dict]
    edges: list[dict]

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "edges": self.edges}


def _read_text(path: Path) -> str:
    # single read choke point so tests can probe every file access
    return path.read_text(encoding="utf-8")


def resolve_inside(root: Path, candidate: Path) -> Path:
    """Resolve symlinks and ensure `candidate` stays under `root`."""
    root_real = root.resolve()
    real = candidate.resolve()
    if root_real != real and root_real not in real.parents:
        raise PathEscapesWhitelistError(
            f"{candidate} resolves outside the whitelist root {root}"
        )
    return real


def read_circuit_package(path: str | Path, whitelist_root: str | Path) -> CircuitPackage:
    root = Path(whitelist_root)
    pkg_dir = resolve_inside(root, Path(path))
    if not pkg_dir.is_dir():
        raise FileNotFoundError(f"circuit package directory not found: {path}")
    master = pkg_dir / "master.dss"
    resolve_inside(root, master)
    if not master.is_file():
        raise FileNotFoundError(f"package {path} has no master.dss")

    name, version = Path(path).name, "0"
    manifest = pkg_dir / "manifest.json"
    files: dict[str, str] = {}
    if manifest.is_file():
        resolve_inside(root, manifest)
        meta = json.loads(_read_text(manifest))
        name = str(meta.get("name", name))
        version = str(meta.get("version", version))
        files["manifest.json"] = json.dumps(meta, indent=2, sort_keys=True)

    pkg = CircuitPackage(name=name, version=version, root=pkg_dir, files=files)
    pkg.files["master.dss"] = _read_text(master)

    # pull in every Redirect target (recursively) plus buscoords
    pending = ["master.dss"]
    seen = set(pending)
    while pending:
        fname = pending.pop()
        for directive in parse_dss_subset(pkg.files[fname]).directives:
            if directive.kind != "redirect":
                continue
            target = directive.name
            tpath = resolve_inside(root, pkg_dir / target)
            if not tpath.is_file():
                raise UnresolvedRedirectError(
                    f"redirect target {target!r} not found in package {name}"
                )
            if target not in seen:
                pkg.files[target] = _read_text(tpath)
                seen.add(target)
                pending.append(target)
    coords = pkg_dir / "buscoords.csv"
    if coords.is_file():
        resolve_inside(root, coords)
        pkg.files["buscoords.csv"] = _read_text(coords)
    return pkg


@dataclass
class BuildResult:
    circuit: Circuit
    shapes: list[LoadShape]
    warnings: list[str]


def _symmetric_matrix(rows, n: int) -> np.ndarray:
    """Lower-triangular (or full) rows -> symmetric n x n array."""
    if rows and not isinstance(rows[0], list):
        rows = [rows]
    m = np.zeros((n, n))
    if len(rows) == 1 and len(rows[0]) == n * n:
        return np.array(rows[0]).reshape(n, n)
    for i, row in enumerate(rows):
        for j, val in enumerate(row):
            m[i][j] = val
            m[j][i] = val
    return m


def _phases_from(params: dict, bus_phases: tuple[str, ...], default_n: int = 3):
    if bus_phases:
        return bus_phases
    n = int(params.get("phases", default_n))
    return ("a", "b", "c")[:n]


def build_circuit(directives: list[Directive], name_hint: str = "circuit") -> BuildResult:
    warnings: list[str] = []
    linecodes: dict[str, dict] = {}
    shapes: list[LoadShape] = []

    source = None
    circuit_name = name_hint
    src_phases = ("a", "b", "c")

    branches: list[LineBranch] = []
    loads: list[LoadSpec] = []
    caps: list[ShuntBank] = []
    reactors: list[ShuntBank] = []
    regulators: list[RegulatorSpec] = []
    reg_directives: list[Directive] = []
    xf_branch: dict[str, str] = {}  # transformer name -> branch id
    to_phases: dict[str, tuple[str, ...]] = {}
    endpoints: list[str] = []

    for d in directives:
        p = d.params
        if d.kind == "circuit":
            circuit_name = d.name
            bus, suffix = parse_bus_ref(p.get("bus1", "sourcebus"))
            n = int(p.get("phases", 3))
            src_phases = suffix or ("a", "b", "c")[:n]
            pu = float(p.get("pu", 1.0))
            source = SourceSpec(
                bus=bus,
                v_pu=(pu, pu, pu),
                angle_deg=float(p.get("angle", 0.0)),
                base_kv=float(p.get("basekv", 4.16)),
            )
            endpoints.append(bus)

        elif d.kind == "linecode":
            n = int(p.get("nphases", 3))
            linecodes[d.name] = {
                "n": n,
                "r": _symmetric_matrix(p.get("rmatrix", []), n),
                "x": _symmetric_matrix(p.get("xmatrix", []), n),
                "c": _symmetric_matrix(p.get("cmatrix", []), n) if "cmatrix" in p else None,
                "units": str(p.get("units", "none")).lower(),
            }

        elif d.kind == "line":
            bus1, ph1 = parse_bus_ref(p.get("bus1", ""))
            bus2, ph2 = parse_bus_ref(p.get("bus2", ""))
            phases = _phases_from(p, ph1 or ph2)
            n = len(phases)
            if str(p.get("switch", "no")).lower() in ("yes", "true", "1"):
                z = np.eye(n) * (1e-4 + 1e-4j)
                shunt_b = None
            elif "linecode" in p:
                code = str(p["linecode"]).lower()
                if code not in linecodes:
                    raise UndefinedLineCodeError(code)
                lc = linecodes[code]
                if lc["n"] != n:
                    warnings.append(
                        f"line {d.name}: linecode {code} is {lc['n']}-phase, "
                        f"line is {n}-phase"
                    )
                length = float(p.get("length", 1.0))
                units = str(p.get("units", lc["units"])).lower()
                factor = length * UNIT_METERS.get(units, 1.0) / UNIT_METERS.get(
                    lc["units"], 1.0
                )
                z = (lc["r"][:n, :n] + 1j * lc["x"][:n, :n]) * factor
                shunt_b = None
                if lc["c"] is not None:
                    c_nf = np.diag(lc["c"])[:n] * factor
                    shunt_b = 2.0 * math.pi * FREQ_HZ * c_nf * 1e-9
            else:
                r = _symmetric_matrix(p.get("rmatrix", [[0.0]]), n)
                x = _symmetric_matrix(p.get("xmatrix", [[0.0]]), n)
                z = r + 1j * x
                shunt_b = None
            branches.append(LineBranch(d.name, bus1, bus2, phases, z, shunt_b))
            to_phases[bus2] = phases
            endpoints += [bus1, bus2]

        elif d.kind == "transformer":
            buses = p.get("buses", [])
            if isinstance(buses, str) or len(buses) < 2:
                warnings.append(f"transformer {d.name}: needs buses=(b1, b2); ignored")
                continue
            bus1, ph1 = parse_bus_ref(buses[0])
            bus2, ph2 = parse_bus_ref(buses[1])
            phases = _phases_from(p, ph1 or ph2)
            n = len(phases)
            kvs = p.get("kvs", [4.16, 4.16])
            kvas = p.get("kvas", [1000.0, 1000.0])
            kv1 = float(kvs[0] if isinstance(kvs, list) else kvs)
            kva1 = float(kvas[0] if isinstance(kvas, list) else kvas)
            xhl = float(p.get("xhl", 2.0))
            r_pct = float(p.get("%r", p.get("r", 0.5)))
            z_base = kv1 * kv1 * 1000.0 / kva1
            z = np.eye(n) * complex(r_pct / 100.0, xhl / 100.0) * z_base
            branches.append(LineBranch(d.name, bus1, bus2, phases, z))
            xf_branch[d.name] = d.name
            to_phases[bus2] = phases
            endpoints += [bus1, bus2]

        elif d.kind == "regcontrol":
            reg_directives.append(d)

        elif d.kind == "load":
            bus, ph = parse_bus_ref(p.get("bus1", ""))
            phases = _phases_from(p, ph)
            conn = str(p.get("conn", "wye")).lower()
            conn = "delta" if conn in ("delta", "d", "ll") else "wye"
            model = int(p.get("model", 1))
            if model != 1:
                warnings.append(
                    f"load {d.name}: model={model} unsupported, using constant power"
                )
            shape = p.get("daily") or p.get("yearly")
            loads.append(
                LoadSpec(
                    d.name,
                    bus,
                    phases,
                    kw=float(p.get("kw", 0.0)),
                    kvar=float(p.get("kvar", 0.0)),
                    connection=conn,
                    shape_ref=str(shape).lower() if shape else None,
                )
            )

        elif d.kind in ("capacitor", "reactor"):
            bus, ph = parse_bus_ref(p.get("bus1", ""))
            phases = _phases_from(p, ph)
            bank = ShuntBank(
                d.name, bus, phases, kvar=float(p.get("kvar", 100.0)), kind=d.kind
            )
            (caps if d.kind == "capacitor" else reactors).append(bank)

        elif d.kind == "loadshape":
            mult = p.get("mult", [])
            interval = float(p.get("interval", 1.0))
            if "minterval" in p:
                interval = float(p["minterval"]) / 60.0
            shapes.append(
                LoadShape(
                    name=d.name,
                    interval_hours=interval,
                    multipliers=[float(m) for m in mult],
                    source="custom",
                )
            )

        elif d.kind in ("set", "solve", "redirect"):
            continue  # recorded by the parser; not executed here

    if source is None:
        raise ValueError("no 'New Circuit' directive found")

    # regulator taps: per-phase list or a single tapnum for every phase
    for d in reg_directives:
        p = d.params
        xf = str(p.get("transformer", "")).lower()
        if xf not in xf_branch:
            warnings.append(
                f"regcontrol {d.name}: transformer {xf!r} not defined; ignored"
            )
            continue
        branch = next(b for b in branches if b.id == xf_branch[xf])
        taps_param = p.get("taps")
        taps: dict[str, int] = {}
        if isinstance(taps_param, list):
            for i, ph in enumerate(branch.phases):
                if i < len(taps_param):
                    taps[ph] = int(taps_param[i])
        else:
            tapnum = int(p.get("tapnum", 0))
            taps = {ph: tapnum for ph in branch.phases}
        regulators.append(
            RegulatorSpec(
                d.name, branch.id, taps=taps, step_pu=float(p.get("step", 0.00625))
            )
        )

    bus_ids: list[str] = []
    for b in endpoints + [ld.bus for ld in loads] + [s.bus for s in caps + reactors]:
        if b and b not in bus_ids:
            bus_ids.append(b)
    base_kv = source.base_kv
    buses = []
    for bid in bus_ids:
        if bid == source.bus:
            phases = src_phases
        else:
            phases = to_phases.get(bid, ("a", "b", "c"))
        buses.append(Bus(bid, phases=phases, base_kv=base_kv))

    circuit = Circuit(
        name=circuit_name,
        buses=buses,
        source=source,
        lines=branches,
        loads=loads,
        capacitors=caps,
        reactors=reactors,
        regulators=regulators,
        base_power=5000.0,
    )
    return BuildResult(circuit, shapes, warnings)


def parse_buscoords(text: str) -> dict[str, tuple[float, float]]:
    coords = {}
    for row in text.splitlines():
        row = row.strip()
        if not row:
            continue
        parts = [p.strip() for p in row.split(",")]
        if len(parts) < 3:
            continue
        try:
            coords[parts[0].lower()] = (float(parts[1]), float(parts[2]))
        except ValueError:
            continue  # header or malformed row: tolerated
    return coords


def build_from_package(pkg: CircuitPackage) -> BuildResult:
    """Parse master + redirects in order and build the circuit."""
    directives: list[Directive] = []
    warnings: list[str] = []

    def expand(fname: str) -> None:
        res = parse_dss_subset(pkg.files[fname])
        warnings.extend(res.warnings)
        for d in res.directives:
            if d.kind == "redirect":
                expand(d.name)
            else:
                directives.append(d)

    expand("master.dss")
    built = build_circuit(directives, name_hint=pkg.name)
    built.warnings[:0] = warnings
    if pkg.buscoords:
        coords = parse_buscoords(pkg.buscoords)
        for bus in built.circuit.buses:
            if bus.id in coords:
                bus.coord = coords[bus.id]
    built.circuit.validate()
    return built


def load_circuit_package(path: str | Path, whitelist_root: str | Path) -> Circuit:
    """Load, parse, and build a circuit from a whitelisted package dir."""
    pkg = read_circuit_package(path, whitelist_root)
    return build_from_package(pkg).circuit


# -- bundled feeder library ----------------------------------------------


def library_dir() -> Path:
    return Path(str(resources.files("feederkit") / "data"))


def list_library_circuits() -> list[dict]:
    out = []
    base = library_dir()
    for child in sorted(base.iterdir()):
        if (child / "master.dss").is_file():
            meta = {"name": child.name, "version": "0"}
            manifest = child / "manifest.json"
            if manifest.is_file():
                meta.update(json.loads(manifest.read_text()))
            meta["description"] = meta.get("description", "")
            out.append(meta)
    return out


def load_library_package(name: str) -> CircuitPackage:
    base = library_dir()
    target = base / name
    if not target.is_dir():
        known = [c["name"] for c in list_library_circuits()]
        raise FileNotFoundError(
            f"unknown library circuit {name!r}; available: {', '.join(known)}"
        )
    return read_circuit_package(target, base)


# -- topology export -------------------------------------------------------

# when several element kinds share a bus the most salient one wins
_KIND_RANK = {"source": 0, "regulator": 1, "capacitor": 2, "load": 3, "junction": 4}


def topology_graph(circuit: Circuit) -> TopologyGraph:
    kinds: dict[str, str] = {b.id: "junction" for b in circuit.buses}

    def promote(bus: str, kind: str) -> None:
        if _KIND_RANK[kind] < _KIND_RANK[kinds[bus]]:
            kinds[bus] = kind

    for ld in circuit.loads:
        promote(ld.bus, "load")
    for bank in circuit.capacitors:
        promote(bank.bus, "capacitor")
    for reg in circuit.regulators:
        branch = circuit.line(reg.branch_ref)
        promote(branch.to_bus, "regulator")
    if circuit.source is not None:
        promote(circuit.source.bus, "source")

    nodes = [
        {
            "id": b.id,
            "coord": list(b.coord) if b.coord else None,
            "base_kv": b.base_kv,
            "element_kind": kinds[b.id],
        }
        for b in circuit.buses
    ]
    edges = [
        {"from": ln.from_bus, "to": ln.to_bus, "branch": ln.id}
        for ln in circuit.lines
    ]
    return TopologyGraph(nodes=nodes, edges=edges)
