"""Engine session: the single live circuit an MCP server process owns.

All tool execution on a session is serialized through one re-entrant
lock, mirroring the one-engine-per-process design: concurrent requests
queue, skills re-enter freely.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from ..circuit import Circuit
from ..loadshapes import ShapeRegistry
from ..packages import CircuitPackage
from ..qsts import QstsResult
from ..solver import SolveResult


class EngineBusyError(RuntimeError):
    """Raised when the session lock cannot be acquired in time."""


class EngineSession:
    def __init__(self, whitelist_root: str | Path | None = None):
        self.lock = threading.RLock()
        self.whitelist_root = Path(whitelist_root) if whitelist_root else None
        self.shapes = ShapeRegistry(usage_probe=self._shapes_in_use)
        self.circuit: Circuit | None = None
        self.package: CircuitPackage | None = None
        self.last_solve: SolveResult | None = None
        self.qsts_result: QstsResult | None = None
        self.skill_reports: dict[str, dict] = {}

    def _shapes_in_use(self):
        if self.circuit is None:
            return set()
        return {ld.shape_ref for ld in self.circuit.loads if ld.shape_ref}

    def install_circuit(self, circuit: Circuit, package: CircuitPackage | None,
                        shapes=()) -> None:
        self.circuit = circuit
        self.package = package
        self.last_solve = None
        self.qsts_result = None
        for shape in shapes:
            if not self.shapes.exists(shape.name):
                self.shapes.create(
                    shape.name, shape.interval_hours, shape.multipliers,
                    source=shape.source,
                )

    def invalidate_results(self) -> None:
        """Equipment changed: cached solve/QSTS results no longer apply."""
        self.last_solve = None
        self.qsts_result = None

    def state_digest(self) -> str:
        """Hash of everything a tool call may mutate; used to prove that
        rejected calls leave the engine untouched."""
        parts = {
            "circuit": self.circuit.to_dict() if self.circuit else None,
            "package": self.package.name if self.package else None,
            "shapes": [s.to_dict() for s in self.shapes.list()],
            "solved": self.last_solve.to_dict() if self.last_solve else None,
            "qsts_steps": len(self.qsts_result.voltages) if self.qsts_result else None,
            "skills": sorted(self.skill_reports),
        }
        blob = json.dumps(parts, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()

    def dispatch(self, tool_name: str, args: dict | None = None):
        # wiring lives in tools.py; bound here for convenience
        from .tools import dispatch_tool

        return dispatch_tool(tool_name, args or {}, self)
