"""Load-shape lifecycle and the built-in profile library.

Shapes are named per-unit multiplier series assigned to loads by name;
QSTS scales each load by its shape's multiplier at every step. Ten
built-in synthetic profiles cover the usual archetypes; all are
normalized to peak 1.0 except peak_stress (1.4), the worst-case profile
the acceptance scenarios lean on.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field


class ShapeError(ValueError):
    pass


class DuplicateNameError(ShapeError):
    pass


class UnknownShapeError(ShapeError):
    pass


class BuiltinImmutableError(ShapeError):
    pass


class ShapeInUseError(ShapeError):
    pass


class MalformedRowError(ShapeError):
    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


class NonFiniteValueError(ShapeError):
    pass


@dataclass
class LoadShape:
    name: str
    interval_hours: float
    multipliers: list[float]
    source: str = "custom"  # builtin | custom

    def __post_init__(self):
        if self.interval_hours <= 0:
            raise ShapeError(f"shape {self.name}: interval_hours must be > 0")
        if not self.multipliers:
            raise ShapeError(f"shape {self.name}: multipliers must be nonempty")
        for m in self.multipliers:
            if not math.isfinite(m):
                raise NonFiniteValueError(f"shape {self.name}: non-finite multiplier")
            if m < 0:
                raise ShapeError(f"shape {self.name}: multipliers must be >= 0")

    def at(self, step: int) -> float:
        """Multiplier at time step `step`, wrapping past the end."""
        return self.multipliers[step % len(self.multipliers)]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "interval_hours": self.interval_hours,
            "multipliers": list(self.multipliers),
            "source": self.source,
        }


def _profile(name: str, mult: list[float]) -> LoadShape:
    return LoadShape(name, 1.0, mult, source="builtin")


def builtin_profiles() -> list[LoadShape]:
    """The ten built-in synthetic 24-hour profiles.

    residential, commercial_office, data_center, industrial,
    solar_generation and peak_stress follow the usual archetypes; the
    remaining four (ev_charging, street_lighting, agricultural,
    hospital) are repo-defined synthetics.
    """
    return [
        _profile("residential", [
            0.42, 0.38, 0.35, 0.33, 0.33, 0.38, 0.52, 0.65, 0.62, 0.55,
            0.50, 0.48, 0.47, 0.46, 0.48, 0.55, 0.72, 0.88, 0.97, 1.00,
            0.95, 0.82, 0.65, 0.50,
        ]),
        _profile("commercial_office", [
            0.25, 0.24, 0.24, 0.24, 0.25, 0.30, 0.45, 0.70, 0.90, 0.98,
            1.00, 1.00, 0.97, 0.98, 1.00, 0.98, 0.92, 0.80, 0.60, 0.45,
            0.38, 0.32, 0.28, 0.26,
        ]),
        _profile("data_center", [
            0.92, 0.91, 0.90, 0.90, 0.90, 0.91, 0.93, 0.95, 0.97, 0.98,
            1.00, 1.00, 1.00, 1.00, 0.99, 0.99, 0.98, 0.97, 0.96, 0.95,
            0.94, 0.93, 0.93, 0.92,
        ]),
        _profile("industrial", [
            0.35, 0.35, 0.35, 0.35, 0.40, 0.60, 0.90, 1.00, 1.00, 0.98,
            0.97, 0.96, 0.90, 0.95, 1.00, 1.00, 0.98, 0.95, 0.80, 0.60,
            0.50, 0.45, 0.40, 0.37,
        ]),
        _profile("solar_generation", [
            0.00, 0.00, 0.00, 0.00, 0.00, 0.02, 0.12, 0.30, 0.52, 0.72,
            0.88, 0.97, 1.00, 0.97, 0.88, 0.72, 0.52, 0.30, 0.12, 0.02,
            0.00, 0.00, 0.00, 0.00,
        ]),
        _profile("peak_stress", [
            0.60, 0.55, 0.52, 0.50, 0.52, 0.60, 0.80, 1.00, 1.05, 1.05,
            1.00, 0.98, 0.95, 0.95, 1.00, 1.10, 1.25, 1.38, 1.40, 1.38,
            1.30, 1.10, 0.90, 0.70,
        ]),
        _profile("ev_charging", [
            0.95, 1.00, 0.98, 0.90, 0.75, 0.55, 0.35, 0.20, 0.12, 0.10,
            0.10, 0.12, 0.15, 0.15, 0.15, 0.18, 0.25, 0.40, 0.55, 0.65,
            0.75, 0.85, 0.92, 0.95,
        ]),
        _profile("street_lighting", [
            1.00, 1.00, 1.00, 1.00, 1.00, 0.80, 0.30, 0.00, 0.00, 0.00,
            0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.30, 0.80, 1.00,
            1.00, 1.00, 1.00, 1.00,
        ]),
        _profile("agricultural", [
            0.15, 0.15, 0.15, 0.15, 0.20, 0.35, 0.60, 0.85, 1.00, 1.00,
            1.00, 0.98, 0.95, 0.95, 0.98, 1.00, 0.95, 0.80, 0.60, 0.40,
            0.25, 0.20, 0.18, 0.15,
        ]),
        _profile("hospital", [
            0.72, 0.70, 0.70, 0.70, 0.72, 0.76, 0.84, 0.92, 0.97, 1.00,
            1.00, 1.00, 0.98, 0.98, 0.97, 0.95, 0.92, 0.90, 0.88, 0.85,
            0.82, 0.78, 0.75, 0.73,
        ]),
    ]


class ShapeRegistry:
    """Named shape store; built-ins are immutable, reads may be concurrent."""

    def __init__(self, usage_probe=None):
        self._shapes: dict[str, LoadShape] = {}
        self._lock = threading.RLock()
        self._usage_probe = usage_probe
        for shape in builtin_profiles():
            self._shapes[shape.name] = shape

    def set_usage_probe(self, probe) -> None:
        self._usage_probe = probe

    def create(self, name: str, interval_hours: float, multipliers: list[float],
               source: str = "custom") -> LoadShape:
        with self._lock:
            if name in self._shapes:
                raise DuplicateNameError(f"shape {name!r} already exists")
            shape = LoadShape(name, interval_hours, list(multipliers), source)
            self._shapes[name] = shape
            return shape

    def get(self, name: str) -> LoadShape:
        shape = self._shapes.get(name)
        if shape is None:
            raise UnknownShapeError(f"unknown shape {name!r}")
        return shape

    def exists(self, name: str) -> bool:
        return name in self._shapes

    def edit(self, name: str, multipliers: list[float] | None = None,
             interval_hours: float | None = None) -> LoadShape:
        with self._lock:
            shape = self.get(name)
            if shape.source == "builtin":
                raise BuiltinImmutableError(f"builtin shape {name!r} is immutable")
            new = LoadShape(
                name,
                interval_hours if interval_hours is not None else shape.interval_hours,
                list(multipliers) if multipliers is not None else list(shape.multipliers),
                shape.source,
            )
            self._shapes[name] = new
            return new

    def delete(self, name: str) -> None:
        with self._lock:
            shape = self.get(name)
            if shape.source == "builtin":
                raise BuiltinImmutableError(f"builtin shape {name!r} is immutable")
            if self._usage_probe is not None and name in set(self._usage_probe()):
                raise ShapeInUseError(
                    f"shape {name!r} is assigned to a load; unassign it first"
                )
            del self._shapes[name]

    def list(self) -> list[LoadShape]:
        return [self._shapes[k] for k in sorted(self._shapes)]

    def export_json(self) -> str:
        return json.dumps(
            [s.to_dict() for s in self.list()], indent=2, sort_keys=True
        )


def parse_profile_csv(text: str, name: str = "custom_csv") -> LoadShape:
    """Two-column CSV (hour-or-index, multiplier); a header row is
    tolerated; bad rows raise MalformedRowError with their row number."""
    multipliers = []
    rows = [r for r in (line.strip() for line in text.splitlines())]
    data_started = False
    for row_no, row in enumerate(rows, start=1):
        if not row:
            continue
        parts = [p.strip() for p in row.split(",")]
        if len(parts) != 2:
            raise MalformedRowError(f"expected 2 columns, got {len(parts)}", row_no)
        try:
            float(parts[0])
        except ValueError:
            if not data_started:
                continue  # header
            raise MalformedRowError(f"non-numeric index {parts[0]!r}", row_no) from None
        try:
            value = float(parts[1])
        except ValueError:
            raise MalformedRowError(f"non-numeric value {parts[1]!r}", row_no) from None
        data_started = True
        if not math.isfinite(value):
            raise NonFiniteValueError(f"row {row_no}: non-finite multiplier")
        multipliers.append(value)
    if not multipliers:
        raise ShapeError("CSV contained no data rows")
    return LoadShape(name, 1.0, multipliers, source="custom")
