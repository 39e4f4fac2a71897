"""Tool descriptors and parameter validation.

Each tool carries a JSON-Schema-style parameter object; every call is
validated (with gentle type coercion for numeric strings) before any
handler code runs, so a malformed call can never touch engine state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class SchemaViolation(ValueError):
    def __init__(self, path: str, expected: str, message: str):
        super().__init__(message)
        self.path = path
        self.expected = expected

    @property
    def hint(self) -> str:
        return f"fix parameter '{self.path}': {self} (expected {self.expected})"


@dataclass
class ToolDescriptor:
    name: str
    category: str
    description: str
    schema: dict = field(default_factory=lambda: {"type": "object", "properties": {}})

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "category": self.category,
            "description": self.description,
            "inputSchema": self.schema,
        }


def _coerce(value, expected: str, path: str):
    """Return the value as `expected` type, coercing where the schema
    allows (numeric strings, text booleans, integral floats)."""
    if expected == "number":
        if isinstance(value, bool):
            raise SchemaViolation(path, "number", f"got boolean {value!r}")
        if isinstance(value, (int, float)):
            value = float(value)
        elif isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                raise SchemaViolation(path, "number", f"got {value!r}") from None
        else:
            raise SchemaViolation(path, "number", f"got {type(value).__name__}")
        if not math.isfinite(value):
            raise SchemaViolation(path, "finite number", f"got {value!r}")
        return value
    if expected == "integer":
        if isinstance(value, bool):
            raise SchemaViolation(path, "integer", f"got boolean {value!r}")
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value == int(value):
            return int(value)
        if isinstance(value, str):
            try:
                return int(value, 10)
            except ValueError:
                raise SchemaViolation(path, "integer", f"got {value!r}") from None
        raise SchemaViolation(path, "integer", f"got {type(value).__name__}")
    if expected == "string":
        if isinstance(value, str):
            return value
        raise SchemaViolation(path, "string", f"got {type(value).__name__}")
    if expected == "boolean":
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false"):
            return value.lower() == "true"
        raise SchemaViolation(path, "boolean", f"got {value!r}")
    if expected == "array":
        if isinstance(value, (list, tuple)):
            return list(value)
        raise SchemaViolation(path, "array", f"got {type(value).__name__}")
    if expected == "object":
        if isinstance(value, dict):
            return value
        raise SchemaViolation(path, "object", f"got {type(value).__name__}")
    return value


def validate_call(descriptor: ToolDescriptor, args) -> dict:
    """Validate and coerce `args` against the descriptor's schema.

    Raises SchemaViolation (with a field path) before any handler runs;
    unknown parameters are dropped, null optionals are treated as absent.
    """
    if args is None:
        args = {}
    if not isinstance(args, dict):
        raise SchemaViolation("", "object", "arguments must be a JSON object")
    props = descriptor.schema.get("properties", {})
    required = descriptor.schema.get("required", [])
    for name in required:
        if name not in args or args[name] is None:
            raise SchemaViolation(name, props.get(name, {}).get("type", "value"),
                                  f"missing required field '{name}'")
    out = {}
    for name, spec in props.items():
        if name not in args:
            if "default" in spec:
                out[name] = spec["default"]
            continue
        value = args[name]
        if value is None and name not in required:
            continue
        expected = spec.get("type", "string")
        value = _coerce(value, expected, name)
        if "enum" in spec and value not in spec["enum"]:
            raise SchemaViolation(
                name, "one of " + ", ".join(map(str, spec["enum"])),
                f"got {value!r}",
            )
        if "minimum" in spec and value < spec["minimum"]:
            raise SchemaViolation(
                name, f">= {spec['minimum']}", f"got {value!r}"
            )
        if "maximum" in spec and value > spec["maximum"]:
            raise SchemaViolation(
                name, f"<= {spec['maximum']}", f"got {value!r}"
            )
        if expected == "array" and "items" in spec:
            item_type = spec["items"].get("type")
            if item_type:
                value = [
                    _coerce(v, item_type, f"{name}[{i}]")
                    for i, v in enumerate(value)
                ]
        out[name] = value
    return out
