"""Uniform tool-result envelope.

Every tool returns the same JSON shape: a success flag, unit-annotated
data, and, on failure only, a recovery hint telling the caller what to do
next. Hints are what let an LLM self-correct ordering mistakes without
human help, so they are mandatory on every failure.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


@dataclass
class ToolEnvelope:
    success: bool
    tool: str
    data: dict = field(default_factory=dict)
    hint: str | None = None
    elapsed_ms: float = 0.0

    def __post_init__(self):
        if not self.success and not self.hint:
            raise ValueError("failure envelopes must carry a nonempty hint")
        if self.success:
            self.hint = None

    def to_dict(self) -> dict:
        out = {
            "success": self.success,
            "tool": self.tool,
            "data": self.data,
            "elapsed_ms": self.elapsed_ms,
        }
        if self.hint is not None:
            out["hint"] = self.hint
        return out

    def digest(self) -> str:
        """Stable content hash; excludes elapsed_ms so identical results
        hash identically across runs."""
        blob = json.dumps(
            {"success": self.success, "tool": self.tool, "data": self.data,
             "hint": self.hint},
            sort_keys=True, separators=(",", ":"), default=str,
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def ok(tool: str, data: dict, elapsed_ms: float = 0.0) -> ToolEnvelope:
    return ToolEnvelope(True, tool, data, elapsed_ms=elapsed_ms)


def fail(tool: str, message: str, hint: str, elapsed_ms: float = 0.0) -> ToolEnvelope:
    return ToolEnvelope(
        False, tool, {"error": message}, hint=hint, elapsed_ms=elapsed_ms
    )
