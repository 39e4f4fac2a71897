"""MCP-shaped protocol layer: JSON-RPC transport, schema validation,
envelopes with recovery hints, and the 36-tool registry."""

from .envelope import ToolEnvelope, fail, ok
from .rpc import McpServer, build_system_prompt
from .schema import SchemaViolation, ToolDescriptor, validate_call
from .session import EngineSession
from .tools import (
    ToolError,
    category_counts,
    dispatch_tool,
    list_tools,
    registry,
)

__all__ = [
    "EngineSession",
    "McpServer",
    "SchemaViolation",
    "ToolDescriptor",
    "ToolEnvelope",
    "ToolError",
    "build_system_prompt",
    "category_counts",
    "dispatch_tool",
    "fail",
    "list_tools",
    "ok",
    "registry",
    "validate_call",
]
