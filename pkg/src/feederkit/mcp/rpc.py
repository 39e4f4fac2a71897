"""JSON-RPC 2.0 server exposing tools, resources, and prompts.

Sessions must complete the initialize handshake before any other method.
Tool-level failures are success=false envelopes inside a successful RPC
response; RPC errors are reserved for protocol problems (parse errors,
unknown methods, bad params).
"""

from __future__ import annotations

import json

from .session import EngineSession
from .tools import dispatch_tool, list_tools

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602

PROTOCOL_VERSION = "2024-11-05"
SERVER_INFO = {"name": "feederkit-mcp", "version": "0.1.0"}

PROMPT_NAME = "power-engineering"


def build_system_prompt(session: EngineSession) -> str:
    circuit = session.circuit.name if session.circuit else "no circuit loaded"
    return f"""You are a distribution power-system analysis assistant.

Active circuit: {circuit}

Conventions you must follow:
- All voltages are expressed in per-unit (p.u.) on each bus's own base kV.
- The acceptable service band is 0.95 to 1.05 p.u.; a bus strictly below
  0.95 is an undervoltage violation, strictly above 1.05 an overvoltage.
- Positive-sequence magnitude summarizes a three-phase set as one scalar.
- Power values are kW / kvar; energies kWh / kvarh; regulator taps are
  integer steps of 0.625 percent in the range -16 to +16.

Ground every numeric statement in tool results; invoke tools for any
simulation, never compute electrical quantities yourself. When a tool
fails, read its hint field and correct the call."""


class McpServer:
    """One server owns one engine session; handle() is the transport-
    independent entry point."""

    def __init__(self, session: EngineSession | None = None,
                 whitelist_root=None):
        self.session = session or EngineSession(whitelist_root=whitelist_root)
        self.initialized = False

    # -- protocol plumbing -------------------------------------------------

    def handle_text(self, raw: str) -> str | None:
        try:
            message = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return json.dumps(
                _error_response(None, PARSE_ERROR, "invalid JSON")
            )
        response = self.handle(message)
        return None if response is None else json.dumps(response)

    def handle(self, message) -> dict | None:
        if not isinstance(message, dict):
            return _error_response(
                None, INVALID_REQUEST,
                "expected a JSON-RPC request object (batches unsupported)",
            )
        msg_id = message.get("id")
        is_notification = "id" not in message
        if message.get("jsonrpc") != "2.0" or not isinstance(
            message.get("method"), str
        ):
            if is_notification:
                return None
            return _error_response(
                msg_id, INVALID_REQUEST, "jsonrpc must be '2.0' with a method"
            )
        method = message["method"]
        params = message.get("params") or {}

        if method == "initialize":
            self.initialized = True
            result = {
                "protocolVersion": PROTOCOL_VERSION,
                "serverInfo": SERVER_INFO,
                "capabilities": {"tools": {}, "resources": {}, "prompts": {}},
            }
            return None if is_notification else _result_response(msg_id, result)
        if method == "notifications/initialized":
            return None

        if not self.initialized:
            if is_notification:
                return None
            return _error_response(
                msg_id, INVALID_REQUEST,
                "session not initialized",
                data={"hint": "initialize the session first"},
            )

        handler = {
            "tools/list": self._tools_list,
            "tools/call": self._tools_call,
            "resources/list": self._resources_list,
            "resources/read": self._resources_read,
            "prompts/list": self._prompts_list,
            "prompts/get": self._prompts_get,
        }.get(method)
        if handler is None:
            if is_notification:
                return None
            return _error_response(
                msg_id, METHOD_NOT_FOUND, f"method {method!r} not found"
            )
        try:
            result = handler(params)
        except _ParamError as err:
            if is_notification:
                return None
            return _error_response(
                msg_id, INVALID_PARAMS, str(err), data={"hint": err.hint}
            )
        return None if is_notification else _result_response(msg_id, result)

    # -- methods ------------------------------------------------------------

    def _tools_list(self, params) -> dict:
        return {"tools": list_tools()}

    def _tools_call(self, params) -> dict:
        name = params.get("name")
        if not isinstance(name, str):
            raise _ParamError(
                "tools/call requires a string 'name'",
                "pass {'name': <tool>, 'arguments': {...}}",
            )
        arguments = params.get("arguments") or {}
        envelope = dispatch_tool(name, arguments, self.session)
        return envelope.to_dict()

    def _resources_list(self, params) -> dict:
        pkg = self.session.package
        if pkg is None:
            return {"resources": []}
        return {
            "resources": [
                {
                    "uri": f"circuit://{pkg.name}/{fname}",
                    "name": fname,
                    "mimeType": "text/plain",
                }
                for fname in sorted(pkg.files)
            ]
        }

    def _resources_read(self, params) -> dict:
        uri = params.get("uri", "")
        pkg = self.session.package
        prefix = f"circuit://{pkg.name}/" if pkg else None
        if not pkg or not uri.startswith(prefix):
            raise _ParamError(
                f"unknown resource {uri!r}",
                "call resources/list for the available circuit files",
            )
        fname = uri[len(prefix):]
        if fname not in pkg.files:  # also blocks any ../ traversal attempt
            raise _ParamError(
                f"unknown resource {uri!r}",
                "call resources/list for the available circuit files",
            )
        return {
            "contents": [
                {"uri": uri, "mimeType": "text/plain", "text": pkg.files[fname]}
            ]
        }

    def _prompts_list(self, params) -> dict:
        return {
            "prompts": [
                {
                    "name": PROMPT_NAME,
                    "description": "Domain conventions: per-unit notation, "
                    "voltage limits, tool-grounding rules.",
                }
            ]
        }

    def _prompts_get(self, params) -> dict:
        name = params.get("name", PROMPT_NAME)
        if name != PROMPT_NAME:
            raise _ParamError(
                f"unknown prompt {name!r}", f"the only prompt is {PROMPT_NAME!r}"
            )
        return {
            "description": "Power-engineering system prompt",
            "messages": [
                {
                    "role": "system",
                    "content": {
                        "type": "text",
                        "text": build_system_prompt(self.session),
                    },
                }
            ],
        }


class _ParamError(Exception):
    def __init__(self, message: str, hint: str):
        super().__init__(message)
        self.hint = hint


def _result_response(msg_id, result: dict) -> dict:
    return {"jsonrpc": "2.0", "id": msg_id, "result": result}


def _error_response(msg_id, code: int, message: str, data: dict | None = None) -> dict:
    err: dict = {"code": code, "message": message}
    if data:
        err["data"] = data
    return {"jsonrpc": "2.0", "id": msg_id, "error": err}
