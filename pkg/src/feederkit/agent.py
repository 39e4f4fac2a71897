"""Provider-agnostic adapter contract and the tool-use loop.

An adapter is a callable taking (tool descriptors, message history,
system prompt) and returning an AdapterReply: either final text or a
list of tool calls. The loop dispatches requested calls through the
engine session's validated dispatcher (the only engine access path),
feeds the envelopes back, and repeats until the adapter answers in text
or the round budget runs out. A schema-rejected call earns exactly one
retry; a second consecutive rejection of the same tool ends the loop.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request
from dataclasses import dataclass, field

from .mcp import EngineSession, list_tools
from .mcp.envelope import ToolEnvelope

MAX_ROUNDS_DEFAULT = 8
ENVELOPE_FEED_LIMIT = 16 * 1024  # larger envelopes are summarized for the model
SCHEMA_RETRY_BUDGET = 1


class AdapterUnavailableError(RuntimeError):
    pass


class MalformedModelOutputError(ValueError):
    pass


@dataclass
class ToolCallRequest:
    tool: str
    args: dict


@dataclass
class AdapterReply:
    text: str | None = None
    tool_calls: list[ToolCallRequest] = field(default_factory=list)


@dataclass
class ChatTurn:
    role: str  # user | assistant | tool
    text: str = ""
    tool_calls: list[dict] = field(default_factory=list)
    tool_result: dict | None = None

    def to_dict(self) -> dict:
        out = {"role": self.role, "text": self.text}
        if self.tool_calls:
            out["tool_calls"] = self.tool_calls
        if self.tool_result is not None:
            out["tool_result"] = self.tool_result
        return out


@dataclass
class LoopResult:
    status: str  # completed | max_rounds | adapter_unavailable | retry_exhausted
    final_text: str | None
    turns: list[ChatTurn]

    @property
    def tool_call_count(self) -> int:
        return sum(len(t.tool_calls) for t in self.turns if t.role == "assistant")

    def envelopes(self) -> list[dict]:
        return [t.tool_result for t in self.turns if t.role == "tool"]

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "final_text": self.final_text,
            "turns": [t.to_dict() for t in self.turns],
        }


def summarize_envelope(envelope: dict) -> dict:
    """Compact stand-in fed to the adapter when an envelope is oversized;
    the full envelope stays in the trace."""
    data = envelope.get("data", {})
    return {
        "success": envelope.get("success"),
        "tool": envelope.get("tool"),
        "truncated": True,
        "data_keys": sorted(data) if isinstance(data, dict) else [],
        "note": "result exceeded the feed limit; ask for a narrower slice",
        "hint": envelope.get("hint"),
    }


def _feed_form(envelope: dict) -> dict:
    if len(json.dumps(envelope)) > ENVELOPE_FEED_LIMIT:
        return summarize_envelope(envelope)
    return envelope


def tool_use_loop(
    adapter,
    session: EngineSession,
    user_text: str,
    system_prompt: str = "",
    max_rounds: int = MAX_ROUNDS_DEFAULT,
    prior_turns: list[ChatTurn] | None = None,
) -> LoopResult:
    turns: list[ChatTurn] = list(prior_turns or [])
    turns.append(ChatTurn("user", user_text))
    descriptors = list_tools()
    consecutive_rejections: dict[str, int] = {}

    for _ in range(max_rounds):
        try:
            reply = adapter(descriptors, [t.to_dict() for t in turns], system_prompt)
        except AdapterUnavailableError as err:
            turns.append(
                ChatTurn("assistant", f"[adapter unavailable: {err}]")
            )
            return LoopResult("adapter_unavailable", None, turns)

        if not reply.tool_calls:
            text = reply.text or ""
            turns.append(ChatTurn("assistant", text))
            return LoopResult("completed", text, turns)

        turns.append(
            ChatTurn(
                "assistant",
                reply.text or "",
                tool_calls=[{"tool": c.tool, "args": c.args} for c in reply.tool_calls],
            )
        )
        for call in reply.tool_calls:
            envelope: ToolEnvelope = session.dispatch(call.tool, call.args)
            env_dict = envelope.to_dict()
            turns.append(ChatTurn("tool", tool_result=env_dict))
            schema_rejected = (
                not envelope.success and "schema_violation" in envelope.data
            )
            if schema_rejected:
                n = consecutive_rejections.get(call.tool, 0) + 1
                consecutive_rejections[call.tool] = n
                if n > SCHEMA_RETRY_BUDGET:
                    turns.append(
                        ChatTurn(
                            "assistant",
                            f"[stopped: {call.tool} failed schema validation "
                            f"twice in a row]",
                        )
                    )
                    return LoopResult("retry_exhausted", None, turns)
            else:
                consecutive_rejections[call.tool] = 0
    turns.append(ChatTurn("assistant", "[stopped: tool-call round budget reached]"))
    return LoopResult("max_rounds", None, turns)


# -- scripted adapter ---------------------------------------------------------

SCRIPT_EXHAUSTED_TEXT = "Scripted conversation complete."


def scripted_adapter(transcript: list[dict]):
    """Deterministic adapter replaying a fixed list of outputs.

    Each transcript entry is either {"text": ...} or
    {"tool_calls": [{"tool": ..., "args": {...}}, ...]}. When the
    transcript runs out the adapter answers with a fixed terminal text,
    so the loop always terminates. Enables fully offline operation.
    """
    state = {"i": 0}

    def adapter(descriptors, messages, system_prompt) -> AdapterReply:
        if state["i"] >= len(transcript):
            return AdapterReply(text=SCRIPT_EXHAUSTED_TEXT)
        entry = transcript[state["i"]]
        state["i"] += 1
        if "tool_calls" in entry:
            calls = [
                ToolCallRequest(c["tool"], c.get("args", {}))
                for c in entry["tool_calls"]
            ]
            return AdapterReply(text=entry.get("text"), tool_calls=calls)
        return AdapterReply(text=entry.get("text", ""))

    return adapter


# -- generic HTTP chat-completions adapter ---------------------------------------


def build_chat_request(
    model: str,
    descriptors: list[dict],
    messages: list[dict],
    system_prompt: str,
) -> dict:
    """Map our turn history onto the common chat-completions
    function-calling request shape (documented in docs/http_adapter.md)."""
    wire_messages = []
    if system_prompt:
        wire_messages.append({"role": "system", "content": system_prompt})
    for turn in messages:
        role = turn.get("role")
        if role == "user":
            wire_messages.append({"role": "user", "content": turn.get("text", "")})
        elif role == "assistant":
            msg = {"role": "assistant", "content": turn.get("text", "")}
            if turn.get("tool_calls"):
                msg["tool_calls"] = [
                    {
                        "id": f"call_{i}",
                        "type": "function",
                        "function": {
                            "name": c["tool"],
                            "arguments": json.dumps(c["args"], sort_keys=True),
                        },
                    }
                    for i, c in enumerate(turn["tool_calls"])
                ]
            wire_messages.append(msg)
        elif role == "tool":
            wire_messages.append(
                {
                    "role": "tool",
                    "content": json.dumps(turn.get("tool_result"), sort_keys=True),
                }
            )
    return {
        "model": model,
        "messages": wire_messages,
        "tools": [
            {
                "type": "function",
                "function": {
                    "name": d["name"],
                    "description": d["description"],
                    "parameters": d["inputSchema"],
                },
            }
            for d in descriptors
        ],
    }


def parse_chat_response(payload: dict) -> AdapterReply:
    """Pull text / tool calls out of a chat-completions response; an
    unparseable function call degrades to a text reply."""
    try:
        message = payload["choices"][0]["message"]
    except (KeyError, IndexError, TypeError) as err:
        raise MalformedModelOutputError(f"unexpected response shape: {err}") from err
    raw_calls = message.get("tool_calls") or []
    calls = []
    for rc in raw_calls:
        fn = rc.get("function", {})
        try:
            args = json.loads(fn.get("arguments") or "{}")
            if not isinstance(args, dict):
                raise ValueError("arguments not an object")
        except ValueError:
            return AdapterReply(
                text=message.get("content")
                or f"[unparseable function call for {fn.get('name')}]"
            )
        calls.append(ToolCallRequest(fn.get("name", ""), args))
    return AdapterReply(text=message.get("content"), tool_calls=calls)


def http_chat_adapter(
    endpoint: str,
    model: str,
    api_key: str | None = None,
    timeout: float = 30.0,
):
    """Adapter speaking the generic chat-completions convention over HTTP.

    Network failures surface as AdapterUnavailableError; the loop turns
    that into a terminated-but-intact session rather than a crash.
    """

    def adapter(descriptors, messages, system_prompt) -> AdapterReply:
        body = json.dumps(
            build_chat_request(model, descriptors, messages, system_prompt)
        ).encode()
        request = urllib.request.Request(
            endpoint,
            data=body,
            headers={
                "Content-Type": "application/json",
                **({"Authorization": f"Bearer {api_key}"} if api_key else {}),
            },
            method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=timeout) as resp:
                payload = json.loads(resp.read().decode())
        except (urllib.error.URLError, TimeoutError, OSError) as err:
            raise AdapterUnavailableError(str(err)) from err
        except json.JSONDecodeError as err:
            raise AdapterUnavailableError(f"non-JSON response: {err}") from err
        return parse_chat_response(payload)

    return adapter


def grounded_numbers(result: LoopResult) -> bool:
    """True when every number cited in the final text appears in some
    envelope of the trace (the anti-fabrication audit for scripted runs)."""
    import re

    if not result.final_text:
        return True
    envelope_blob = json.dumps(result.envelopes())
    for token in re.findall(r"\d+\.\d+", result.final_text):
        if token not in envelope_blob:
            return False
    return True
