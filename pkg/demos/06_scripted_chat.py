"""The tool-use loop with a scripted adapter: fully offline operation.

The scripted adapter replays a fixed plan (what an LLM would emit); the
loop validates and dispatches every call, feeds envelopes back, and
stops at the final text. Swap in `http_chat_adapter(...)` to drive the
same loop from a live chat-completions endpoint.
"""

from feederkit.agent import grounded_numbers, scripted_adapter, tool_use_loop
from feederkit.mcp import EngineSession, build_system_prompt

session = EngineSession()
session.dispatch("load_library_circuit", {"name": "ieee13"})

plan = [
    # a deliberately malformed first call: the loop feeds the rejection
    # envelope (with its hint) back, and the "model" corrects itself
    {"tool_calls": [{"tool": "run_qsts", "args": {}}]},
    {"tool_calls": [{"tool": "run_qsts", "args": {"steps": 24}}]},
    {"tool_calls": [{"tool": "get_qsts_summary", "args": {}}]},
    {"text": "24-hour run finished; see the violation summary above."},
]

result = tool_use_loop(
    scripted_adapter(plan),
    session,
    "Run a 24-hour simulation and find violations.",
    system_prompt=build_system_prompt(session),
)

print(f"loop status: {result.status} after {result.tool_call_count} tool calls\n")
for turn in result.turns:
    if turn.role == "user":
        print(f"user:      {turn.text}")
    elif turn.role == "assistant" and turn.tool_calls:
        for call in turn.tool_calls:
            print(f"assistant: -> {call['tool']}({call['args']})")
    elif turn.role == "tool":
        envelope = turn.tool_result
        mark = "ok" if envelope["success"] else f"REJECTED ({envelope['hint']})"
        print(f"tool:      {envelope['tool']}: {mark}")
    else:
        print(f"assistant: {turn.text}")

summary = result.envelopes()[-1]["data"]["summary"]
print(f"\nviolation steps: {summary['violation_step_count']}, "
      f"min voltage {summary['min_voltage_pu']:.4f} pu")
print("final text grounded in tool results:", grounded_numbers(result))
