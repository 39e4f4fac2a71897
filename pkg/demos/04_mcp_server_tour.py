"""Tour of the MCP server: JSON-RPC handshake, the 36-tool catalog,
schema validation with recovery hints, resources, and the prompt.

Everything runs in-process; the same server object backs the stdio and
HTTP transports (`feederkit serve-mcp`).
"""

import json

from feederkit.mcp import McpServer, category_counts

server = McpServer()


def rpc(method, params=None, msg_id=[0]):
    msg_id[0] += 1
    response = server.handle(
        {"jsonrpc": "2.0", "id": msg_id[0], "method": method,
         "params": params or {}}
    )
    return response


# tools are locked behind the initialize handshake
early = rpc("tools/list")
print("before initialize:", early["error"]["message"],
      "->", early["error"]["data"]["hint"])

rpc("initialize")
tools = rpc("tools/list")["result"]["tools"]
print(f"\n{len(tools)} tools across {len(category_counts())} categories:")
for category, count in category_counts().items():
    print(f"  {category:<16} {count}")

# a malformed call is rejected before any handler runs, with a hint
bad = rpc("tools/call", {"name": "run_qsts", "arguments": {"steps": "soon"}})
print("\nmalformed run_qsts ->", bad["result"]["hint"])

# the canonical flow: load, solve, read voltages
rpc("tools/call", {"name": "load_library_circuit", "arguments": {"name": "ieee13"}})
rpc("tools/call", {"name": "solve_power_flow", "arguments": {}})
volts = rpc("tools/call", {"name": "get_all_bus_voltages", "arguments": {}})
payload = volts["result"]["data"]["voltages"]
print("\nper-unit voltages (first three):",
      json.dumps({k: round(payload[k]["per_unit"], 4)
                  for k in list(payload)[:3]}))

# circuit files are exposed as resources
resources = rpc("resources/list")["result"]["resources"]
print("\nresources:", [r["name"] for r in resources])
master = rpc("resources/read", {"uri": "circuit://ieee13/master.dss"})
print("master.dss starts with:",
      master["result"]["contents"][0]["text"].splitlines()[0])

prompt = rpc("prompts/get")["result"]["messages"][0]["content"]["text"]
print("\nprompt excerpt:", prompt.splitlines()[0])
