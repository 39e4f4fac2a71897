"""The REST gateway in-process: sessions, chat messages, dashboards,
and restart-safe persistence.

`feederkit serve-gateway` serves the same app over HTTP; here we call
the route handler directly so the demo runs without opening a port.
"""

import json
import tempfile

from feederkit.gateway import GatewayApp, GatewayConfig

data_dir = tempfile.mkdtemp(prefix="feederkit-demo-")
auth = {"Authorization": "Bearer demo-token"}
app = GatewayApp(GatewayConfig(data_dir=data_dir, token="demo-token"))

created = app.handle("POST", "/api/sessions", auth,
                     json.dumps({"circuit": "ieee13_stressed",
                                 "profile": "residential"}))
session_id = json.loads(created.body)["id"]
print(f"created session {session_id} on circuit ieee13_stressed")

reply = app.handle(
    "POST", f"/api/sessions/{session_id}/messages", auth,
    json.dumps({
        "text": "Run a day and show me the damage.",
        "script": [
            {"tool_calls": [{"tool": "assign_loadshape",
                             "args": {"load_id": "671",
                                      "shape_name": "residential"}}]},
            {"tool_calls": [{"tool": "run_qsts", "args": {"steps": 24}}]},
            {"text": "Day simulated; dashboard data is ready."},
        ],
    }),
)
trace = json.loads(reply.body)
print(f"message handled: {trace['status']}, "
      f"{sum(1 for t in trace['trace'] if t['role'] == 'tool')} tool calls")

qsts = json.loads(app.handle("GET", f"/api/sessions/{session_id}/qsts", auth).body)
print(f"dashboard summary: min {qsts['summary']['min_voltage_pu']:.4f} pu, "
      f"{qsts['summary']['violation_step_count']} violation steps")

topology = json.loads(
    app.handle("GET", f"/api/sessions/{session_id}/topology", auth).body
)
print(f"topology: {len(topology['nodes'])} nodes / {len(topology['edges'])} edges")

csv_export = app.handle(
    "GET", f"/api/sessions/{session_id}/export?format=csv", auth
)
print(f"CSV export: {len(csv_export.body)} bytes, "
      f"first line {csv_export.body.decode().splitlines()[0]!r}")

# simulate a process restart: a brand-new app over the same data dir
del app
reborn = GatewayApp(GatewayConfig(data_dir=data_dir, token="demo-token"))
restored = json.loads(
    reborn.handle("GET", f"/api/sessions/{session_id}", auth).body
)
print(f"\nafter restart: session {restored['id']} restored with "
      f"{len(restored['data']['turns'])} turns (version {restored['version']})")
