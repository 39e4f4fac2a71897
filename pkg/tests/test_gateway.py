import json

import pytest

from feederkit.gateway import DocumentStore, GatewayApp, GatewayConfig

TOKEN = "test-token"
AUTH = {"Authorization": f"Bearer {TOKEN}"}

VOLTAGE_SCRIPT = [
    {"tool_calls": [{"tool": "solve_power_flow", "args": {}}]},
    {"tool_calls": [{"tool": "get_all_bus_voltages", "args": {}}]},
    {"text": "Voltages retrieved."},
]


@pytest.fixture
def app(tmp_path):
    return GatewayApp(GatewayConfig(data_dir=str(tmp_path / "data"), token=TOKEN))


def post(app, path, payload, headers=AUTH):
    return app.handle("POST", path, headers, json.dumps(payload))


def get(app, path, headers=AUTH):
    return app.handle("GET", path, headers)


def body(response) -> dict:
    return json.loads(response.body)


def make_session(app, **kw) -> str:
    r = post(app, "/api/sessions", {"circuit": "ieee13", **kw})
    assert r.status == 201
    return body(r)["id"]


class TestAuth:
    def test_health_open(self, app):
        assert get(app, "/health", headers={}).status == 200

    def test_missing_token_401(self, app):
        assert get(app, "/api/sessions", headers={}).status == 401

    def test_wrong_token_401(self, app):
        r = get(app, "/api/sessions", headers={"Authorization": "Bearer nope"})
        assert r.status == 401

    def test_valid_token_ok(self, app):
        assert get(app, "/api/sessions").status == 200


class TestSessions:
    def test_create_and_get(self, app):
        sid = make_session(app, provider="scripted", model="m0", profile="residential")
        doc = body(get(app, f"/api/sessions/{sid}"))
        assert doc["data"]["circuit"] == "ieee13"
        assert doc["data"]["provider"] == "scripted"
        assert doc["data"]["model"] == "m0"
        assert doc["data"]["profile"] == "residential"
        assert doc["data"]["turns"] == []

    def test_unknown_session_404(self, app):
        assert get(app, "/api/sessions/deadbeef").status == 404
        assert post(app, "/api/sessions/deadbeef/messages", {"text": "x"}).status == 404

    def test_unknown_provider_422(self, app):
        r = post(app, "/api/sessions", {"provider": "skynet"})
        assert r.status == 422
        assert "hint" in body(r)

    def test_listing(self, app):
        make_session(app)
        make_session(app)
        listed = body(get(app, "/api/sessions"))["sessions"]
        assert len(listed) == 2


class TestMessages:
    def test_scripted_chat_runs_tools(self, app):
        sid = make_session(app)
        r = post(app, f"/api/sessions/{sid}/messages",
                 {"text": "What are the bus voltages", "script": VOLTAGE_SCRIPT})
        assert r.status == 200
        data = body(r)
        assert data["status"] == "completed"
        tool_envelopes = [
            t["tool_result"] for t in data["trace"] if t["role"] == "tool"
        ]
        assert [e["tool"] for e in tool_envelopes] == [
            "solve_power_flow", "get_all_bus_voltages",
        ]
        voltages = tool_envelopes[1]["data"]["voltages"]
        assert voltages["650"]["per_unit"] == pytest.approx(1.0)
        # unit annotations preserved through the gateway untouched
        assert tool_envelopes[1]["data"]["units"]["voltage"].startswith("per_unit")

    def test_turns_appended_and_persisted(self, app):
        sid = make_session(app)
        post(app, f"/api/sessions/{sid}/messages",
             {"text": "solve", "script": VOLTAGE_SCRIPT})
        doc = body(get(app, f"/api/sessions/{sid}"))
        roles = [t["role"] for t in doc["data"]["turns"]]
        assert roles[0] == "user"
        assert "tool" in roles
        assert doc["version"] >= 2

    def test_empty_text_422(self, app):
        sid = make_session(app)
        r = post(app, f"/api/sessions/{sid}/messages", {"text": "  "})
        assert r.status == 422

    def test_engine_busy_409(self, tmp_path):
        app = GatewayApp(GatewayConfig(
            data_dir=str(tmp_path / "d2"), token=TOKEN, engine_wait_s=0.01,
        ))
        sid = make_session(app)
        app._message_lock.acquire()
        try:
            r = post(app, f"/api/sessions/{sid}/messages",
                     {"text": "hi", "script": []})
            assert r.status == 409
            assert "hint" in body(r)
        finally:
            app._message_lock.release()


class TestPersistence:
    def test_restart_restores_sessions(self, tmp_path):
        data_dir = str(tmp_path / "persist")
        app = GatewayApp(GatewayConfig(data_dir=data_dir, token=TOKEN))
        sid = make_session(app)
        post(app, f"/api/sessions/{sid}/messages",
             {"text": "solve", "script": VOLTAGE_SCRIPT})
        before = body(get(app, f"/api/sessions/{sid}"))

        reborn = GatewayApp(GatewayConfig(data_dir=data_dir, token=TOKEN))
        after = body(get(reborn, f"/api/sessions/{sid}"))
        assert after == before
        assert [t["role"] for t in after["data"]["turns"]].count("tool") == 2

    def test_last_writer_wins_version_bump(self, tmp_path):
        store = DocumentStore(tmp_path / "docs")
        store.put("things", "x", {"v": 1})
        doc = store.put("things", "x", {"v": 2})
        assert doc["version"] == 2
        assert store.get("things", "x")["data"] == {"v": 2}

    def test_corrupt_record_quarantined(self, tmp_path):
        data_dir = tmp_path / "corrupt"
        app = GatewayApp(GatewayConfig(data_dir=str(data_dir), token=TOKEN))
        sid = make_session(app)
        victim = data_dir / "sessions" / f"{sid}.json"
        victim.write_text("{ not json !!!")
        reborn = GatewayApp(GatewayConfig(data_dir=str(data_dir), token=TOKEN))
        listed = body(get(reborn, "/api/sessions"))["sessions"]
        assert listed == []
        assert reborn.store.quarantined()

    def test_custom_shapes_survive_restart(self, tmp_path):
        data_dir = str(tmp_path / "shapes")
        app = GatewayApp(GatewayConfig(data_dir=data_dir, token=TOKEN))
        sid = make_session(app)
        post(app, f"/api/sessions/{sid}/messages", {
            "text": "make a shape",
            "script": [
                {"tool_calls": [{"tool": "create_loadshape",
                                 "args": {"name": "myshape",
                                          "multipliers": [1.0, 0.5]}}]},
                {"text": "done"},
            ],
        })
        reborn = GatewayApp(GatewayConfig(data_dir=data_dir, token=TOKEN))
        assert reborn.engine.shapes.exists("myshape")


class TestCircuitUpload:
    MASTER = (
        "New Circuit.up1 bus1=src basekv=4.16 pu=1.0\n"
        "New Line.l1 bus1=src.1.2.3 bus2=end.1.2.3 "
        "rmatrix=(0.1 | 0.02 0.1 | 0.02 0.02 0.1) "
        "xmatrix=(0.3 | 0.08 0.3 | 0.08 0.08 0.3)\n"
        "New Load.end bus1=end.1.2.3 phases=3 kw=100 kvar=40\n"
    )

    def test_upload_and_use(self, app):
        r = post(app, "/api/circuits",
                 {"name": "uploaded1", "files": {"master.dss": self.MASTER}})
        assert r.status == 201
        assert body(r)["data"]["buses"] == 2
        circuits = body(get(app, "/api/circuits"))["circuits"]
        names = {c["name"] for c in circuits}
        assert {"ieee13", "ieee13_stressed", "uploaded1"} <= names

    def test_traversal_names_rejected(self, app):
        for name in ("../evil", "a/b", "..", ""):
            r = post(app, "/api/circuits",
                     {"name": name, "files": {"master.dss": self.MASTER}})
            assert r.status == 422
        r = post(app, "/api/circuits",
                 {"name": "ok", "files": {"../master.dss": self.MASTER}})
        assert r.status == 422

    def test_master_required(self, app):
        r = post(app, "/api/circuits",
                 {"name": "nomaster", "files": {"other.dss": "x"}})
        assert r.status == 422

    def test_broken_package_rejected_with_hint(self, app):
        r = post(app, "/api/circuits",
                 {"name": "broken", "files": {"master.dss": "New Line.l1 (((("}})
        assert r.status == 422
        assert body(r).get("hint")


class TestDashboardRoutes:
    def run_qsts_via_chat(self, app) -> str:
        sid = make_session(app)
        r = post(app, f"/api/sessions/{sid}/messages", {
            "text": "run a day",
            "script": [
                {"tool_calls": [{"tool": "assign_loadshape",
                                 "args": {"load_id": "671",
                                          "shape_name": "residential"}}]},
                {"tool_calls": [{"tool": "run_qsts", "args": {"steps": 4}}]},
                {"text": "done"},
            ],
        })
        assert r.status == 200
        return sid

    def test_qsts_route(self, app):
        sid = self.run_qsts_via_chat(app)
        r = get(app, f"/api/sessions/{sid}/qsts")
        assert r.status == 200
        payload = body(r)
        assert payload["summary"]["steps"] == 4
        assert payload["bus_ids"]

    def test_qsts_missing_404(self, app):
        sid = make_session(app)
        assert get(app, f"/api/sessions/{sid}/qsts").status == 404

    def test_topology_route(self, app):
        sid = self.run_qsts_via_chat(app)
        r = get(app, f"/api/sessions/{sid}/topology")
        assert r.status == 200
        payload = body(r)
        assert len(payload["nodes"]) == 15
        assert len(payload["edges"]) == 14

    def test_export_routes(self, app):
        sid = self.run_qsts_via_chat(app)
        csv_r = get(app, f"/api/sessions/{sid}/export?format=csv")
        assert csv_r.status == 200
        assert csv_r.content_type == "text/csv"
        assert csv_r.body.decode().startswith("step,bus,voltage_pu")
        json_r = get(app, f"/api/sessions/{sid}/export?format=json")
        assert json_r.status == 200
        assert json.loads(json_r.body)["summary"]["steps"] == 4
        bad = get(app, f"/api/sessions/{sid}/export?format=xml")
        assert bad.status == 422


class TestStatic:
    def test_serves_bundle(self, tmp_path):
        static = tmp_path / "static"
        static.mkdir()
        (static / "index.html").write_text("<html>ui</html>")
        app = GatewayApp(GatewayConfig(
            data_dir=str(tmp_path / "d"), token=TOKEN, static_dir=str(static),
        ))
        r = app.handle("GET", "/", {}, None)
        assert r.status == 200
        assert b"ui" in r.body

    def test_static_no_traversal(self, tmp_path):
        static = tmp_path / "static"
        static.mkdir()
        (tmp_path / "secret.txt").write_text("s3cr3t")
        app = GatewayApp(GatewayConfig(
            data_dir=str(tmp_path / "d"), token=TOKEN, static_dir=str(static),
        ))
        r = app.handle("GET", "/../secret.txt", {}, None)
        assert r.status == 404
