"""REST gateway: sessions, chat messages through the tool-use loop,
circuit uploads, and dashboard data routes.

The route table and status codes are frozen in docs/gateway_api.md. The
app object is transport-independent: `handle(method, path, headers,
body)` serves both the bundled HTTP server and in-process tests. One
engine instance per process; message handling is serialized, and a
request that cannot take the engine within the configured wait gets 409.
"""

from __future__ import annotations

import hmac
import json
import mimetypes
import re
import threading
import time
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from ..agent import http_chat_adapter, scripted_adapter, tool_use_loop
from ..mcp import EngineSession, build_system_prompt
from ..qsts import export_results
from .store import DocumentStore

SAFE_NAME = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")

PROVIDERS = ("scripted", "http")


@dataclass
class GatewayConfig:
    data_dir: str
    token: str = "dev-token"
    adapter_endpoint: str | None = None
    adapter_model: str = "local-model"
    adapter_api_key: str | None = None
    static_dir: str | None = None
    engine_wait_s: float = 30.0
    max_rounds: int = 8

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "GatewayConfig":
        data = json.loads(Path(path).read_text())
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


@dataclass
class Response:
    status: int
    body: bytes
    content_type: str = "application/json"

    @classmethod
    def json(cls, status: int, payload) -> "Response":
        return cls(status, json.dumps(payload, indent=2).encode())

    @classmethod
    def error(cls, status: int, message: str, hint: str | None = None) -> "Response":
        payload = {"error": message}
        if hint:
            payload["hint"] = hint
        return cls.json(status, payload)


@dataclass
class GatewayApp:
    config: GatewayConfig
    store: DocumentStore = field(init=False)
    engine: EngineSession = field(init=False)
    _message_lock: threading.Lock = field(init=False)

    def __post_init__(self):
        self.store = DocumentStore(self.config.data_dir)
        self.engine = EngineSession(whitelist_root=self.store.blob_root)
        self._message_lock = threading.Lock()
        self._restore_shapes()

    # -- persistence helpers ------------------------------------------------

    def _restore_shapes(self) -> None:
        for doc in self.store.list("shapes"):
            d = doc["data"]
            if not self.engine.shapes.exists(d["name"]):
                self.engine.shapes.create(
                    d["name"], d["interval_hours"], d["multipliers"]
                )

    def _persist_shapes(self) -> None:
        for shape in self.engine.shapes.list():
            if shape.source != "builtin":
                self.store.put("shapes", shape.name, shape.to_dict())

    def _session_doc(self, session_id: str) -> dict | None:
        return self.store.get("sessions", session_id)

    # -- request entry point ---------------------------------------------------

    def handle(self, method: str, path: str, headers: dict | None = None,
               body: bytes | str | None = None) -> Response:
        headers = {k.lower(): v for k, v in (headers or {}).items()}
        query = {}
        if "?" in path:
            path, _, qs = path.partition("?")
            for pair in qs.split("&"):
                key, _, value = pair.partition("=")
                query[key] = value

        if method == "GET" and path == "/health":
            return Response.json(200, {"status": "ok"})

        if not path.startswith("/api/"):
            if method == "GET":
                return self._static(path)
            return Response.error(404, "not found")

        auth = headers.get("authorization", "")
        expected = f"Bearer {self.config.token}"
        if not hmac.compare_digest(auth.encode(), expected.encode()):
            return Response.error(401, "missing or invalid bearer token")

        payload = {}
        if body:
            if isinstance(body, bytes):
                body = body.decode("utf-8", errors="replace")
            try:
                payload = json.loads(body) if body.strip() else {}
            except json.JSONDecodeError:
                return Response.error(422, "request body is not valid JSON",
                                      "send a JSON object")

        route = (method, path)
        try:
            if route == ("POST", "/api/sessions"):
                return self._create_session(payload)
            if route == ("GET", "/api/sessions"):
                return self._list_sessions()
            if route == ("GET", "/api/circuits"):
                return self._list_circuits()
            if route == ("POST", "/api/circuits"):
                return self._upload_circuit(payload)
            if route == ("GET", "/api/profiles"):
                return self._list_profiles()
            if route == ("GET", "/api/providers"):
                return Response.json(200, {"providers": list(PROVIDERS)})

            m = re.match(r"^/api/sessions/([A-Za-z0-9-]+)$", path)
            if m and method == "GET":
                return self._get_session(m.group(1))
            m = re.match(r"^/api/sessions/([A-Za-z0-9-]+)/messages$", path)
            if m and method == "POST":
                return self._post_message(m.group(1), payload)
            m = re.match(r"^/api/sessions/([A-Za-z0-9-]+)/qsts$", path)
            if m and method == "GET":
                return self._get_qsts(m.group(1))
            m = re.match(r"^/api/sessions/([A-Za-z0-9-]+)/topology$", path)
            if m and method == "GET":
                return self._get_topology(m.group(1))
            m = re.match(r"^/api/sessions/([A-Za-z0-9-]+)/export$", path)
            if m and method == "GET":
                return self._export(m.group(1), query.get("format", "json"))
        except Exception as err:  # route crash: structured 500, not a stack dump
            return Response.error(500, f"{type(err).__name__}: {err}")
        return Response.error(404, "not found")

    # -- sessions ---------------------------------------------------------------

    def _create_session(self, payload: dict) -> Response:
        provider = payload.get("provider", "scripted")
        if provider not in PROVIDERS:
            return Response.error(
                422, f"unknown provider {provider!r}",
                f"providers: {', '.join(PROVIDERS)}",
            )
        session_id = payload.get("id") or uuid.uuid4().hex[:12]
        if self._session_doc(session_id) is not None:
            return Response.error(422, f"session {session_id!r} already exists",
                                  "omit 'id' to autogenerate one")
        doc = self.store.put(
            "sessions",
            session_id,
            {
                "circuit": payload.get("circuit"),
                "provider": provider,
                "model": payload.get("model", self.config.adapter_model),
                "profile": payload.get("profile"),
                "turns": [],
                "created_at": time.time(),
            },
        )
        return Response.json(201, doc)

    def _list_sessions(self) -> Response:
        docs = self.store.list("sessions")
        return Response.json(200, {
            "sessions": [
                {
                    "id": d["id"],
                    "version": d["version"],
                    "circuit": d["data"].get("circuit"),
                    "provider": d["data"].get("provider"),
                    "model": d["data"].get("model"),
                    "profile": d["data"].get("profile"),
                    "turn_count": len(d["data"].get("turns", [])),
                }
                for d in docs
            ]
        })

    def _get_session(self, session_id: str) -> Response:
        doc = self._session_doc(session_id)
        if doc is None:
            return Response.error(404, f"unknown session {session_id!r}")
        return Response.json(200, doc)

    def _activate_circuit(self, circuit_ref: str | None) -> Response | None:
        """Make the session's circuit the live engine circuit."""
        if not circuit_ref:
            return None
        current = self.engine.package.name if self.engine.package else None
        if current == circuit_ref:
            return None
        meta = self.store.get("circuit_meta", circuit_ref)
        if meta is not None:
            envelope = self.engine.dispatch(
                "load_circuit", {"path": meta["data"]["blob"]}
            )
        else:
            envelope = self.engine.dispatch(
                "load_library_circuit", {"name": circuit_ref}
            )
        if not envelope.success:
            return Response.error(
                422, f"cannot load circuit {circuit_ref!r}",
                envelope.hint,
            )
        return None

    def _post_message(self, session_id: str, payload: dict) -> Response:
        doc = self._session_doc(session_id)
        if doc is None:
            return Response.error(404, f"unknown session {session_id!r}")
        text = payload.get("text")
        if not isinstance(text, str) or not text.strip():
            return Response.error(422, "message 'text' is required",
                                  "send {'text': <question>}")
        if not self._message_lock.acquire(timeout=self.config.engine_wait_s):
            return Response.error(
                409, "engine busy",
                "another simulation is running; retry shortly",
            )
        try:
            data = doc["data"]
            failed = self._activate_circuit(data.get("circuit"))
            if failed is not None:
                return failed
            if data.get("provider") == "http":
                if not self.config.adapter_endpoint:
                    return Response.error(
                        422, "no adapter endpoint configured",
                        "set adapter_endpoint in the gateway config",
                    )
                adapter = http_chat_adapter(
                    self.config.adapter_endpoint,
                    data.get("model") or self.config.adapter_model,
                    self.config.adapter_api_key,
                )
            else:
                adapter = scripted_adapter(payload.get("script") or [])
            result = tool_use_loop(
                adapter,
                self.engine,
                text,
                system_prompt=build_system_prompt(self.engine),
                max_rounds=self.config.max_rounds,
            )
            data["turns"].extend(t.to_dict() for t in result.turns)
            self.store.put("sessions", session_id, data)
            self._persist_shapes()
            return Response.json(200, {
                "status": result.status,
                "final_text": result.final_text,
                "trace": [t.to_dict() for t in result.turns],
            })
        finally:
            self._message_lock.release()

    # -- circuits -----------------------------------------------------------------

    def _upload_circuit(self, payload: dict) -> Response:
        name = payload.get("name", "")
        files = payload.get("files")
        if not SAFE_NAME.match(name or ""):
            return Response.error(422, f"invalid circuit name {name!r}",
                                  "use letters, digits, '-', '_', '.'")
        if not isinstance(files, dict) or "master.dss" not in files:
            return Response.error(422, "files must include master.dss",
                                  "send {'files': {'master.dss': <text>, ...}}")
        for fname in files:
            if not SAFE_NAME.match(fname) or "/" in fname or "\\" in fname:
                return Response.error(
                    422, f"unsafe file name {fname!r}",
                    "file names must not contain path separators or traversal",
                )
        digest = self.store.put_package(
            {k: str(v) for k, v in files.items()}
        )
        envelope = self.engine.dispatch("load_circuit", {"path": digest})
        if not envelope.success:
            return Response.error(
                422, f"package rejected: {envelope.data.get('error')}",
                envelope.hint,
            )
        meta = self.store.put("circuit_meta", name, {
            "name": name,
            "blob": digest,
            "buses": envelope.data["buses"],
            "lines": envelope.data["lines"],
        })
        return Response.json(201, meta)

    def _list_circuits(self) -> Response:
        library = self.engine.dispatch("list_library_circuits")
        uploaded = [
            {"name": d["data"]["name"], "source": "uploaded",
             "buses": d["data"].get("buses")}
            for d in self.store.list("circuit_meta")
        ]
        bundled = [
            {"name": c["name"], "source": "library",
             "description": c.get("description", "")}
            for c in library.data["circuits"]
        ]
        return Response.json(200, {"circuits": bundled + uploaded})

    def _list_profiles(self) -> Response:
        envelope = self.engine.dispatch("list_profiles")
        return Response.json(200, envelope.data)

    # -- dashboard data -------------------------------------------------------------

    def _get_qsts(self, session_id: str) -> Response:
        if self._session_doc(session_id) is None:
            return Response.error(404, f"unknown session {session_id!r}")
        if self.engine.qsts_result is None:
            return Response.error(404, "no QSTS results for this session",
                                  "run run_qsts through a chat message first")
        return Response.json(200, self.engine.qsts_result.to_dict())

    def _get_topology(self, session_id: str) -> Response:
        if self._session_doc(session_id) is None:
            return Response.error(404, f"unknown session {session_id!r}")
        envelope = self.engine.dispatch("get_topology")
        if not envelope.success:
            return Response.error(422, envelope.data.get("error", "no circuit"),
                                  envelope.hint)
        return Response.json(200, envelope.data)

    def _export(self, session_id: str, fmt: str) -> Response:
        if self._session_doc(session_id) is None:
            return Response.error(404, f"unknown session {session_id!r}")
        if self.engine.qsts_result is None:
            return Response.error(404, "no QSTS results to export",
                                  "run run_qsts through a chat message first")
        if fmt not in ("csv", "json"):
            return Response.error(422, f"unknown format {fmt!r}", "use csv or json")
        text = export_results(self.engine.qsts_result, fmt)
        ctype = "text/csv" if fmt == "csv" else "application/json"
        return Response(200, text.encode(), content_type=ctype)

    # -- static frontend ---------------------------------------------------------

    def _static(self, path: str) -> Response:
        if not self.config.static_dir:
            return Response.error(404, "no static bundle configured")
        root = Path(self.config.static_dir).resolve()
        rel = path.lstrip("/") or "index.html"
        target = (root / rel).resolve()
        if root != target and root not in target.parents:
            return Response.error(404, "not found")
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            return Response.error(404, "not found")
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        return Response(200, target.read_bytes(), content_type=ctype)


class _GatewayHttpHandler(BaseHTTPRequestHandler):
    server_version = "feederkit-gateway"

    def _serve(self):
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length) if length else b""
        response = self.server.app.handle(
            self.command, self.path, dict(self.headers), body
        )
        self.send_response(response.status)
        self.send_header("Content-Type", response.content_type)
        self.send_header("Content-Length", str(len(response.body)))
        self.end_headers()
        self.wfile.write(response.body)

    do_GET = do_POST = do_PUT = do_DELETE = _serve

    def log_message(self, fmt, *args):
        pass


def make_http_server(app: GatewayApp, host: str = "127.0.0.1",
                     port: int = 8720) -> ThreadingHTTPServer:
    httpd = ThreadingHTTPServer((host, port), _GatewayHttpHandler)
    httpd.app = app
    return httpd
