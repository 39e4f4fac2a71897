"""Transports for the MCP server: stdio (one JSON-RPC message per line)
and HTTP POST. Both share the same McpServer dispatcher."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .rpc import McpServer


def serve_stdio(server: McpServer, stdin, stdout) -> None:
    """Blocking loop: read line-delimited JSON-RPC, write responses."""
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        response = server.handle_text(line)
        if response is not None:
            stdout.write(response + "\n")
            stdout.flush()


class _McpHttpHandler(BaseHTTPRequestHandler):
    server_version = "feederkit-mcp"

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length).decode("utf-8", errors="replace")
        response = self.server.mcp.handle_text(body)
        payload = (response or "").encode()
        self.send_response(200 if response else 204)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        if payload:
            self.wfile.write(payload)

    def log_message(self, fmt, *args):
        pass  # keep transports quiet; the CLI owns user-facing output


def make_http_server(server: McpServer, host: str = "127.0.0.1",
                     port: int = 8710) -> ThreadingHTTPServer:
    httpd = ThreadingHTTPServer((host, port), _McpHttpHandler)
    httpd.mcp = server
    return httpd


def serve_http(server: McpServer, host: str = "127.0.0.1", port: int = 8710,
               background: bool = False) -> ThreadingHTTPServer:
    httpd = make_http_server(server, host, port)
    if background:
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
    else:
        httpd.serve_forever()
    return httpd
