"""REST gateway binding sessions, persistence, and the agent loop."""

from .app import GatewayApp, GatewayConfig, Response, make_http_server
from .store import DocumentStore

__all__ = [
    "DocumentStore",
    "GatewayApp",
    "GatewayConfig",
    "Response",
    "make_http_server",
]
