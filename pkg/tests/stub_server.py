"""Tiny in-process HTTP stub implementing the scorer wire protocol,
with programmable behavior for failure-mode tests."""

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer


def probabilities_from_lengths(payload):
    """Deterministic per-sequence probability derived from content."""
    return [min(1.0, len(seq) / 100.0) for seq in payload["sequences"]]


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        if self.path != "/score":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length))
        with self.server.lock:
            self.server.requests.append(payload)
            index = len(self.server.requests)
        status, body = self.server.behavior(payload, index)
        data = body if isinstance(body, (bytes, str)) else json.dumps(body)
        if isinstance(data, str):
            data = data.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


class StubScorerServer:
    """Context manager running the stub on an ephemeral loopback port.

    `behavior(payload, request_index) -> (status, body)` decides each
    response; the default echoes a probability per sequence.
    """

    def __init__(self, behavior=None):
        self.behavior = behavior or (lambda p, i: (200, {"probabilities": probabilities_from_lengths(p)}))
        self.requests = []
        self.lock = threading.Lock()

    def __enter__(self):
        self._server = HTTPServer(("127.0.0.1", 0), _Handler)
        self._server.behavior = self.behavior
        self._server.requests = self.requests
        self._server.lock = self.lock
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        self.endpoint = f"http://127.0.0.1:{self._server.server_address[1]}"
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)


def fail_n_then_ok(n):
    """First n requests return HTTP 500, the rest succeed."""

    def behavior(payload, index):
        if index <= n:
            return 500, {"error": "transient"}
        return 200, {"probabilities": probabilities_from_lengths(payload)}

    return behavior


def constant_response(body, status=200):
    return lambda payload, index: (status, body)
