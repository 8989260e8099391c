"""Deterministic mock embedding service for tests and offline demos.

Implements the remote protocol: POST /embed with {"model", "texts"} returns
{"vectors": [[...]]}. Each (model, text) pair maps to a fixed pseudo-random
unit vector, so clients can verify order preservation against
``reference_vector``. Failure injection covers the client's error paths:
initial 5xx responses (retry), short responses (count mismatch) and
per-request dimension drift (dimension inconsistency).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

DEFAULT_DIM = 8


def reference_vector(model: str, text: str, dim: int = DEFAULT_DIM) -> np.ndarray:
    """The unit vector the mock server returns for (model, text)."""
    digest = hashlib.blake2b(f"{model}\x00{text}".encode(), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "big"))
    vec = rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


class MockEmbeddingServer:
    """In-process HTTP embedding service on an ephemeral port.

    Parameters
    ----------
    dim : vector dimension served.
    fail_first : return HTTP 500 for this many requests before recovering.
    always_fail : return HTTP 500 for every request.
    drop_last : omit the last vector of every response (count mismatch).
    dim_drift : grow the dimension by one on each request (inconsistency).
    """

    def __init__(self, dim: int = DEFAULT_DIM, fail_first: int = 0,
                 always_fail: bool = False, drop_last: bool = False,
                 dim_drift: bool = False, host: str = "127.0.0.1",
                 port: int = 0):
        self.dim = dim
        self.fail_first = fail_first
        self.always_fail = always_fail
        self.drop_last = drop_last
        self.dim_drift = dim_drift
        self.request_count = 0
        self._lock = threading.Lock()
        self._server = ThreadingHTTPServer((host, port), self._make_handler())
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockEmbeddingServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "MockEmbeddingServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()

    def _make_handler(self):
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # silence request logging
                pass

            def _send_json(self, status: int, payload: dict) -> None:
                body = json.dumps(payload).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_POST(self):
                if self.path != "/embed":
                    self._send_json(404, {"error": "unknown path"})
                    return
                with outer._lock:
                    outer.request_count += 1
                    count = outer.request_count
                if outer.always_fail or count <= outer.fail_first:
                    self._send_json(500, {"error": "injected failure"})
                    return
                length = int(self.headers.get("Content-Length", "0"))
                try:
                    payload = json.loads(self.rfile.read(length))
                    model = payload["model"]
                    texts = payload["texts"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    self._send_json(400, {"error": "malformed request"})
                    return
                dim = outer.dim + (count - 1 if outer.dim_drift else 0)
                vectors = [reference_vector(model, t, dim).tolist()
                           for t in texts]
                if outer.drop_last and vectors:
                    vectors = vectors[:-1]
                self._send_json(200, {"vectors": vectors})

        return Handler


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Run the deterministic mock embedding service.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8099)
    parser.add_argument("--dim", type=int, default=DEFAULT_DIM)
    args = parser.parse_args(argv)
    server = MockEmbeddingServer(dim=args.dim, host=args.host, port=args.port)
    print(f"mock embedding service listening on {server.url}/embed")
    server.start()
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
