"""Expose a `Gate` over real HTTP with the standard library server."""

import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .gate import Request

log = logging.getLogger(__name__)


def _handler_for(gate):
    class GateHandler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def _dispatch(self):
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length) if length else b""
            req = Request.build(self.command, self.path, dict(self.headers.items()), body)
            resp = gate.handle(req)
            self.send_response(resp.status)
            self.send_header("Content-Type", resp.content_type)
            self.send_header("Content-Length", str(len(resp.body)))
            self.end_headers()
            self.wfile.write(resp.body)

        do_GET = do_POST = do_PUT = do_DELETE = _dispatch

        def log_message(self, fmt, *args):
            log.debug("%s %s", gate.party_id, fmt % args)

    return GateHandler


def make_server(gate, host="127.0.0.1", port=0) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), _handler_for(gate))
    server.daemon_threads = True
    return server


def serve_in_thread(gate, host="127.0.0.1", port=0):
    """Start serving in a daemon thread; returns ``(server, base_url)``."""
    server = make_server(gate, host, port)
    t = threading.Thread(target=server.serve_forever, name=f"gate-{gate.party_id}", daemon=True)
    t.start()
    h, p = server.server_address[:2]
    return server, f"http://{h}:{p}"
