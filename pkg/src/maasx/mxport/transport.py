"""Transports between parties: an in-process network and plain HTTP.

Both produce identical `Response` objects for identical requests because
the receiving side is the same `Gate.handle` in either case.  Every message
can be recorded in a `Trace` (one canonical JSON object per exchange).
"""

import hashlib
import threading
import urllib.error
import urllib.request
from pathlib import Path
from urllib.parse import urlencode, urlsplit

from ..aas.serialization import canonical_json
from ..errors import TransportError
from .gate import Request, Response


def split_url(url):
    parts = urlsplit(url)
    base = f"{parts.scheme}://{parts.netloc}"
    target = parts.path or "/"
    if parts.query:
        target += "?" + parts.query
    return base, target


class Trace:
    """Message log; with `sink` set every event is also appended to that file."""

    def __init__(self, sink=None):
        self.events = []
        self.sink = Path(sink) if sink is not None else None
        self._lock = threading.Lock()

    def record(self, **event):
        with self._lock:
            event["seq"] = len(self.events) + 1
            self.events.append(event)
            if self.sink is not None:
                self.sink.parent.mkdir(parents=True, exist_ok=True)
                with self.sink.open("ab") as fh:
                    fh.write(canonical_json(event) + b"\n")

    def to_jsonl(self) -> bytes:
        return b"".join(canonical_json(e) + b"\n" for e in self.events)


def _target(req: Request):
    if not req.query:
        return req.path
    return req.path + "?" + urlencode(sorted((k, v[0]) for k, v in req.query.items()))


def _digest(data: bytes):
    return hashlib.sha256(data).hexdigest()


class _Network:
    def __init__(self, trace=None, directory=None):
        self.trace = trace
        self.directory = dict(directory or {})   # base url -> party id

    def client(self, party_id):
        return NetworkClient(party_id, self)

    def name_of(self, base):
        return self.directory.get(base, base)


class InProcessNetwork(_Network):
    """Routes requests straight into registered gates, no sockets involved."""

    def __init__(self, trace=None):
        super().__init__(trace)
        self.gates = {}

    def attach(self, endpoint, gate, party_id=None):
        base, _ = split_url(endpoint)
        self.gates[base] = gate
        self.directory[base] = party_id or gate.party_id

    def detach(self, endpoint):
        base, _ = split_url(endpoint)
        self.gates.pop(base, None)

    def dispatch(self, base, req: Request) -> Response:
        gate = self.gates.get(base)
        if gate is None:
            raise TransportError(f"no route to {base}")
        return gate.handle(req)


class HttpNetwork(_Network):
    def __init__(self, trace=None, directory=None, timeout=30.0):
        super().__init__(trace, directory)
        self.timeout = timeout

    def dispatch(self, base, req: Request) -> Response:
        target = _target(req)
        headers = {k.title(): v for k, v in req.headers.items()}
        http_req = urllib.request.Request(base + target, data=req.body or None, headers=headers,
                                          method=req.method)
        try:
            with urllib.request.urlopen(http_req, timeout=self.timeout) as resp:
                return Response(resp.status, resp.read(),
                                resp.headers.get("Content-Type", "application/json"))
        except urllib.error.HTTPError as err:
            return Response(err.code, err.read(), err.headers.get("Content-Type", "application/json"))
        except (urllib.error.URLError, OSError) as exc:
            raise TransportError(f"{req.method} {base}{target}: {exc}") from exc


class NetworkClient:
    """Outbound side of one party."""

    def __init__(self, party_id, network):
        self.party_id = party_id
        self.network = network

    def request(self, method, url, json_body=None, token=None, body=b""):
        base, target = split_url(url)
        headers = {}
        if json_body is not None:
            body = canonical_json(json_body)
            headers["Content-Type"] = "application/json"
        if token is not None:
            headers["Authorization"] = f"Bearer {token}"
        req = Request.build(method, target, headers, body)
        try:
            resp = self.network.dispatch(base, req)
        except TransportError:
            self._record(base, req, None)
            raise
        self._record(base, req, resp)
        return resp

    def _record(self, base, req, resp):
        trace = self.network.trace
        if trace is None:
            return
        trace.record(**{
            "from": self.party_id, "to": self.network.name_of(base), "method": req.method,
            "path": _target(req), "requestBytes": len(req.body), "requestSha256": _digest(req.body),
            "status": resp.status if resp is not None else None,
            "responseBytes": len(resp.body) if resp is not None else 0,
            "responseSha256": _digest(resp.body) if resp is not None else None,
        })

    def get(self, url, token=None):
        return self.request("GET", url, token=token)

    def post(self, url, json_body=None, token=None):
        return self.request("POST", url, json_body=json_body, token=token)
