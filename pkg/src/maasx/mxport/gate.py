"""Gate layer: a transport-neutral HTTP request router.

`Gate.handle` maps a `Request` to a `Response` and is shared by the
in-process network and the real HTTP server, so both transports run exactly
the same code.  Every protected route passes access control before its
handler runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional
from urllib.parse import parse_qs, unquote, urlsplit

from ..aas.identifiers import decode_identifier
from ..aas.serialization import (canonical_json, canonical_serialize, descriptor_to_dict,
                                 element_to_dict, shell_to_dict)
from ..errors import AccessDenied, BadRequest, MaasxError, NotFound, ValidationFailed
from .access import AccessControl, Resource
from .negotiation import NegotiationManager
from .tokens import AccessToken, sign, verify

DTR_DATASET = "dtr"


@dataclass
class Request:
    method: str
    path: str
    query: Dict[str, List[str]] = field(default_factory=dict)
    headers: Dict[str, str] = field(default_factory=dict)
    body: bytes = b""

    @classmethod
    def build(cls, method, target, headers=None, body=b""):
        parts = urlsplit(target)
        return cls(method.upper(), parts.path or "/", parse_qs(parts.query),
                   {k.lower(): v for k, v in (headers or {}).items()}, body or b"")

    def json(self):
        try:
            return json.loads(self.body.decode("utf-8")) if self.body else {}
        except ValueError as exc:
            raise BadRequest(f"request body is not JSON: {exc}") from exc

    def bearer(self):
        auth = self.headers.get("authorization", "")
        if auth.startswith("Bearer "):
            return auth[len("Bearer "):].strip() or None
        return None


@dataclass
class Response:
    status: int
    body: bytes = b""
    content_type: str = "application/json"

    def json(self):
        return json.loads(self.body.decode("utf-8")) if self.body else None

    @property
    def ok(self):
        return 200 <= self.status < 300


def json_response(obj, status=200):
    return Response(status, canonical_json(obj))


def error_response(exc):
    status = getattr(exc, "status", 500)
    body = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ValidationFailed):
        body["report"] = exc.report.to_dict()
    return json_response(body, status)


@dataclass
class Route:
    method: str
    segments: List[str]
    handler: Callable
    resource: Optional[Callable] = None
    action: str = "read"

    def match(self, parts):
        if len(parts) != len(self.segments):
            return None
        params = {}
        for seg, part in zip(self.segments, parts):
            if seg.startswith("{"):
                params[seg[1:-1]] = unquote(part)
            elif seg != part:
                return None
        return params


@dataclass
class Client:
    """Credentials accepted by ``POST /token``."""

    secret: str
    party_id: str
    role: str
    datasets: tuple

    @classmethod
    def from_dict(cls, d):
        return cls(d["secret"], d["partyId"], d["role"], tuple(d["datasets"]))


class Gate:
    def __init__(self, party_id, endpoint, repository, registry, access: AccessControl,
                 negotiations: NegotiationManager = None, clients=None, token_ttl=3600):
        self.party_id = party_id
        self.endpoint = endpoint
        self.repository = repository
        self.registry = registry
        self.access = access
        self.negotiations = negotiations or NegotiationManager(party_id)
        self.clients = dict(clients or {})
        self.token_ttl = int(token_ttl)
        self.routes: List[Route] = []
        self._register_standard_routes()

    # routing

    def route(self, method, pattern, resource=None, action="read"):
        def deco(fn):
            self.add_route(method, pattern, fn, resource, action)
            return fn
        return deco

    def add_route(self, method, pattern, handler, resource=None, action="read"):
        segments = [s for s in pattern.split("/") if s]
        self.routes.append(Route(method.upper(), segments, handler, resource, action))

    def handle(self, req: Request) -> Response:
        parts = [p for p in req.path.split("/") if p]
        allowed_methods = set()
        for r in self.routes:
            params = r.match(parts)
            if params is None:
                continue
            if r.method != req.method:
                allowed_methods.add(r.method)
                continue
            try:
                token = self._guard(req, r, params)
                return r.handler(req, params, token)
            except MaasxError as exc:
                return error_response(exc)
        if allowed_methods:
            return json_response({"error": "MethodNotAllowed", "message": req.method}, 405)
        return json_response({"error": "NotFound", "message": req.path}, 404)

    def _guard(self, req, route, params) -> Optional[AccessToken]:
        if route.resource is None:
            return None
        wire = req.bearer()
        if wire is None:
            raise AccessDenied("missing bearer token")
        tok = verify(wire, self.access.secret, self.access.now())
        resource = route.resource(req, params)
        decision = self.access.check(tok, resource, route.action)
        if not decision:
            raise AccessDenied(decision.reason)
        return tok

    # token issuance

    def issue(self, subject, role, datasets) -> str:
        expiry = self.access.now() + self.token_ttl
        return sign(AccessToken(subject, role, tuple(datasets), expiry), self.access.secret)

    # resources

    def _submodel_resource(self, req, params):
        sm_id = decode_identifier(params["smId"])
        sem = self.repository.get_submodel(sm_id).semantic_id if self.repository.has_submodel(sm_id) else None
        return Resource(sm_id, sem)

    @staticmethod
    def _dtr_resource(req, params):
        return Resource(DTR_DATASET)

    def _register_standard_routes(self):
        add = self.add_route
        add("GET", "/api/v3/shells", self._get_shells, self._dtr_resource)
        add("GET", "/api/v3/shells/{aasId}", self._get_shell, self._dtr_resource)
        add("GET", "/api/v3/submodels/{smId}", self._get_submodel, self._submodel_resource)
        add("GET", "/api/v3/submodels/{smId}/submodel-elements/{idShortPath}", self._get_element,
            self._submodel_resource)
        add("GET", "/catalog", self._get_catalog)
        add("POST", "/negotiations", self._post_negotiation)
        add("GET", "/negotiations/{id}", self._get_negotiation)
        add("POST", "/negotiations/{id}/events", self._post_negotiation_event)
        add("POST", "/transfers", self._post_transfer)
        add("POST", "/token", self._post_token)
        add("GET", "/lookup/shells", self._lookup_shells)

    # AAS API

    def _get_shells(self, req, params, token):
        shells = self.repository.shells()
        asset_ids = req.query.get("assetIds")
        if asset_ids:
            wanted = {decode_identifier(a) for a in asset_ids[0].split(",") if a}
            shells = [s for s in shells if s.asset_id in wanted]
        return json_response({"result": [shell_to_dict(s) for s in shells]})

    def _get_shell(self, req, params, token):
        return json_response(shell_to_dict(self.repository.get_shell(decode_identifier(params["aasId"]))))

    def _get_submodel(self, req, params, token):
        sm = self.repository.get_submodel(decode_identifier(params["smId"]))
        return Response(200, canonical_serialize(sm))

    def _get_element(self, req, params, token):
        sm = self.repository.get_submodel(decode_identifier(params["smId"]))
        node = sm.element(params["idShortPath"])
        if node is None:
            raise NotFound(f"element {params['idShortPath']!r}")
        return json_response(element_to_dict(node))

    # Hercules

    def _get_catalog(self, req, params, token):
        return json_response({"participantId": self.party_id, "datasets": self.negotiations.catalog()})

    def _post_negotiation(self, req, params, token):
        body = req.json()
        try:
            consumer, dataset = body["consumerId"], body["datasetId"]
        except KeyError as exc:
            raise BadRequest(f"missing field {exc}") from None
        neg = self.negotiations.request(consumer, dataset, auto=body.get("auto", True))
        return json_response(neg.to_dict(), 201)

    def _get_negotiation(self, req, params, token):
        return json_response(self.negotiations.get(params["id"]).to_dict())

    def _post_negotiation_event(self, req, params, token):
        event = req.json().get("event")
        self.negotiations.apply(params["id"], event)
        return json_response(self.negotiations.get(params["id"]).to_dict())

    def _post_transfer(self, req, params, token):
        agreement = req.json().get("agreementId")
        if not agreement:
            raise BadRequest("missing agreementId")
        neg = self.negotiations.finalized(agreement)
        role = self.negotiations.party_roles.get(neg.consumer_id)
        if role is None:
            raise AccessDenied("unknown consumer")
        wire = self.issue(neg.consumer_id, role, [neg.dataset_id])
        return json_response({"token": wire, "datasetId": neg.dataset_id})

    # Leo

    def _post_token(self, req, params, token):
        body = req.json()
        client = self.clients.get(body.get("clientId", ""))
        if client is None or client.secret != body.get("clientSecret"):
            raise AccessDenied("invalid client credentials")
        wire = self.issue(client.party_id, client.role, client.datasets)
        return json_response({"token": wire})

    def _lookup_shells(self, req, params, token):
        asset_ids = req.query.get("assetIds")
        if not asset_ids:
            raise BadRequest("assetIds query parameter required")
        out = []
        for a in asset_ids[0].split(","):
            if a:
                out.extend(self.registry.lookup_by_asset(decode_identifier(a)))
        return json_response({"result": [descriptor_to_dict(d) for d in out]})

