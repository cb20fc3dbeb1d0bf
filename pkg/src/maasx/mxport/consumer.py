"""Data Space Consumer: automates the request sequence needed to pull AAS data.

Hercules: catalog dataset -> negotiation -> transfer token -> gate GET.
Leo: ID-Link lookup -> client-credential token -> gate GET.
"""

import logging

from .. import errors
from ..aas.identifiers import encode_identifier
from ..aas.serialization import deserialize
from ..errors import (AccessDenied, DiscoveryFailed, MaasxError, NegotiationTerminated,
                      TransportError, ValidationFailed)
from ..templates.catalog import ValidationReport, Violation, validate_any
from .gate import DTR_DATASET
from .negotiation import FINALIZED

log = logging.getLogger(__name__)

HERCULES = "hercules"
LEO = "leo"


def remote_error(resp) -> MaasxError:
    """Rebuild the exception a gate reported in its error body."""
    try:
        body = resp.json() or {}
    except ValueError:
        body = {}
    name, msg = body.get("error"), body.get("message", "")
    if name == "ValidationFailed" and "report" in body:
        r = body["report"]
        return ValidationFailed(ValidationReport(
            r["template"], [Violation(v["path"], v["rule"], v["message"]) for v in r["violations"]]))
    cls = getattr(errors, name or "", None)
    if isinstance(cls, type) and issubclass(cls, MaasxError):
        exc = cls.__new__(cls)
        Exception.__init__(exc, msg)
        return exc
    by_status = {401: errors.ExpiredToken, 403: AccessDenied, 404: errors.NotFound,
                 409: errors.IllegalTransition, 422: errors.BadRequest}
    return by_status.get(resp.status, TransportError)(f"HTTP {resp.status}: {msg}")


def expect(resp, *statuses):
    if resp.status not in (statuses or (200,)):
        raise remote_error(resp)
    return resp


class DataSpaceConsumer:
    def __init__(self, party_id, client, credentials=None):
        self.party_id = party_id
        self.client = client
        self.credentials = dict(credentials or {})   # provider base url -> (clientId, secret)
        self.last_raw = None

    # Hercules

    def catalog(self, provider):
        return expect(self.client.get(f"{provider}/catalog")).json()["datasets"]

    def negotiate(self, provider, dataset_id) -> str:
        resp = expect(self.client.post(f"{provider}/negotiations",
                                       {"consumerId": self.party_id, "datasetId": dataset_id}), 201)
        neg = expect(self.client.get(f"{provider}/negotiations/{resp.json()['id']}")).json()
        if neg["state"] != FINALIZED:
            raise NegotiationTerminated(f"negotiation {neg['id']} ended {neg['state']}: "
                                        f"{neg.get('reason', '')}")
        return neg["agreementId"]

    def transfer_token(self, provider, agreement_id) -> str:
        return expect(self.client.post(f"{provider}/transfers", {"agreementId": agreement_id})).json()["token"]

    def hercules_token(self, provider, dataset_id) -> str:
        return self.transfer_token(provider, self.negotiate(provider, dataset_id))

    # Leo

    def leo_token(self, provider) -> str:
        try:
            client_id, secret = self.credentials[provider]
        except KeyError:
            raise AccessDenied(f"no credentials for {provider}") from None
        return expect(self.client.post(f"{provider}/token",
                                       {"clientId": client_id, "clientSecret": secret})).json()["token"]

    def lookup_descriptors(self, asset_id, lookup):
        try:
            resp = self.client.get(f"{lookup}/lookup/shells?assetIds={encode_identifier(asset_id)}")
        except TransportError as exc:
            raise DiscoveryFailed(str(exc)) from exc
        if resp.status != 200:
            raise DiscoveryFailed(f"lookup at {lookup} answered {resp.status}")
        return resp.json()["result"]

    def resolve_id_link(self, asset_id, lookup):
        return [d["endpoint"] for d in self.lookup_descriptors(asset_id, lookup)]

    # both

    def fetch_remote_submodel(self, *, provider=None, asset_id=None, submodel_id=None,
                              semantic_id=None, mode=HERCULES, lookup=None):
        """Discover, authorize, GET and validate one submodel."""
        if submodel_id is None and asset_id is None:
            raise ValueError("need asset_id or submodel_id")
        if mode == HERCULES:
            if provider is None:
                raise DiscoveryFailed("Hercules needs the provider connector address")
            if submodel_id is None:
                submodel_id = self._hercules_discover(provider, asset_id, semantic_id)
            token = self.hercules_token(provider, submodel_id)
            endpoint = provider
        elif mode == LEO:
            endpoint = provider
            if submodel_id is None:
                endpoint, submodel_id = self._leo_discover(asset_id, semantic_id, lookup or provider)
            token = self.leo_token(endpoint)
        else:
            raise ValueError(f"unknown MX-Port configuration {mode!r}")
        resp = expect(self.client.get(f"{endpoint}/api/v3/submodels/{encode_identifier(submodel_id)}",
                                      token=token))
        self.last_raw = resp.body
        sm = deserialize(resp.body)
        report = validate_any(sm)
        if not report.ok:
            raise ValidationFailed(report)
        return sm

    def _hercules_discover(self, provider, asset_id, semantic_id):
        try:
            token = self.hercules_token(provider, DTR_DATASET)
            resp = expect(self.client.get(
                f"{provider}/api/v3/shells?assetIds={encode_identifier(asset_id)}", token=token))
        except (TransportError, errors.NotFound, errors.UnknownDataset) as exc:
            raise DiscoveryFailed(str(exc)) from exc
        for shell in resp.json()["result"]:
            for ref in shell["submodels"]:
                if semantic_id is None or ref["semanticId"] == semantic_id:
                    return ref["submodelId"]
        raise DiscoveryFailed(f"no submodel {semantic_id} for asset {asset_id} at {provider}")

    def _leo_discover(self, asset_id, semantic_id, lookup):
        for desc in self.lookup_descriptors(asset_id, lookup):
            for ref in desc["submodelDescriptors"]:
                if semantic_id is None or ref["semanticId"] == semantic_id:
                    return desc["endpoint"], ref["submodelId"]
        raise DiscoveryFailed(f"no submodel {semantic_id} for asset {asset_id} via {lookup}")
