"""Party services: supplier, platform and buyer behind their gates.

Each service owns a repository, a registry, access control and a gate.  The
business endpoints are ordinary gate routes guarded by ``svc:<name>``
resources, so the same default-deny rules govern AAS data and workflow
calls.  ``/admin/*`` routes let a party's own operator (the scenario driver)
trigger actions over the same transport the parties use between themselves.
"""

from __future__ import annotations

import hashlib
import logging
import re
import threading
from collections import Counter
from dataclasses import replace

from ..aas.model import SubmodelInstance
from ..aas.repository import Registry, Repository
from ..aas.serialization import canonical_json, submodel_from_dict, submodel_to_dict
from ..capability import FeatureRecord, derive_capabilities, match_suppliers, requirements_from_features
from ..clock import SimClock
from ..config import Config, client_secret
from ..errors import (AccessDenied, AllDeclined, BadRequest, IllegalTransition, MaasxError,
                      NoCapableMachine, NoEligibleSupplier, NoHistoryNoFallback, NotFound,
                      TransportError, ValidationFailed)
from ..features import FaceGraph, recognize_features
from ..mxport.access import AccessControl, AccessRule, Resource
from ..mxport.consumer import DataSpaceConsumer, HERCULES, expect
from ..mxport.gate import DTR_DATASET, Client, Gate, json_response
from ..mxport.layers import LayerStack
from ..mxport.negotiation import Dataset, NegotiationManager
from ..planning import HistoryRecord, MachineRecord, cost_analysis, plan_cam, select_cam_machine
from ..quality import SignalSegment, SignalSpec, build_baseline, compose_measurement_report, derive_seed, evaluate, generate_run
from ..templates import (CAPABILITY_DESCRIPTION, DIGITAL_NAMEPLATE, PURCHASE_ORDER, QUALITY_CONTROL,
                         TECHNICAL_DATA, OrderDraft, OrderLine, QualityRequirement,
                         build_capability_description, build_digital_nameplate,
                         build_handover_documentation, build_machine_technical_data,
                         build_purchase_order, build_quality_report, build_technical_data,
                         cam_plan_elements, parse_capability_description, parse_purchase_order,
                         parse_quality_report, parse_technical_data, validate, with_feature_costs,
                         with_order_status)
from .states import Offer, Order, RfqRecord, transition

log = logging.getLogger(__name__)

RFQ_WINDOW = 3 * 86400
OFFER_VALIDITY = 14 * 86400

_R, _W, _RW = ("read",), ("write",), ("read", "write")

# provider role -> (consumer role, resource pattern, actions)
DEFAULT_RULES = {
    "supplier": [
        ("platform", DTR_DATASET, _R),
        ("platform", CAPABILITY_DESCRIPTION.semantic_id, _R),
        ("platform", DIGITAL_NAMEPLATE.semantic_id, _R),
        ("platform", "svc:rfq", _W),
        ("platform", "svc:orders", _W),
        ("supplier", "svc:admin", _RW),
        ("supplier", "svc:quality", _W),
        ("supplier", "svc:modeler", _W),
        ("supplier", "svc:quote", _W),
    ],
    "platform": [
        ("supplier", "svc:notifications", _W),
        ("supplier", "svc:reports", _W),
        ("buyer", "svc:search", _W),
        ("buyer", "svc:offers", _RW),
        ("buyer", "svc:reports", _R),
        ("buyer", "svc:features", _W),
        ("platform", "svc:features", _W),
        ("platform", "svc:admin", _RW),
    ],
    "buyer": [
        ("platform", "svc:reports", _W),
        ("buyer", "svc:admin", _RW),
    ],
}


def default_rules(role):
    return [AccessRule(r, pattern, frozenset(actions)) for r, pattern, actions in DEFAULT_RULES[role]]


def _id_short(text):
    s = re.sub(r"[^A-Za-z0-9_]", "_", text)
    return s if s[:1].isalpha() else "P_" + s


def _validated(d, template):
    sm = submodel_from_dict(d) if not isinstance(d, SubmodelInstance) else d
    report = validate(sm, template)
    if not report.ok:
        raise ValidationFailed(report)
    return sm


class PartyService:
    role = None

    def __init__(self, cfg: Config, network, clock=None):
        if cfg.role != self.role:
            raise ValueError(f"{type(self).__name__} needs role {self.role}, got {cfg.role}")
        self.cfg = cfg
        self.party_id = cfg.party_id
        self.clock = clock or SimClock(cfg.epoch)
        data_dir = cfg.data_dir
        self.repo = Repository(data_dir)
        self.registry = Registry(f"{data_dir}/registry.json" if data_dir else None)
        rules = ([AccessRule.from_dict(r) for r in cfg.rules] if cfg.rules is not None
                 else default_rules(self.role))
        self.access = AccessControl(cfg.shared_secret, rules, self.clock)
        roles = {pid: p.role for pid, p in cfg.peers.items()}
        roles[self.party_id] = self.role
        self.negotiations = NegotiationManager(self.party_id, party_roles=roles)
        clients = {pid: Client(client_secret(cfg.shared_secret, pid), pid, role,
                               self._scope_for(role, rules))
                   for pid, role in roles.items()}
        self.gate = Gate(self.party_id, cfg.endpoint, self.repo, self.registry, self.access,
                         self.negotiations, clients, cfg.token_ttl)
        self.network = network
        self.client = network.client(self.party_id)
        creds = {p.endpoint: (self.party_id, client_secret(cfg.shared_secret, self.party_id))
                 for p in cfg.peers.values()}
        creds[cfg.endpoint] = (self.party_id, client_secret(cfg.shared_secret, self.party_id))
        self.consumer = DataSpaceConsumer(self.party_id, self.client, creds)
        self._ids = Counter()
        self._lock = threading.RLock()
        self.register_routes()

    @staticmethod
    def _scope_for(role, rules):
        return tuple(sorted({r.resource_pattern for r in rules if r.role == role}))

    # helpers

    def next_id(self, prefix):
        self._ids[prefix] += 1
        return f"{prefix}-{self._ids[prefix]:04d}"

    def expose(self, method, pattern, fn, svc, action="write", status=200):
        """Route `fn(body, params, token)` behind the ``svc:<svc>`` resource."""
        def handler(req, params, token):
            body = req.json() if method == "POST" else None
            try:
                with self._lock:
                    out = fn(body, params, token)
            except MaasxError:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                raise BadRequest(f"malformed request: {exc!r}") from exc
            return json_response(out, status)
        self.gate.add_route(method, pattern, handler,
                            lambda req, params: Resource(f"svc:{svc}"), action)

    def endpoint_of(self, party_id):
        try:
            return self.cfg.peers[party_id].endpoint
        except KeyError:
            raise NotFound(f"unknown peer {party_id!r}") from None

    def only_peer(self, role):
        ids = self.cfg.peer_ids(role)
        if len(ids) != 1:
            raise NotFound(f"expected one {role} peer, found {len(ids)}")
        return ids[0]

    def call(self, party_id, method, path, body=None):
        """Authenticated call to a peer's business endpoint (client-credential token)."""
        endpoint = self.endpoint_of(party_id)
        token = self.consumer.leo_token(endpoint)
        resp = self.client.request(method, endpoint + path, json_body=body, token=token)
        return expect(resp, 200, 201).json()

    def register_routes(self):
        pass


class SupplierService(PartyService):
    role = "supplier"

    def __init__(self, cfg, network, clock=None):
        super().__init__(cfg, network, clock)
        self.machines = list(cfg.machines)
        self.history = [HistoryRecord.from_dict(h) for h in cfg.history if "processTime" in h]
        self.feature_history = [FeatureRecord.from_dict(h) for h in cfg.history]
        self.rfqs, self.offers, self.orders = {}, {}, {}
        self.requests = {}        # rfqId -> (po, td, qc) submodel ids
        self.plans, self.segments, self.seeds = {}, {}, {}
        self.capability_id = f"urn:maasx:sm:cap:{self.party_id}"
        self.stack = LayerStack(
            adapter=derive_capabilities,
            converter=lambda profile: build_capability_description(profile, self.capability_id),
            gate=self.gate, access=self.access, discovery=self.registry)
        self.bootstrap()

    def bootstrap(self):
        """Publish nameplate, capability description and machine data; register the shell."""
        nameplate = build_digital_nameplate(f"urn:maasx:sm:nameplate:{self.party_id}",
                                            self.cfg.display_name, "Machining services")
        self.repo.put_submodel(nameplate)
        cd = self.stack.publish(self.feature_history)
        machine_ids = []
        for m in self.machines:
            sm = build_machine_technical_data(m, f"urn:maasx:sm:machine:{self.party_id}:{m.machine_id}")
            self.repo.put_submodel(sm)
            machine_ids.append(sm.id)
        asset = self.cfg.asset_id or f"urn:maasx:asset:{self.party_id}"
        self.stack.announce(f"urn:maasx:aas:{self.party_id}", _id_short(self.party_id), asset,
                            [nameplate.id, cd.id] + machine_ids)
        self.negotiations.offer(Dataset(DTR_DATASET, "registry", frozenset({"platform"})))
        for sm in (nameplate, cd):
            self.negotiations.offer(Dataset(sm.id, "submodel", frozenset({"platform"}), sm.semantic_id))

    def register_routes(self):
        self.expose("POST", "/rfq", lambda b, p, t: self.process_request(b), "rfq")
        self.expose("POST", "/orders", lambda b, p, t: self.receive_order(b), "orders")
        self.expose("POST", "/quality/data", lambda b, p, t: self.ingest_quality_data(b), "quality")
        self.expose("POST", "/quality/report", lambda b, p, t: self.quality_report(b["orderId"]), "quality")
        self.expose("POST", "/modeler/derive", lambda b, p, t: self.derive(b), "modeler")
        self.expose("POST", "/quote/cost-analysis", lambda b, p, t: self.quote(b), "quote")
        self.expose("POST", "/admin/push-capability", lambda b, p, t: self.push_capability(), "admin")
        self.expose("POST", "/admin/produce", lambda b, p, t: self.produce(b), "admin")

    def derive(self, body):
        """Capability modeler: feature history -> CapabilityDescription (not published)."""
        history = [FeatureRecord.from_dict(r) for r in body["history"]]
        sm = build_capability_description(derive_capabilities(history),
                                          body.get("submodelId", self.capability_id))
        return submodel_to_dict(sm)

    def quote(self, body):
        td = _validated(body["technicalData"], TECHNICAL_DATA)
        machines = ([MachineRecord.from_dict(m) for m in body["machines"]] if "machines" in body
                    else self.machines)
        breakdown = cost_analysis(parse_technical_data(td)[3], machines, self.history,
                                  self.cfg.setup_cost, self.cfg.fallback_mrr)
        return breakdown.to_dict()

    # Scenario 1, push variant

    def push_capability(self):
        platform = self.only_peer("platform")
        cd = self.repo.get_submodel(self.capability_id)
        return self.call(platform, "POST", "/notifications/capability", submodel_to_dict(cd))

    # Scenario 2

    def process_request(self, payload):
        """Validate an RFQ, cost it against the machine park and quote or decline."""
        try:
            rfq = RfqRecord(payload["rfqId"], payload["buyerId"], self.party_id,
                            payload["purchaseOrderRef"], payload["technicalDataRef"],
                            int(payload["deadline"]), state="SENT")
        except (KeyError, TypeError, ValueError) as exc:
            raise BadRequest(f"RFQ envelope incomplete: {exc!r}") from None
        if rfq.rfq_id in self.rfqs:
            raise IllegalTransition(f"RFQ {rfq.rfq_id} already received")
        self.rfqs[rfq.rfq_id] = rfq
        transition(rfq, "ack")
        try:
            po = _validated(payload["purchaseOrder"], PURCHASE_ORDER)
            td = _validated(payload["technicalData"], TECHNICAL_DATA)
            qc = _validated(payload["qualityPlan"], QUALITY_CONTROL) if payload.get("qualityPlan") else None
            if po.id != rfq.purchase_order_ref or td.id != rfq.technical_data_ref:
                raise BadRequest("RFQ references do not match the enclosed submodels")
            _, _, _, features = parse_technical_data(td)
        except (MaasxError, KeyError, TypeError, ValueError) as exc:
            log.info("%s declines %s: %s", self.party_id, rfq.rfq_id, exc)
            return self._decline(rfq, "invalid request")
        try:
            breakdown = cost_analysis(features, self.machines, self.history, self.cfg.setup_cost,
                                      self.cfg.fallback_mrr)
        except (NoCapableMachine, NoHistoryNoFallback) as exc:
            return self._decline(rfq, type(exc).__name__)
        offer_id = self.next_id(f"OFF-{self.party_id}")
        costed = replace(with_feature_costs(td, breakdown), id=f"urn:maasx:sm:cost:{offer_id}",
                         id_short="CostBreakdown")
        for sm in (po, td, costed) + ((qc,) if qc is not None else ()):
            self.repo.put_submodel(sm)
        self.requests[rfq.rfq_id] = (po.id, td.id, qc.id if qc is not None else None)
        offer = Offer(offer_id, rfq.rfq_id, self.party_id, costed.id, breakdown.total_micro,
                      self.clock.now() + OFFER_VALIDITY)
        self.offers[offer_id] = offer
        rfq.offer_id = offer_id
        transition(rfq, "quote")
        return {"rfq": rfq.to_dict(), "offer": offer.to_dict(),
                "costBreakdown": submodel_to_dict(costed)}

    @staticmethod
    def _decline(rfq, reason):
        rfq.reason = reason
        transition(rfq, "decline")
        return {"rfq": rfq.to_dict()}

    def receive_order(self, body):
        offer = self.offers.get(body["offerId"])
        if offer is None:
            raise NotFound(f"offer {body['offerId']!r}")
        po = _validated(body["purchaseOrder"], PURCHASE_ORDER)
        draft = parse_purchase_order(po)
        if draft.order_id != body["orderId"]:
            raise BadRequest("orderId does not match the purchase order")
        transition(offer, "accept")
        order = Order(draft.order_id, offer.offer_id, self.party_id, draft.buyer_id)
        self.orders[order.order_id] = order
        transition(order, "confirm")
        self.repo.put_submodel(with_order_status(po, order.state))
        return order.to_dict()

    # Scenario 3

    def _order(self, order_id):
        try:
            return self.orders[order_id]
        except KeyError:
            raise NotFound(f"order {order_id!r}") from None

    def _request_of(self, order):
        return self.requests[self.offers[order.offer_id].rfq_id]

    def produce(self, body):
        """CAM planning, machining stand-in (seeded signals) and the quality report."""
        order = self._order(body["orderId"])
        if order.state != "CONFIRMED":
            raise IllegalTransition(f"order {order.order_id} is {order.state}, not CONFIRMED")
        seed = int(body.get("seed", self.cfg.seed))
        anomaly = body.get("anomaly", "none")
        _, td_id, _ = self._request_of(order)
        features = parse_technical_data(self.repo.get_submodel(td_id))[3]
        machine = select_cam_machine(features, self.machines)
        plan = plan_cam(features, machine)
        hd = build_handover_documentation(
            [(f"CAM-{order.order_id}", "CAM program", "CAMProgram", cam_plan_elements(plan))],
            f"urn:maasx:sm:hd:{order.order_id}")
        self.repo.put_submodel(hd)
        transition(order, "start")
        self._store_status(order)
        self.plans[order.order_id] = plan
        self.seeds[order.order_id] = seed
        spec = replace(SignalSpec.from_dict(self.cfg.signal), anomaly=anomaly)
        segments = generate_run(spec, derive_seed(seed, 0), self.segment_ids(plan))
        self.ingest_quality_data({"orderId": order.order_id,
                                  "segments": [s.to_dict() for s in segments]})
        return self.quality_report(order.order_id)

    @staticmethod
    def segment_ids(plan):
        return [f"SEG{i + 1:02d}" for i in range(len(plan.steps))]

    def ingest_quality_data(self, body):
        order = self._order(body["orderId"])
        if order.state != "IN_PRODUCTION":
            raise IllegalTransition(f"order {order.order_id} is not in production")
        segments = [SignalSegment.from_dict(s) for s in body["segments"]]
        self.segments[order.order_id] = segments
        return {"orderId": order.order_id, "segments": len(segments)}

    def thresholds_for(self, order_id, segment_ids):
        if self.cfg.thresholds is not None:
            return build_baseline([], k=self.cfg.k, operator=self.cfg.thresholds)
        seed = self.seeds.get(order_id, self.cfg.seed)
        clean = replace(SignalSpec.from_dict(self.cfg.signal), anomaly="none")
        runs = [generate_run(clean, derive_seed(seed, r + 1), segment_ids)
                for r in range(self.cfg.reference_runs)]
        return build_baseline(runs, k=self.cfg.k)

    def quality_report(self, order_id):
        order = self._order(order_id)
        segments = self.segments.get(order_id)
        if segments is None:
            raise IllegalTransition(f"no quality data for order {order_id}")
        plan = self.plans.get(order_id)
        seg_ids = [s.segment_id for s in segments]
        verdict = evaluate(segments, self.thresholds_for(order_id, seg_ids))
        transition(order, "inspect")
        po_id, _, qc_id = self._request_of(order)
        draft = parse_purchase_order(self.repo.get_submodel(po_id))
        pmi = parse_quality_report(self.repo.get_submodel(qc_id))[0] if qc_id else []
        seg_features = ({sid: step.feature_id for sid, step in zip(self.segment_ids(plan), plan.steps)}
                        if plan is not None else {})
        report = compose_measurement_report(draft, pmi, verdict, seg_features,
                                            submodel_id=f"urn:maasx:sm:qc:{order_id}")
        self.repo.put_submodel(report)
        order.report_ref = report.id
        transition(order, "pass" if verdict.overall else "fail")
        self._store_status(order)
        # delivery is unconditional: a failed part still gets its report
        ack = self.call(self.only_peer("platform"), "POST", "/reports",
                        {"orderId": order_id, "state": order.state,
                         "report": submodel_to_dict(report)})
        return {"order": order.to_dict(), "verdict": verdict.to_dict(), "reportRef": report.id,
                "delivered": ack}

    def _store_status(self, order):
        po_id = self._request_of(order)[0]
        self.repo.put_submodel(with_order_status(self.repo.get_submodel(po_id), order.state))


class PlatformService(PartyService):
    role = "platform"

    def __init__(self, cfg, network, clock=None):
        super().__init__(cfg, network, clock)
        self.capabilities = {}     # supplierId -> CapabilityProfile
        self.capability_docs = {}  # supplierId -> SubmodelInstance
        self.searches, self.rfqs, self.offers, self.orders = {}, {}, {}, {}

    def register_routes(self):
        self.expose("POST", "/notifications/capability",
                    lambda b, p, t: self.receive_capability(t.subject, b), "notifications")
        self.expose("POST", "/features/recognize", lambda b, p, t: self.recognize(b), "features")
        self.expose("POST", "/search", lambda b, p, t: self.search(t.subject, b), "search")
        self.expose("GET", "/offers/{rfqId}", lambda b, p, t: self.offer_for(p["rfqId"]), "offers", "read")
        self.expose("POST", "/offers/{offerId}/accept",
                    lambda b, p, t: self.accept(t.subject, p["offerId"]), "offers")
        self.expose("POST", "/reports", lambda b, p, t: self.receive_report(t.subject, b), "reports")
        self.expose("GET", "/reports/{orderId}", lambda b, p, t: self.report_for(t.subject, p["orderId"]),
                    "reports", "read")
        self.expose("POST", "/admin/pull-capabilities", lambda b, p, t: self.pull_capabilities(b), "admin")
        self.expose("GET", "/admin/capabilities", lambda b, p, t: self.capability_state(), "admin", "read")

    # Scenario 1

    def store_capability(self, supplier_id, sm):
        profile = parse_capability_description(sm)
        self.repo.put_submodel(sm)
        self.capabilities[supplier_id] = profile
        self.capability_docs[supplier_id] = sm

    def receive_capability(self, supplier_id, body):
        if supplier_id not in self.cfg.peer_ids("supplier"):
            raise AccessDenied(f"{supplier_id} is not a registered supplier")
        sm = _validated(body, CAPABILITY_DESCRIPTION)
        self.store_capability(supplier_id, sm)
        return {"supplierId": supplier_id, "submodelId": sm.id}

    def pull_capabilities(self, body):
        mode = (body or {}).get("mode", HERCULES)
        wanted = (body or {}).get("supplierIds") or self.cfg.peer_ids("supplier")
        pulled = []
        for sid in wanted:
            peer = self.cfg.peers[sid]
            sm = self.consumer.fetch_remote_submodel(
                provider=peer.endpoint, asset_id=peer.asset_id or f"urn:maasx:asset:{sid}",
                semantic_id=CAPABILITY_DESCRIPTION.semantic_id, mode=mode)
            self.store_capability(sid, sm)
            pulled.append(sid)
        return dict(self.capability_state(), pulled=pulled)

    def capability_store_bytes(self) -> bytes:
        return canonical_json({sid: submodel_to_dict(sm)
                               for sid, sm in sorted(self.capability_docs.items())})

    def capability_state(self):
        return {"suppliers": sorted(self.capability_docs),
                "storeSha256": hashlib.sha256(self.capability_store_bytes()).hexdigest()}

    # Scenario 2

    @staticmethod
    def recognize(body):
        graph = FaceGraph.from_dict(body)
        sm = build_technical_data(graph.part_id, graph.stock, graph.material,
                                  recognize_features(graph))
        return submodel_to_dict(sm)

    def search(self, buyer_id, body):
        graph = FaceGraph.from_dict(body["faceGraph"])
        features = recognize_features(graph)
        req = requirements_from_features(features, graph.stock, graph.material)
        matches = match_suppliers(req, self.capabilities)
        if not matches:
            raise NoEligibleSupplier(f"no supplier can make part {graph.part_id}")
        order_id = self.next_id("ORD")
        product = f"urn:maasx:aas:part:{graph.part_id}"
        draft = OrderDraft(order_id, buyer_id,
                           [OrderLine(graph.part_id, int(body["quantity"]), body["dueDate"])], product)
        po = build_purchase_order(draft)
        td = build_technical_data(graph.part_id, graph.stock, graph.material, features,
                                  submodel_id=f"urn:maasx:sm:td:{order_id}")
        pmi = [QualityRequirement.from_dict(d) for d in body.get("pmi", [])]
        qc = build_quality_report(pmi, [], submodel_id=f"urn:maasx:sm:qc:{order_id}:plan",
                                  order_id=order_id, product_aas_id=product)
        for sm in (po, td, qc):
            self.repo.put_submodel(sm)
        deadline = self.clock.now() + RFQ_WINDOW
        rfqs, offers = [], []
        for sid in sorted(m.supplier_id for m in matches):
            rfq = RfqRecord(self.next_id("RFQ"), buyer_id, sid, po.id, td.id, deadline)
            self.rfqs[rfq.rfq_id] = rfq
            rfqs.append(rfq)
            transition(rfq, "send")
            payload = dict(rfq.to_dict(), purchaseOrder=submodel_to_dict(po),
                           technicalData=submodel_to_dict(td), qualityPlan=submodel_to_dict(qc))
            try:
                reply = self.call(sid, "POST", "/rfq", payload)
            except TransportError as exc:
                log.warning("RFQ %s to %s unanswered: %s", rfq.rfq_id, sid, exc)
                transition(rfq, "timeout")
                continue
            except MaasxError as exc:
                transition(rfq, "ack")
                rfq.reason = f"{type(exc).__name__}: {exc}"
                transition(rfq, "decline")
                continue
            transition(rfq, "ack")
            if reply["rfq"]["state"] == "QUOTED":
                offer = Offer.from_dict(reply["offer"])
                costed = submodel_from_dict(reply["costBreakdown"])
                self.repo.put_submodel(costed)
                self.offers[offer.offer_id] = offer
                offers.append(offer)
                rfq.offer_id = offer.offer_id
                transition(rfq, "quote")
            else:
                rfq.reason = reply["rfq"].get("reason", "")
                transition(rfq, "decline")
        # the exchange is synchronous; whatever is still open at the deadline times out
        for rfq in rfqs:
            if rfq.state in ("SENT", "ACKNOWLEDGED"):
                transition(rfq, "timeout")
        offers.sort(key=lambda o: (o.total_micro, o.supplier_id))
        self.searches[order_id] = {"buyerId": buyer_id, "purchaseOrder": po.id,
                                   "rfqs": [r.rfq_id for r in rfqs],
                                   "offers": [o.offer_id for o in offers]}
        if not offers:
            raise AllDeclined(f"all {len(rfqs)} suppliers declined order {order_id}")
        return {"orderId": order_id, "rfqs": [r.to_dict() for r in rfqs],
                "offers": [o.to_dict() for o in offers]}

    def offer_for(self, rfq_id):
        rfq = self.rfqs.get(rfq_id)
        if rfq is None or rfq.offer_id is None:
            raise NotFound(f"no offer for RFQ {rfq_id!r}")
        return self.offers[rfq.offer_id].to_dict()

    def accept(self, buyer_id, offer_id):
        offer = self.offers.get(offer_id)
        if offer is None:
            raise NotFound(f"offer {offer_id!r}")
        order_id, search = next((k, s) for k, s in self.searches.items() if offer_id in s["offers"])
        if search["buyerId"] != buyer_id:
            raise AccessDenied("offer belongs to another buyer")
        transition(offer, "accept")
        for other in search["offers"]:
            if self.offers[other].state == "ISSUED":
                transition(self.offers[other], "reject")
        order = Order(order_id, offer_id, offer.supplier_id, buyer_id)
        self.orders[order_id] = order
        po = self.repo.get_submodel(search["purchaseOrder"])
        reply = self.call(offer.supplier_id, "POST", "/orders",
                          {"orderId": order_id, "offerId": offer_id,
                           "purchaseOrder": submodel_to_dict(po)})
        if reply["state"] == "CONFIRMED":
            transition(order, "confirm")
        self.repo.put_submodel(with_order_status(po, order.state))
        return order.to_dict()

    # Scenario 3

    def receive_report(self, supplier_id, body):
        order = self.orders.get(body["orderId"])
        if order is None:
            raise NotFound(f"order {body['orderId']!r}")
        if order.supplier_id != supplier_id:
            raise AccessDenied("report from a supplier that does not hold the order")
        report = _validated(body["report"], QUALITY_CONTROL)
        final = body["state"]
        if final not in ("COMPLETED", "FAILED_QUALITY"):
            raise BadRequest(f"unexpected final state {final!r}")
        self.repo.put_submodel(report)
        transition(order, "start")
        transition(order, "inspect")
        order.report_ref = report.id
        transition(order, "pass" if final == "COMPLETED" else "fail")
        po_id = self.searches[order.order_id]["purchaseOrder"]
        self.repo.put_submodel(with_order_status(self.repo.get_submodel(po_id), order.state))
        forwarded = self.call(order.buyer_id, "POST", "/reports",
                              {"orderId": order.order_id, "state": order.state,
                               "report": submodel_to_dict(report)})
        return {"orderId": order.order_id, "state": order.state, "reportRef": report.id,
                "forwarded": forwarded["reportRef"]}

    def report_for(self, buyer_id, order_id):
        order = self.orders.get(order_id)
        if order is None or order.report_ref is None:
            raise NotFound(f"no report for order {order_id!r}")
        if order.buyer_id != buyer_id:
            raise AccessDenied("report belongs to another buyer")
        return submodel_to_dict(self.repo.get_submodel(order.report_ref))


class BuyerService(PartyService):
    role = "buyer"

    def __init__(self, cfg, network, clock=None):
        super().__init__(cfg, network, clock)
        self.reports = {}

    def register_routes(self):
        self.expose("POST", "/reports", lambda b, p, t: self.receive_report(b), "reports")
        self.expose("POST", "/admin/search",
                    lambda b, p, t: self.call(self.only_peer("platform"), "POST", "/search", b), "admin")
        self.expose("POST", "/admin/accept",
                    lambda b, p, t: self.call(self.only_peer("platform"), "POST",
                                              f"/offers/{b['offerId']}/accept"), "admin")

    def receive_report(self, body):
        report = _validated(body["report"], QUALITY_CONTROL)
        self.repo.put_submodel(report)
        self.reports[body["orderId"]] = (body["state"], report.id)
        return {"orderId": body["orderId"], "reportRef": report.id}


SERVICES = {"supplier": SupplierService, "platform": PlatformService, "buyer": BuyerService}


def build_service(cfg: Config, network, clock=None) -> PartyService:
    return SERVICES[cfg.role](cfg, network, clock)
