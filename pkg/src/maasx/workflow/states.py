"""RFQ, Offer and Order records with explicit transition tables.

`transition` is the only way a record changes state; an event that is not
in the table raises `IllegalTransition` and leaves the record untouched.
"""

from dataclasses import dataclass, field
from typing import Optional

from ..errors import IllegalTransition

RFQ_TRANSITIONS = {
    ("CREATED", "send"): "SENT",
    ("SENT", "ack"): "ACKNOWLEDGED",
    ("SENT", "timeout"): "TIMED_OUT",
    ("ACKNOWLEDGED", "quote"): "QUOTED",
    ("ACKNOWLEDGED", "decline"): "DECLINED",
    ("ACKNOWLEDGED", "timeout"): "TIMED_OUT",
}
RFQ_EVENTS = ("send", "ack", "quote", "decline", "timeout")
RFQ_STATES = ("CREATED", "SENT", "ACKNOWLEDGED", "QUOTED", "DECLINED", "TIMED_OUT")
RFQ_TERMINAL = ("QUOTED", "DECLINED", "TIMED_OUT")

OFFER_TRANSITIONS = {
    ("ISSUED", "accept"): "ACCEPTED",
    ("ISSUED", "reject"): "REJECTED",
    ("ISSUED", "expire"): "EXPIRED",
}
OFFER_EVENTS = ("accept", "reject", "expire")
OFFER_STATES = ("ISSUED", "ACCEPTED", "REJECTED", "EXPIRED")

ORDER_TRANSITIONS = {
    ("PLACED", "confirm"): "CONFIRMED",
    ("CONFIRMED", "start"): "IN_PRODUCTION",
    ("IN_PRODUCTION", "inspect"): "QUALITY_CHECK",
    ("QUALITY_CHECK", "pass"): "COMPLETED",
    ("QUALITY_CHECK", "fail"): "FAILED_QUALITY",
}
ORDER_EVENTS = ("confirm", "start", "inspect", "pass", "fail")
ORDER_STATES = ("PLACED", "CONFIRMED", "IN_PRODUCTION", "QUALITY_CHECK", "COMPLETED",
                "FAILED_QUALITY")


@dataclass
class RfqRecord:
    rfq_id: str
    buyer_id: str
    supplier_id: str
    purchase_order_ref: str
    technical_data_ref: str
    deadline: int
    state: str = "CREATED"
    offer_id: Optional[str] = None
    reason: str = ""

    table = RFQ_TRANSITIONS

    def guard(self, event):
        if event == "quote" and self.offer_id is None:
            return "QUOTED needs an offer"
        return None

    def to_dict(self):
        d = {"rfqId": self.rfq_id, "buyerId": self.buyer_id, "supplierId": self.supplier_id,
             "purchaseOrderRef": self.purchase_order_ref,
             "technicalDataRef": self.technical_data_ref, "deadline": self.deadline,
             "state": self.state}
        if self.offer_id is not None:
            d["offerId"] = self.offer_id
        if self.reason:
            d["reason"] = self.reason
        return d


@dataclass
class Offer:
    offer_id: str
    rfq_id: str
    supplier_id: str
    cost_breakdown_ref: str
    total_micro: int
    validity: int
    state: str = "ISSUED"

    table = OFFER_TRANSITIONS

    def guard(self, event):
        return None

    def to_dict(self):
        return {"offerId": self.offer_id, "rfqId": self.rfq_id, "supplierId": self.supplier_id,
                "costBreakdownRef": self.cost_breakdown_ref, "totalMicro": self.total_micro,
                "validity": self.validity, "state": self.state}

    @classmethod
    def from_dict(cls, d):
        return cls(d["offerId"], d["rfqId"], d["supplierId"], d["costBreakdownRef"],
                   int(d["totalMicro"]), int(d["validity"]), d.get("state", "ISSUED"))


@dataclass
class Order:
    order_id: str
    offer_id: str
    supplier_id: str
    buyer_id: str
    state: str = "PLACED"
    report_ref: Optional[str] = None
    history: list = field(default_factory=list)

    table = ORDER_TRANSITIONS

    def guard(self, event):
        if event in ("pass", "fail") and self.report_ref is None:
            return "a quality report must be stored first"
        return None

    def to_dict(self):
        d = {"orderId": self.order_id, "offerId": self.offer_id, "supplierId": self.supplier_id,
             "buyerId": self.buyer_id, "state": self.state}
        if self.report_ref is not None:
            d["reportRef"] = self.report_ref
        return d


def transition(record, event) -> str:
    nxt = record.table.get((record.state, event))
    if nxt is None:
        raise IllegalTransition(f"{type(record).__name__} in {record.state}: {event!r} not allowed")
    why = record.guard(event)
    if why:
        raise IllegalTransition(f"{type(record).__name__} {event!r}: {why}")
    record.state = nxt
    if isinstance(record, Order):
        record.history.append(nxt)
    return nxt
