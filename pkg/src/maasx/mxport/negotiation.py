"""Contract negotiation reduced to a five-state machine.

    REQUESTED --offer--> OFFERED --agree--> AGREED --finalize--> FINALIZED
    any non-terminal state --terminate--> TERMINATED

An agreement id exists exactly in AGREED and FINALIZED.
"""

import threading
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional

from ..errors import IllegalTransition, NegotiationTerminated, NotFound, UnknownDataset

REQUESTED, OFFERED, AGREED, FINALIZED, TERMINATED = (
    "REQUESTED", "OFFERED", "AGREED", "FINALIZED", "TERMINATED")
STATES = (REQUESTED, OFFERED, AGREED, FINALIZED, TERMINATED)
EVENTS = ("offer", "agree", "finalize", "terminate")
AGREEMENT_PREFIX = "agr-"

TRANSITIONS = {
    (REQUESTED, "offer"): OFFERED,
    (OFFERED, "agree"): AGREED,
    (AGREED, "finalize"): FINALIZED,
    (REQUESTED, "terminate"): TERMINATED,
    (OFFERED, "terminate"): TERMINATED,
    (AGREED, "terminate"): TERMINATED,
    (FINALIZED, "terminate"): TERMINATED,
}


@dataclass
class ContractNegotiation:
    id: str
    consumer_id: str
    dataset_id: str
    state: str = REQUESTED
    agreement_id: Optional[str] = None
    reason: str = ""

    def apply(self, event):
        nxt = TRANSITIONS.get((self.state, event))
        if nxt is None:
            raise IllegalTransition(f"negotiation {self.id}: {event!r} not allowed in {self.state}")
        self.state = nxt
        if nxt == AGREED:
            self.agreement_id = AGREEMENT_PREFIX + self.id
        elif nxt == TERMINATED:
            self.agreement_id = None
        return nxt

    def to_dict(self):
        d = {"id": self.id, "consumerId": self.consumer_id, "datasetId": self.dataset_id,
             "state": self.state}
        if self.agreement_id is not None:
            d["agreementId"] = self.agreement_id
        if self.reason:
            d["reason"] = self.reason
        return d


@dataclass(frozen=True)
class Dataset:
    dataset_id: str
    kind: str                      # "submodel" | "registry"
    allowed_roles: FrozenSet[str]
    semantic_id: Optional[str] = None

    def to_dict(self):
        d = {"datasetId": self.dataset_id, "kind": self.kind,
             "policy": {"allowedRoles": sorted(self.allowed_roles)}}
        if self.semantic_id is not None:
            d["semanticId"] = self.semantic_id
        return d


@dataclass
class NegotiationManager:
    """Provider side of negotiation.  Transitions are serialized per manager."""

    provider_id: str
    datasets: Dict[str, Dataset] = field(default_factory=dict)
    party_roles: Dict[str, str] = field(default_factory=dict)
    negotiations: Dict[str, ContractNegotiation] = field(default_factory=dict)

    def __post_init__(self):
        self._lock = threading.Lock()
        self._counter = 0

    def offer(self, dataset: Dataset):
        self.datasets[dataset.dataset_id] = dataset

    def catalog(self):
        return [self.datasets[k].to_dict() for k in sorted(self.datasets)]

    def request(self, consumer_id, dataset_id, auto=True) -> ContractNegotiation:
        """Open a negotiation; with `auto` the provider drives it as far as policy allows."""
        if dataset_id not in self.datasets:
            raise UnknownDataset(f"dataset {dataset_id!r} not in catalog of {self.provider_id}")
        with self._lock:
            self._counter += 1
            neg = ContractNegotiation(f"neg-{self.provider_id}-{self._counter:04d}", consumer_id, dataset_id)
            self.negotiations[neg.id] = neg
            if auto:
                role = self.party_roles.get(consumer_id)
                if role is None or role not in self.datasets[dataset_id].allowed_roles:
                    neg.reason = "policy denies consumer"
                    neg.apply("terminate")
                else:
                    for event in ("offer", "agree", "finalize"):
                        neg.apply(event)
        return neg

    def get(self, negotiation_id) -> ContractNegotiation:
        try:
            return self.negotiations[negotiation_id]
        except KeyError:
            raise NotFound(f"negotiation {negotiation_id!r}") from None

    def apply(self, negotiation_id, event):
        with self._lock:
            return self.get(negotiation_id).apply(event)

    def finalized(self, agreement_id) -> ContractNegotiation:
        # agreement ids are "agr-<negotiation id>", so no scan is needed
        neg = self.negotiations.get(agreement_id[len(AGREEMENT_PREFIX):]) \
            if agreement_id.startswith(AGREEMENT_PREFIX) else None
        if neg is None or neg.agreement_id != agreement_id:
            raise NotFound(f"agreement {agreement_id!r}")
        if neg.state != FINALIZED:
            raise NegotiationTerminated(f"agreement {agreement_id} is {neg.state}")
        return neg
