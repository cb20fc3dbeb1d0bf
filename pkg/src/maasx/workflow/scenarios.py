"""Scenario driver.

The driver acts as each party's operator: it fetches a token from the
party's own gate and calls its ``/admin/*`` routes.  Everything therefore
travels over the configured transport, so an in-process run and a run
against served processes execute the same request sequence.
"""

from __future__ import annotations

import hashlib
import logging
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict

from ..aas.identifiers import encode_identifier
from ..aas.serialization import canonical_json, canonical_serialize
from ..config import WorldConfig, client_secret
from ..mxport.consumer import HERCULES, expect
from ..mxport.transport import HttpNetwork, InProcessNetwork, Trace
from .services import build_service

log = logging.getLogger(__name__)

PULL, PUSH = "pull", "push"


@dataclass
class Deployment:
    world: WorldConfig
    network: object
    trace: Trace
    services: Dict[str, object] = field(default_factory=dict)   # in-process only

    def endpoint(self, party_id):
        return self.world.party(party_id).endpoint

    def operator(self, party_id):
        return Operator(self, party_id)

    def ids(self, role):
        return [p.party_id for p in self.world.by_role(role)]


def deploy_in_process(world: WorldConfig, data_dirs=False) -> Deployment:
    trace = Trace()
    net = InProcessNetwork(trace)
    dep = Deployment(world, net, trace)
    for cfg in world.parties:
        if not data_dirs:
            cfg = _without_data_dir(cfg)
        svc = build_service(cfg, net)
        net.attach(cfg.endpoint, svc.gate, cfg.party_id)
        dep.services[cfg.party_id] = svc
    return dep


def _without_data_dir(cfg):
    from ..config import with_data_dir
    return with_data_dir(cfg, None)


def connect_http(world: WorldConfig, timeout=60.0) -> Deployment:
    """Drive parties that are already being served at their configured endpoints."""
    trace = Trace()
    directory = {p.endpoint: p.party_id for p in world.parties}
    return Deployment(world, HttpNetwork(trace, directory, timeout), trace)


class Operator:
    """A party's own operator console, reached through that party's gate."""

    def __init__(self, dep: Deployment, party_id):
        cfg = dep.world.party(party_id)
        self.cfg = cfg
        self.client = dep.network.client(f"operator:{party_id}")

    def _token(self):
        resp = self.client.post(f"{self.cfg.endpoint}/token",
                                {"clientId": self.cfg.party_id,
                                 "clientSecret": client_secret(self.cfg.shared_secret, self.cfg.party_id)})
        return expect(resp).json()["token"]

    def post(self, path, body=None):
        resp = self.client.post(self.cfg.endpoint + path, body if body is not None else {},
                                token=self._token())
        return expect(resp, 200, 201).json()

    def get(self, path):
        return expect(self.client.get(self.cfg.endpoint + path, token=self._token())).json()


# scenarios

def run_scenario_1(dep: Deployment, mode=PULL, supplier_ids=None, mx=HERCULES):
    """Capability notification; returns the platform's capability store state."""
    platform = dep.ids("platform")[0]
    suppliers = supplier_ids or dep.ids("supplier")
    if mode == PULL:
        dep.operator(platform).post("/admin/pull-capabilities",
                                    {"mode": mx, "supplierIds": list(suppliers)})
    elif mode == PUSH:
        for sid in suppliers:
            dep.operator(sid).post("/admin/push-capability")
    else:
        raise ValueError(f"mode must be pull or push, got {mode!r}")
    state = dep.operator(platform).get("/admin/capabilities")
    return {"mode": mode, **state}


def run_scenario_2(dep: Deployment, request=None, accept=True):
    """Search, RFQ fan-out and (optionally) acceptance of the cheapest offer."""
    buyer = dep.ids("buyer")[0]
    request = request if request is not None else dep.world.buyer_request
    result = dep.operator(buyer).post("/admin/search", request)
    out = {"orderId": result["orderId"], "rfqs": result["rfqs"], "offers": result["offers"]}
    if accept:
        out["order"] = dep.operator(buyer).post("/admin/accept",
                                                {"offerId": result["offers"][0]["offerId"]})
    return out


def run_scenario_3(dep: Deployment, order, seed, anomaly="none"):
    """Production, quality evaluation and report delivery for a confirmed order."""
    return dep.operator(order["supplierId"]).post(
        "/admin/produce", {"orderId": order["orderId"], "seed": seed, "anomaly": anomaly})


def run_e2e(dep: Deployment, seed=None, anomaly=None, upto="e2e"):
    """Scenarios 1 -> 2 -> 3 on one deployment; `upto` stops early ("1", "2", "3")."""
    world = dep.world
    seed = world.seed if seed is None else seed
    anomaly = world.anomaly if anomaly is None else anomaly
    outcome = {"seed": seed}
    s1 = run_scenario_1(dep, world.scenario1_mode)
    outcome["scenario1"] = s1
    if upto == "e2e":
        # the other notification mode must leave the platform store unchanged
        other = PUSH if world.scenario1_mode == PULL else PULL
        again = run_scenario_1(dep, other)
        outcome["scenario1"]["equivalent"] = again["storeSha256"] == s1["storeSha256"]
    if upto == "1":
        return outcome
    s2 = run_scenario_2(dep)
    outcome["scenario2"] = s2
    if upto == "2":
        return outcome
    outcome["scenario3"] = run_scenario_3(dep, s2["order"], seed, anomaly)
    return outcome


# output

def submodel_files(dep: Deployment):
    """{partyId: {filename: bytes}} of every persisted submodel.

    In-process services are read directly; served parties are read from
    their configured data directories.
    """
    out = {}
    for cfg in sorted(dep.world.parties, key=lambda c: c.party_id):
        svc = dep.services.get(cfg.party_id)
        if svc is not None:
            out[cfg.party_id] = {f"{encode_identifier(sm.id)}.json": canonical_serialize(sm)
                                 for sm in svc.repo.submodels()}
        elif cfg.data_dir is not None:
            d = Path(cfg.data_dir) / "submodels"
            out[cfg.party_id] = {p.name: p.read_bytes() for p in sorted(d.glob("*.json"))}
    return out


def write_output(out_dir, dep: Deployment, outcome):
    """``submodels/<partyId>/``, ``reports/``, ``trace.jsonl`` and ``outcome.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for sub in ("submodels", "reports"):
        if (out / sub).exists():
            shutil.rmtree(out / sub)
    files = submodel_files(dep)
    for pid, party_files in files.items():
        d = out / "submodels" / pid
        d.mkdir(parents=True)
        for name, data in party_files.items():
            (d / name).write_bytes(data)
    (out / "reports").mkdir()
    s3 = outcome.get("scenario3")
    if s3 is not None:
        # the platform-side copy: what the buyer is served
        platform = dep.ids("platform")[0]
        data = files.get(platform, {}).get(f"{encode_identifier(s3['reportRef'])}.json")
        if data is not None:
            (out / "reports" / f"{s3['order']['orderId']}.json").write_bytes(data)
    (out / "trace.jsonl").write_bytes(dep.trace.to_jsonl())
    (out / "outcome.json").write_bytes(canonical_json(outcome) + b"\n")
    return out


def tree_digest(root) -> Dict[str, str]:
    """Relative path -> sha256 for every file below `root`."""
    root = Path(root)
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(root.rglob("*")) if p.is_file()}
