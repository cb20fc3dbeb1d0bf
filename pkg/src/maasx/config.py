"""JSON configuration with ``MAASX_`` environment overrides.

Precedence is environment > file > defaults.  A party file describes one
service (what ``serve`` runs); a world file lists party files plus the
scenario inputs (what ``scenario`` runs).  Relative paths resolve against
the directory of the file that names them.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional

from .errors import ConfigError
from .mxport.tokens import ROLES

ENV_PREFIX = "MAASX_"
UINT64_MAX = 2**64 - 1

# env var suffix -> (config key, parser)
_ENV_KEYS = {
    "PARTY_ID": ("partyId", str),
    "ROLE": ("role", str),
    "ENDPOINT": ("endpoint", str),
    "LISTEN": ("listen", str),
    "DATA_DIR": ("dataDir", str),
    "SHARED_SECRET": ("sharedSecret", str),
    "PEERS": ("peers", json.loads),
    "MACHINES": ("machines", str),
    "HISTORY": ("history", str),
    "FALLBACK_MRR": ("fallbackMrr", json.loads),
    "THRESHOLDS": ("thresholds", json.loads),
    "SEED": ("seed", int),
    "EPOCH": ("epoch", int),
    "ANOMALY": ("anomaly", str),
}


@dataclass(frozen=True)
class Peer:
    endpoint: str
    role: str
    asset_id: Optional[str] = None


@dataclass
class Config:
    party_id: str
    role: str
    endpoint: str
    listen: str = "127.0.0.1:0"
    data_dir: Optional[str] = None
    shared_secret: str = "change-me"
    peers: Dict[str, Peer] = field(default_factory=dict)
    asset_id: Optional[str] = None
    display_name: str = ""
    machines: list = field(default_factory=list)      # MachineRecord
    history: list = field(default_factory=list)       # raw history dicts
    fallback_mrr: Optional[Dict[str, float]] = None
    setup_cost: str = "0"
    thresholds: Optional[object] = None               # (a, b) or {segmentId: (a, b)}
    k: float = 3.0
    reference_runs: int = 5
    signal: dict = field(default_factory=dict)
    seed: int = 0
    epoch: int = 1_767_225_600
    token_ttl: int = 3600
    rules: Optional[list] = None

    def peer_ids(self, role):
        return sorted(pid for pid, p in self.peers.items() if p.role == role)

    @property
    def listen_address(self):
        host, _, port = self.listen.rpartition(":")
        try:
            return host or "127.0.0.1", int(port)
        except ValueError:
            raise ConfigError(f"listen must be host:port, got {self.listen!r}") from None


@dataclass
class WorldConfig:
    parties: List[Config]
    seed: int = 42
    buyer_request: dict = field(default_factory=dict)
    anomaly: str = "none"
    scenario1_mode: str = "pull"

    def party(self, party_id) -> Config:
        for p in self.parties:
            if p.party_id == party_id:
                return p
        raise ConfigError(f"no party {party_id!r} in world")

    def by_role(self, role) -> List[Config]:
        return [p for p in self.parties if p.role == role]


def client_secret(shared_secret, party_id) -> str:
    """Client credential a party presents at ``POST /token``.

    Derived from the shared secret so one distributed key covers both token
    signing and client authentication.
    """
    return hmac.new(shared_secret.encode(), f"client:{party_id}".encode(), hashlib.sha256).hexdigest()


def check_seed(seed) -> int:
    if isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an integer, got {seed!r}") from None
    if not 0 <= seed <= UINT64_MAX:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except ValueError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc


def env_overrides(env=None) -> dict:
    env = os.environ if env is None else env
    out = {}
    for suffix, (key, parse) in _ENV_KEYS.items():
        raw = env.get(ENV_PREFIX + suffix)
        if raw is None:
            continue
        try:
            out[key] = parse(raw)
        except ValueError as exc:
            raise ConfigError(f"{ENV_PREFIX}{suffix}: {exc}") from exc
    return out


def _resolve(base: Path, p):
    path = Path(p)
    return path if path.is_absolute() else base / path


def _load_list(base, value, what):
    """A list given inline or as a path to a JSON file holding it."""
    if isinstance(value, list):
        return value
    path = _resolve(base, value)
    if not path.is_file():
        raise ConfigError(f"{what} file does not exist: {path}")
    return _read_json(path)


def party_from_dict(d: dict, base: Path) -> Config:
    from .planning import MachineRecord   # planning imports nothing from config

    try:
        party_id, role = d["partyId"], d["role"]
        endpoint = d["endpoint"]
    except KeyError as exc:
        raise ConfigError(f"party config lacks {exc}") from None
    if role not in ROLES:
        raise ConfigError(f"role must be one of {ROLES}, got {role!r}")
    peers = {}
    for pid, p in (d.get("peers") or {}).items():
        if isinstance(p, str):
            raise ConfigError(f"peer {pid!r} needs an object with endpoint and role")
        peers[pid] = Peer(p["endpoint"], p["role"], p.get("assetId"))
    machines = [MachineRecord.from_dict(m) for m in _load_list(base, d.get("machines", []), "machines")]
    history = _load_list(base, d.get("history", []), "history")
    thresholds = d.get("thresholds")
    if isinstance(thresholds, dict):
        if set(thresholds) == {"skewness", "kurtosis"}:
            thresholds = (float(thresholds["skewness"]), float(thresholds["kurtosis"]))
        else:
            thresholds = {k: (float(v["skewness"]), float(v["kurtosis"])) for k, v in thresholds.items()}
    data_dir = d.get("dataDir")
    return Config(
        party_id=party_id, role=role, endpoint=endpoint.rstrip("/"),
        listen=d.get("listen", "127.0.0.1:0"),
        data_dir=str(_resolve(base, data_dir)) if data_dir else None,
        shared_secret=d.get("sharedSecret", "change-me"), peers=peers,
        asset_id=d.get("assetId"), display_name=d.get("displayName", party_id),
        machines=machines, history=history, fallback_mrr=d.get("fallbackMrr"),
        setup_cost=str(d.get("setupCost", "0")), thresholds=thresholds,
        k=float(d.get("k", 3.0)), reference_runs=int(d.get("referenceRuns", 5)),
        signal=dict(d.get("signal") or {}), seed=check_seed(d.get("seed", 0)),
        epoch=int(d.get("epoch", 1_767_225_600)), token_ttl=int(d.get("tokenTtl", 3600)),
        rules=d.get("rules"),
    )


def load_config(path, env=None) -> Config:
    """Party config: file values overlaid with ``MAASX_*`` variables."""
    path = Path(path)
    d = _read_json(path)
    d.update(env_overrides(env))
    return party_from_dict(d, path.parent)


def load_world(path, env=None, seed=None) -> WorldConfig:
    """World config; ``seed`` (the CLI flag) beats the environment and the file."""
    path = Path(path)
    d = _read_json(path)
    overrides = env_overrides(env)
    base = path.parent
    parties = []
    for entry in d.get("parties", []):
        if isinstance(entry, str):
            ppath = _resolve(base, entry)
            pd, pbase = _read_json(ppath), ppath.parent
        else:
            pd, pbase = dict(entry), base
        for key in ("sharedSecret", "epoch"):
            if key in d:
                pd.setdefault(key, d[key])
        parties.append(party_from_dict(pd, pbase))
    if not parties:
        raise ConfigError("world config lists no parties")
    ids = [p.party_id for p in parties]
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate partyId in world config")
    world_seed = check_seed(seed if seed is not None else overrides.get("seed", d.get("seed", 42)))
    req = d.get("buyerRequest", {})
    if isinstance(req, str):
        rpath = _resolve(base, req)
        if not rpath.is_file():
            raise ConfigError(f"buyer request file does not exist: {rpath}")
        req = _read_json(rpath)
        if isinstance(req.get("faceGraph"), str):
            req["faceGraph"] = _read_json(_resolve(rpath.parent, req["faceGraph"]))
    # a party's peers default to every other party in the world
    for p in parties:
        if not p.peers:
            p.peers = {o.party_id: Peer(o.endpoint, o.role, o.asset_id)
                       for o in parties if o.party_id != p.party_id}
    return WorldConfig(parties, world_seed, req, overrides.get("anomaly", d.get("anomaly", "none")),
                       d.get("scenario1Mode", "pull"))


def with_data_dir(cfg: Config, data_dir) -> Config:
    return replace(cfg, data_dir=str(data_dir) if data_dir is not None else None)
