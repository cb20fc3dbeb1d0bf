"""Signed bearer tokens: ``base64url(claims JSON) "." base64url(HMAC-SHA256)``."""

import base64
import hashlib
import hmac
import json
from dataclasses import dataclass
from typing import Tuple

from ..aas.serialization import canonical_json
from ..errors import ExpiredToken, SignatureInvalid

ROLES = ("buyer", "supplier", "platform")


def _b64(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _unb64(text: str) -> bytes:
    return base64.urlsafe_b64decode((text + "=" * (-len(text) % 4)).encode("ascii"))


@dataclass(frozen=True)
class AccessToken:
    subject: str
    role: str
    datasets: Tuple[str, ...]
    expiry: int

    def claims(self):
        return {"sub": self.subject, "role": self.role, "datasets": list(self.datasets),
                "exp": int(self.expiry)}


def _key(secret):
    return secret.encode("utf-8") if isinstance(secret, str) else bytes(secret)


def sign(token: AccessToken, secret) -> str:
    payload = canonical_json(token.claims())
    mac = hmac.new(_key(secret), payload, hashlib.sha256).digest()
    return f"{_b64(payload)}.{_b64(mac)}"


def verify(wire: str, secret, now: int) -> AccessToken:
    """Check signature then expiry; never trusts claims before the MAC matches."""
    try:
        head, mac_text = wire.split(".")
        payload, mac = _unb64(head), _unb64(mac_text)
    except (ValueError, UnicodeError) as exc:
        raise SignatureInvalid("malformed token") from exc
    expected = hmac.new(_key(secret), payload, hashlib.sha256).digest()
    if not hmac.compare_digest(mac, expected):
        raise SignatureInvalid("token signature does not verify")
    try:
        c = json.loads(payload)
        tok = AccessToken(c["sub"], c["role"], tuple(c["datasets"]), int(c["exp"]))
    except (ValueError, KeyError, TypeError) as exc:
        raise SignatureInvalid("malformed token claims") from exc
    if now >= tok.expiry:
        raise ExpiredToken(f"token expired at {tok.expiry}")
    return tok
