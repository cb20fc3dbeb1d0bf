"""Identifier checks and the URL-safe encoding used in gate paths."""

import base64
import re

from ..errors import InvalidIdentifier

MAX_IDENTIFIER_LENGTH = 2048
ID_SHORT_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_WHITESPACE = re.compile(r"\s")


def check_identifier(iri):
    """Return `iri` unchanged if it is a valid identifier, else raise."""
    if not isinstance(iri, str) or not iri:
        raise InvalidIdentifier("identifier must be a non-empty string")
    if len(iri) > MAX_IDENTIFIER_LENGTH:
        raise InvalidIdentifier(f"identifier longer than {MAX_IDENTIFIER_LENGTH} chars")
    if _WHITESPACE.search(iri):
        raise InvalidIdentifier(f"identifier contains whitespace: {iri!r}")
    return iri


def is_id_short(name):
    return isinstance(name, str) and ID_SHORT_PATTERN.match(name) is not None


def encode_identifier(iri: str) -> str:
    """base64url of the UTF-8 bytes, padding stripped."""
    check_identifier(iri)
    return base64.urlsafe_b64encode(iri.encode("utf-8")).rstrip(b"=").decode("ascii")


def decode_identifier(token: str) -> str:
    if not token:
        raise InvalidIdentifier("empty identifier token")
    padded = token + "=" * (-len(token) % 4)
    try:
        raw = base64.urlsafe_b64decode(padded.encode("ascii"))
        iri = raw.decode("utf-8")
    except (ValueError, UnicodeError) as exc:
        raise InvalidIdentifier(f"not a base64url identifier: {token!r}") from exc
    check_identifier(iri)
    # reject non-canonical spellings so one identifier has exactly one path
    if encode_identifier(iri) != token:
        raise InvalidIdentifier(f"non-canonical identifier token: {token!r}")
    return iri
