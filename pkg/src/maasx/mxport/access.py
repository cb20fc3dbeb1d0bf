"""Access and usage control layer: token validation plus default-deny rules."""

from dataclasses import dataclass
from fnmatch import fnmatchcase
from typing import FrozenSet, Optional, Tuple

from .tokens import verify

ACTIONS = ("read", "write")


@dataclass(frozen=True)
class AccessRule:
    role: str
    resource_pattern: str
    actions: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, "actions", frozenset(self.actions))
        if not self.actions <= set(ACTIONS):
            raise ValueError(f"actions must be a subset of {ACTIONS}")

    @classmethod
    def from_dict(cls, d):
        return cls(d["role"], d["resource"], frozenset(d["actions"]))

    def to_dict(self):
        return {"role": self.role, "resource": self.resource_pattern,
                "actions": sorted(self.actions)}


@dataclass(frozen=True)
class Resource:
    """What a request touches: a dataset id and optionally its semantic id."""

    dataset_id: str
    semantic_id: Optional[str] = None

    def names(self) -> Tuple[str, ...]:
        return (self.dataset_id,) if self.semantic_id is None else (self.dataset_id, self.semantic_id)


@dataclass(frozen=True)
class Decision:
    allowed: bool
    reason: str = ""

    def __bool__(self):
        return self.allowed


ALLOW = Decision(True)


def _matches(pattern, resource: Resource):
    return any(fnmatchcase(name, pattern) for name in resource.names())


class AccessControl:
    def __init__(self, secret, rules=(), clock=None):
        self.secret = secret
        self.rules = list(rules)
        self.clock = clock

    def now(self):
        return int(self.clock.now()) if self.clock is not None else 0

    def authorize(self, token: str, resource: Resource, action: str) -> Decision:
        """Allow iff the token verifies, its dataset scope covers the resource,
        and some rule for the token's role grants `action` on it.

        Raises SignatureInvalid / ExpiredToken for bad tokens.
        """
        tok = verify(token, self.secret, self.now())
        return self.check(tok, resource, action)

    def check(self, tok, resource: Resource, action: str) -> Decision:
        if not any(_matches(p, resource) for p in tok.datasets):
            return Decision(False, "resource outside token scope")
        for rule in self.rules:
            if rule.role == tok.role and action in rule.actions and _matches(rule.resource_pattern, resource):
                return ALLOW
        return Decision(False, "no matching rule")

    def revoke(self, role, resource_pattern):
        self.rules = [r for r in self.rules
                      if not (r.role == role and r.resource_pattern == resource_pattern)]
