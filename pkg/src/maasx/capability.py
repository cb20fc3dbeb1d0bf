"""Capability modeler and capability-based supplier matchmaking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping

from .errors import BadRequest, EmptyHistory

CAPABILITY_BASE = "https://maasx.example/capability/"
DRILLING = CAPABILITY_BASE + "Drilling"
MILLING = CAPABILITY_BASE + "Milling"
SLOTTING = CAPABILITY_BASE + "Slotting"

DEFAULT_CLASS_MAP = {"Hole": DRILLING, "Pocket": MILLING, "Slot": SLOTTING}

NUMERIC_UNITS = {
    "diameter": "mm",
    "depth": "mm",
    "length": "mm",
    "width": "mm",
    "cornerRadius": "mm",
    "partLength": "mm",
    "partWidth": "mm",
    "partHeight": "mm",
    "removalVolume": "mm3",
}
SET_NAMES = ("material",)


@dataclass(frozen=True)
class Interval:
    min: float
    max: float
    unit: str = "mm"

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or self.min > self.max:
            raise ValueError(f"invalid interval [{self.min}, {self.max}]")

    def contains(self, v):
        return self.min <= v <= self.max

    def slack(self, v):
        half = (self.max - self.min) / 2.0
        if half == 0.0:
            return 0.0
        return min(1.0, min(v - self.min, self.max - v) / half)


def _check_names(numeric, sets):
    for name in numeric:
        if name not in NUMERIC_UNITS:
            raise BadRequest(f"unknown numeric constraint {name!r}")
    for name in sets:
        if name not in SET_NAMES:
            raise BadRequest(f"unknown set constraint {name!r}")


@dataclass
class CapabilityEntry:
    capability_id: str
    numeric: Dict[str, Interval] = field(default_factory=dict)
    sets: Dict[str, FrozenSet[str]] = field(default_factory=dict)

    def __post_init__(self):
        _check_names(self.numeric, self.sets)
        self.sets = {k: frozenset(v) for k, v in self.sets.items()}


@dataclass
class CapabilityProfile:
    entries: List[CapabilityEntry] = field(default_factory=list)

    def __post_init__(self):
        ids = [e.capability_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise BadRequest("capabilityIds must be unique within a profile")

    def get(self, capability_id):
        for e in self.entries:
            if e.capability_id == capability_id:
                return e
        return None


@dataclass
class RequiredEntry:
    capability_id: str
    numeric: Dict[str, float] = field(default_factory=dict)
    sets: Dict[str, FrozenSet[str]] = field(default_factory=dict)

    def __post_init__(self):
        _check_names(self.numeric, self.sets)
        self.sets = {k: frozenset(v) for k, v in self.sets.items()}


@dataclass
class RequiredCapabilities:
    entries: List[RequiredEntry] = field(default_factory=list)


@dataclass
class MatchResult:
    supplier_id: str
    eligible: bool
    score: float
    per_entry_slack: list


@dataclass
class FeatureRecord:
    """One historical feature: class, numeric parameters, optional material."""

    feature_class: str
    params: Dict[str, float]
    material: str = None

    @classmethod
    def from_dict(cls, d):
        return cls(d["featureClass"], {k: float(v) for k, v in d["params"].items()},
                   d.get("material"))


def derive_capabilities(history, class_map=DEFAULT_CLASS_MAP) -> CapabilityProfile:
    """Envelope the observed parameters per feature class into a profile.

    Entries are ordered by capability id so the result does not depend on the
    order of `history`.
    """
    if not history:
        raise EmptyHistory("capability history is empty")
    lows, highs, materials = {}, {}, {}
    for rec in history:
        try:
            cap = class_map[rec.feature_class]
        except KeyError:
            raise BadRequest(f"no capability mapped for feature class {rec.feature_class!r}") from None
        lo, hi = lows.setdefault(cap, {}), highs.setdefault(cap, {})
        mats = materials.setdefault(cap, set())
        for name, v in rec.params.items():
            if name not in NUMERIC_UNITS:
                continue
            lo[name] = min(lo.get(name, v), v)
            hi[name] = max(hi.get(name, v), v)
        if rec.material:
            mats.add(rec.material)
    entries = []
    for cap in sorted(lows):
        numeric = {n: Interval(lows[cap][n], highs[cap][n], NUMERIC_UNITS[n])
                   for n in sorted(lows[cap])}
        sets = {"material": frozenset(materials[cap])} if materials[cap] else {}
        entries.append(CapabilityEntry(cap, numeric, sets))
    return CapabilityProfile(entries)


def requirement_from_record(rec: FeatureRecord, class_map=DEFAULT_CLASS_MAP) -> RequiredCapabilities:
    numeric = {k: v for k, v in rec.params.items() if k in NUMERIC_UNITS}
    sets = {"material": frozenset([rec.material])} if rec.material else {}
    return RequiredCapabilities([RequiredEntry(class_map[rec.feature_class], numeric, sets)])


def _match_one(req: RequiredCapabilities, profile: CapabilityProfile):
    slacks, per_entry = [], []
    for r in req.entries:
        offered = profile.get(r.capability_id)
        if offered is None:
            return None
        entry_slack = {}
        for name, v in r.numeric.items():
            interval = offered.numeric.get(name)
            if interval is None:
                # undeclared constraint: the supplier states no limit
                entry_slack[name] = 1.0
            elif interval.contains(v):
                entry_slack[name] = interval.slack(v)
            else:
                return None
        for name, wanted in r.sets.items():
            have = offered.sets.get(name)
            if have is not None and not wanted <= have:
                return None
        slacks.extend(entry_slack.values())
        per_entry.append({"capabilityId": r.capability_id, "slack": entry_slack})
    score = math.fsum(slacks) / len(slacks) if slacks else 0.0
    return score, per_entry


def match_suppliers(req: RequiredCapabilities,
                    profiles: Mapping[str, CapabilityProfile]) -> List[MatchResult]:
    """Eligible suppliers ranked by mean relative slack, ties by supplier id."""
    results = []
    for supplier_id, profile in profiles.items():
        m = _match_one(req, profile)
        if m is not None:
            results.append(MatchResult(supplier_id, True, m[0], m[1]))
    results.sort(key=lambda r: (-r.score, r.supplier_id))
    return results


def requirements_from_features(features, stock=None, material=None,
                               class_map=DEFAULT_CLASS_MAP) -> RequiredCapabilities:
    """Per-class maxima of each feature parameter, plus stock dims and material."""
    maxima = {}
    for f in features:
        cap = class_map[f.feature_class]
        m = maxima.setdefault(cap, {})
        for name, v in f.params.items():
            m[name] = max(m.get(name, v), v)
    entries = []
    for cap in sorted(maxima):
        numeric = dict(sorted(maxima[cap].items()))
        if stock is not None:
            numeric.update(partLength=stock[0], partWidth=stock[1], partHeight=stock[2])
        sets = {"material": frozenset([material])} if material else {}
        entries.append(RequiredEntry(cap, numeric, sets))
    return RequiredCapabilities(entries)
