"""Similarity-based cost estimation and CAM operation planning.

Money is held in integer micro-units (1 currency = 1_000_000); per-feature
costs are rounded half-up from the exact rational product, so totals are
exact sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

from .errors import BadRequest, NoCapableMachine, NoHistoryNoFallback, NoToolCandidate
from .features import CLASS_PARAMS, FeatureInstance, feature_volume, volume_of

EPSILON_MM = 0.1
MICRO = 1_000_000
TOOL_TYPES = ("drill", "endmill", "slotmill", "center_drill")
_TOL = 1e-9


@dataclass(frozen=True)
class HistoryRecord:
    feature_class: str
    params: Dict[str, float]
    process_time: float
    machine_id: str = ""

    def __post_init__(self):
        if self.feature_class not in CLASS_PARAMS:
            raise BadRequest(f"unknown feature class {self.feature_class!r}")
        if not self.process_time > 0:
            raise BadRequest("processTime must be > 0")
        missing = [p for p in CLASS_PARAMS[self.feature_class] if p not in self.params]
        if missing:
            raise BadRequest(f"history record lacks {missing}")

    @classmethod
    def from_dict(cls, d):
        return cls(d["featureClass"], {k: float(v) for k, v in d["params"].items()},
                   float(d["processTime"]), d.get("machineId", ""))

    def to_dict(self):
        return {"featureClass": self.feature_class, "params": dict(self.params),
                "processTime": self.process_time, "machineId": self.machine_id}


@dataclass(frozen=True)
class Tool:
    tool_id: str
    type: str
    diameter: float

    def __post_init__(self):
        if self.type not in TOOL_TYPES:
            raise BadRequest(f"unknown tool type {self.type!r}")
        if not self.diameter > 0:
            raise BadRequest("tool diameter must be > 0")


@dataclass(frozen=True)
class MachineRecord:
    machine_id: str
    supported_classes: FrozenSet[str]
    hourly_rate: float
    tools: Tuple[Tool, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "supported_classes", frozenset(self.supported_classes))
        object.__setattr__(self, "tools", tuple(self.tools))
        if not self.hourly_rate > 0:
            raise BadRequest("hourlyRate must be > 0")

    @classmethod
    def from_dict(cls, d):
        return cls(d["machineId"], frozenset(d["supportedClasses"]), float(d["hourlyRate"]),
                   tuple(Tool(t["toolId"], t["type"], float(t["diameter"])) for t in d["tools"]))

    def to_dict(self):
        return {"machineId": self.machine_id, "supportedClasses": sorted(self.supported_classes),
                "hourlyRate": self.hourly_rate,
                "tools": [{"toolId": t.tool_id, "type": t.type, "diameter": t.diameter}
                          for t in self.tools]}


@dataclass(frozen=True)
class FeatureCost:
    feature_id: str
    machine_id: str
    tool_id: str
    est_time: float
    cost_micro: int


@dataclass
class CostBreakdown:
    per_feature: List[FeatureCost]
    setup_micro: int
    total_micro: int

    @property
    def total(self) -> Decimal:
        return Decimal(self.total_micro) / MICRO

    def to_dict(self):
        return {
            "perFeature": [{"featureId": c.feature_id, "machineId": c.machine_id,
                            "toolId": c.tool_id, "estTime": c.est_time,
                            "costMicro": c.cost_micro} for c in self.per_feature],
            "setupMicro": self.setup_micro,
            "totalMicro": self.total_micro,
        }

    @classmethod
    def from_dict(cls, d):
        return cls([FeatureCost(c["featureId"], c["machineId"], c["toolId"], c["estTime"],
                                c["costMicro"]) for c in d["perFeature"]],
                   d["setupMicro"], d["totalMicro"])


def to_micro(amount) -> int:
    """Currency amount (str, int, float or Decimal) to micro-units, half-up."""
    return _half_up(Fraction(Decimal(str(amount))) * MICRO)


def _half_up(x: Fraction) -> int:
    if x < 0:
        return -_half_up(-x)
    return math.floor(x + Fraction(1, 2))


# estimation

def feature_distance(params_a, params_b, names):
    return math.sqrt(math.fsum(
        ((params_a[p] - params_b[p]) / max(params_a[p], params_b[p], EPSILON_MM)) ** 2
        for p in names))


def estimate_feature_time(f: FeatureInstance, history, fallback_mrr=None) -> Tuple[float, Optional[str]]:
    """Process time in seconds scaled from the nearest historical feature.

    Returns ``(seconds, machine_id_of_neighbor)``; the machine id is None when
    the fallback material-removal rate (mm^3/min per class) was used.
    """
    names = CLASS_PARAMS[f.feature_class]
    best = None
    for index, h in enumerate(history):
        if h.feature_class != f.feature_class:
            continue
        key = (feature_distance(f.params, h.params, names), h.process_time, index)
        if best is None or key < best[0]:
            best = (key, h)
    if best is not None:
        h = best[1]
        return h.process_time * (feature_volume(f) / volume_of(h.feature_class, h.params)), h.machine_id
    rate = (fallback_mrr or {}).get(f.feature_class)
    if rate is None:
        raise NoHistoryNoFallback(f"no history and no fallback rate for {f.feature_class}")
    return feature_volume(f) / rate * 60.0, None


def tool_for(machine: MachineRecord, f: FeatureInstance) -> Optional[Tool]:
    """The tool a machine would use for the feature's main operation, or None."""
    if f.feature_class == "Hole":
        d = f.params["diameter"]
        cands = [t for t in machine.tools if t.type == "drill" and abs(t.diameter - d) <= _TOL]
        return min(cands, key=lambda t: t.tool_id, default=None)
    if f.feature_class == "Slot":
        w = f.params["width"]
        cands = [t for t in machine.tools if t.type == "slotmill" and abs(t.diameter - w) <= _TOL]
        return min(cands, key=lambda t: t.tool_id, default=None)
    bound = 2.0 * f.params["cornerRadius"]
    cands = [t for t in machine.tools if t.type == "endmill" and t.diameter <= bound + _TOL]
    return min(cands, key=lambda t: (-t.diameter, t.tool_id), default=None)


def admissible(machine: MachineRecord, f: FeatureInstance) -> bool:
    return f.feature_class in machine.supported_classes and tool_for(machine, f) is not None


def cost_analysis(features, machines, history, setup_cost=0, fallback_mrr=None) -> CostBreakdown:
    """Cheapest admissible machine per feature; raises NoCapableMachine."""
    per_feature = []
    for f in features:
        est, _ = estimate_feature_time(f, history, fallback_mrr)
        best = None
        for m in machines:
            if not admissible(m, f):
                continue
            exact = Fraction(est) * Fraction(m.hourly_rate) / 3600
            key = (exact, m.machine_id)
            if best is None or key < best[0]:
                best = (key, m)
        if best is None:
            raise NoCapableMachine(f.feature_id)
        (exact, _), m = best
        per_feature.append(FeatureCost(f.feature_id, m.machine_id, tool_for(m, f).tool_id, est,
                                       _half_up(exact * MICRO)))
    setup_micro = to_micro(setup_cost)
    return CostBreakdown(per_feature, setup_micro, sum(c.cost_micro for c in per_feature) + setup_micro)


# CAM

@dataclass(frozen=True)
class CamStep:
    feature_id: str
    operation: str
    tool_id: str
    removal_volume: float


@dataclass
class CamPlan:
    machine_id: str
    steps: List[CamStep] = field(default_factory=list)
    tool_change_count: int = 0
    setup_complexity: int = 0

    @property
    def removal_volumes(self):
        return [s.removal_volume for s in self.steps]

    def to_dict(self):
        return {"machineId": self.machine_id,
                "steps": [{"featureId": s.feature_id, "operation": s.operation,
                           "toolId": s.tool_id, "removalVolume": s.removal_volume}
                          for s in self.steps],
                "toolChangeCount": self.tool_change_count,
                "setupComplexity": self.setup_complexity}


def _operations(f: FeatureInstance, machine: MachineRecord):
    main = tool_for(machine, f)
    if main is None:
        raise NoToolCandidate(f.feature_id)
    v = feature_volume(f)
    if f.feature_class == "Hole":
        centre = min((t for t in machine.tools if t.type == "center_drill"),
                     key=lambda t: t.tool_id, default=None)
        if centre is None:
            raise NoToolCandidate(f.feature_id)
        return [CamStep(f.feature_id, "center_drill", centre.tool_id, 0.0),
                CamStep(f.feature_id, "drill", main.tool_id, v)]
    if f.feature_class == "Pocket":
        return [CamStep(f.feature_id, "rough_mill", main.tool_id, v),
                CamStep(f.feature_id, "finish_mill", main.tool_id, 0.0)]
    return [CamStep(f.feature_id, "slot_mill", main.tool_id, v)]


def plan_cam(features, machine: MachineRecord) -> CamPlan:
    """Operation/tool assignment with steps grouped per tool.

    Groups are ordered by the tool's first use in feature order, so a
    center drill group always precedes the drills it prepares.
    """
    natural = [step for f in features for step in _operations(f, machine)]
    groups: Dict[str, List[CamStep]] = {}
    for step in natural:
        groups.setdefault(step.tool_id, []).append(step)
    steps = [s for group in groups.values() for s in group]
    changes = sum(1 for a, b in zip(steps, steps[1:]) if a.tool_id != b.tool_id)
    directions = {f.access_direction or "+Z" for f in features}
    return CamPlan(machine.machine_id, steps, changes, len(directions))


def select_cam_machine(features, machines) -> MachineRecord:
    """Cheapest machine able to run the whole plan (tie: machine id)."""
    ok = []
    for m in machines:
        try:
            if all(admissible(m, f) for f in features):
                plan_cam(features, m)
                ok.append(m)
        except NoToolCandidate:
            continue
    if not ok:
        raise NoCapableMachine(features[0].feature_id if features else "")
    return min(ok, key=lambda m: (m.hourly_rate, m.machine_id))
