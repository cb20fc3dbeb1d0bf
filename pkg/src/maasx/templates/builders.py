"""Builders and parsers for the submodels exchanged in the three scenarios.

Builders always produce instances that pass `validate` for their template;
parsers invert them on the typed domain (``parse(build(x)) == x``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..aas.model import Collection, Property, SubmodelInstance
from ..capability import CapabilityEntry, CapabilityProfile, Interval
from ..errors import DanglingResult, EmptyProfile, InvalidOrder
from ..features import FeatureInstance, aggregate
from .catalog import (CAPABILITY_DESCRIPTION, DIGITAL_NAMEPLATE, HANDOVER_DOCUMENTATION,
                      PURCHASE_ORDER, QUALITY_CONTROL, TECHNICAL_DATA, TemplateId)


def _sm(template: TemplateId, submodel_id, elements):
    return SubmodelInstance(submodel_id, template.name, template.semantic_id, template.version,
                            tuple(elements))


def _s(name, value):
    return Property(name, "string", value)


def _d(name, value):
    return Property(name, "double", float(value))


def _i(name, value):
    return Property(name, "integer", int(value))


def _b(name, value):
    return Property(name, "boolean", bool(value))


def _indexed(prefix, items):
    return [(f"{prefix}_{i:02d}", item) for i, item in enumerate(items)]


# Digital Nameplate

def build_digital_nameplate(submodel_id, manufacturer_name, product_designation,
                            serial_number=None) -> SubmodelInstance:
    elements = [_s("ManufacturerName", manufacturer_name),
                _s("ManufacturerProductDesignation", product_designation)]
    if serial_number is not None:
        elements.append(_s("SerialNumber", serial_number))
    return _sm(DIGITAL_NAMEPLATE, submodel_id, elements)


# Capability Description

def build_capability_description(profile: CapabilityProfile,
                                 submodel_id="urn:maasx:sm:capability") -> SubmodelInstance:
    """One collection per capability: its IRI plus one collection per constraint.

    Numeric constraints become ``{Min, Max, Unit}``; set constraints become a
    sorted list of ``Value_nn`` string properties.
    """
    if profile is None or not profile.entries:
        raise EmptyProfile("capability profile has no entries")
    caps = []
    for name, entry in _indexed("Capability", profile.entries):
        children = [Property("CapabilityId", "string", entry.capability_id,
                             semantic_id=entry.capability_id)]
        for cname in sorted(entry.numeric):
            iv = entry.numeric[cname]
            children.append(Collection(cname, (_d("Min", iv.min), _d("Max", iv.max),
                                               _s("Unit", iv.unit))))
        for cname in sorted(entry.sets):
            children.append(Collection(cname, tuple(
                _s(vname, v) for vname, v in _indexed("Value", sorted(entry.sets[cname])))))
        caps.append(Collection(name, tuple(children)))
    return _sm(CAPABILITY_DESCRIPTION, submodel_id, [Collection("Capabilities", tuple(caps))])


def parse_capability_description(sm: SubmodelInstance) -> CapabilityProfile:
    entries = []
    for cap in sm.element("Capabilities").children:
        numeric, sets = {}, {}
        for c in cap.children:
            if isinstance(c, Property):
                continue
            if c.child("Min") is not None:
                numeric[c.id_short] = Interval(c["Min"].value, c["Max"].value, c["Unit"].value)
            else:
                sets[c.id_short] = frozenset(p.value for p in c.children)
        entries.append(CapabilityEntry(cap["CapabilityId"].value, numeric, sets))
    return CapabilityProfile(entries)


# Purchase Order

@dataclass(frozen=True)
class OrderLine:
    part_ref: str
    quantity: int
    due_date: str


@dataclass
class OrderDraft:
    order_id: str
    buyer_id: str
    lines: List[OrderLine] = field(default_factory=list)
    product_aas_id: Optional[str] = None


def build_purchase_order(order: OrderDraft, submodel_id=None, status="PLACED") -> SubmodelInstance:
    if not order.order_id or not order.buyer_id:
        raise InvalidOrder("order needs orderId and buyerId")
    if not order.lines:
        raise InvalidOrder("order needs at least one line")
    for line in order.lines:
        if isinstance(line.quantity, bool) or not isinstance(line.quantity, int) or line.quantity < 1:
            raise InvalidOrder(f"quantity must be an integer >= 1, got {line.quantity!r}")
        if not line.part_ref or not line.due_date:
            raise InvalidOrder("order line needs partRef and dueDate")
    elements = [_s("OrderId", order.order_id), _s("BuyerId", order.buyer_id)]
    if order.product_aas_id is not None:
        elements.append(_s("ProductAasId", order.product_aas_id))
    elements.append(_s("Status", status))
    elements.append(Collection("Lines", tuple(
        Collection(name, (_s("PartRef", line.part_ref), _i("Quantity", line.quantity),
                          _s("DueDate", line.due_date)))
        for name, line in _indexed("Line", order.lines))))
    return _sm(PURCHASE_ORDER, submodel_id or f"urn:maasx:sm:po:{order.order_id}", elements)


def parse_purchase_order(sm: SubmodelInstance) -> OrderDraft:
    lines = [OrderLine(c["PartRef"].value, c["Quantity"].value, c["DueDate"].value)
             for c in sm.element("Lines").children]
    return OrderDraft(sm.value("OrderId"), sm.value("BuyerId"), lines, sm.value("ProductAasId"))


def purchase_order_status(sm: SubmodelInstance) -> str:
    return sm.value("Status")


def with_order_status(sm: SubmodelInstance, status) -> SubmodelInstance:
    return sm.replace_element(_s("Status", status))


# Quality Control for Machining

@dataclass(frozen=True)
class QualityRequirement:
    requirement_id: str
    characteristic: str
    nominal: float
    lower_tolerance: float
    upper_tolerance: float
    unit: str = "mm"
    feature_ref: Optional[str] = None

    @classmethod
    def from_dict(cls, d):
        return cls(d["requirementId"], d["characteristic"], float(d["nominal"]),
                   float(d["lowerTolerance"]), float(d["upperTolerance"]), d.get("unit", "mm"),
                   d.get("featureRef"))

    def to_dict(self):
        d = {"requirementId": self.requirement_id, "characteristic": self.characteristic,
             "nominal": self.nominal, "lowerTolerance": self.lower_tolerance,
             "upperTolerance": self.upper_tolerance, "unit": self.unit}
        if self.feature_ref is not None:
            d["featureRef"] = self.feature_ref
        return d


@dataclass(frozen=True)
class QualityResult:
    requirement_id: str
    result_id: str
    passed: bool
    measurements: Dict[str, float] = field(default_factory=dict)
    reason: str = ""


def build_quality_report(requirements, results, submodel_id="urn:maasx:sm:qc",
                         order_id=None, product_aas_id=None, overall=None) -> SubmodelInstance:
    """Requirements and Results collections; empty results = pre-production plan."""
    known = {r.requirement_id for r in requirements}
    for res in results:
        if res.requirement_id not in known:
            raise DanglingResult(f"result {res.result_id!r} references unknown "
                                 f"requirement {res.requirement_id!r}")
    elements = []
    if order_id is not None:
        elements.append(_s("OrderId", order_id))
    if product_aas_id is not None:
        elements.append(_s("ProductAasId", product_aas_id))
    reqs = []
    for name, r in _indexed("Requirement", requirements):
        children = [_s("RequirementId", r.requirement_id), _s("Characteristic", r.characteristic),
                    _d("Nominal", r.nominal), _d("LowerTolerance", r.lower_tolerance),
                    _d("UpperTolerance", r.upper_tolerance), _s("Unit", r.unit)]
        if r.feature_ref is not None:
            children.append(_s("FeatureRef", r.feature_ref))
        reqs.append(Collection(name, tuple(children)))
    res_elems = []
    for name, r in _indexed("Result", results):
        children = [_s("RequirementId", r.requirement_id), _s("ResultId", r.result_id),
                    _b("Passed", r.passed), _s("Reason", r.reason),
                    Collection("Measurements", tuple(_d(k, r.measurements[k])
                                                     for k in sorted(r.measurements)))]
        res_elems.append(Collection(name, tuple(children)))
    elements.append(Collection("Requirements", tuple(reqs)))
    elements.append(Collection("Results", tuple(res_elems)))
    if overall is not None:
        elements.append(_b("OverallPassed", overall))
    return _sm(QUALITY_CONTROL, submodel_id, elements)


def parse_quality_report(sm: SubmodelInstance):
    reqs = []
    for c in sm.element("Requirements").children:
        fr = c.child("FeatureRef")
        reqs.append(QualityRequirement(c["RequirementId"].value, c["Characteristic"].value,
                                       c["Nominal"].value, c["LowerTolerance"].value,
                                       c["UpperTolerance"].value, c["Unit"].value,
                                       fr.value if fr is not None else None))
    results = [QualityResult(c["RequirementId"].value, c["ResultId"].value, c["Passed"].value,
                             {p.id_short: p.value for p in c["Measurements"].children},
                             c["Reason"].value)
               for c in sm.element("Results").children]
    return reqs, results


# Handover Documentation

def build_handover_documentation(documents, submodel_id) -> SubmodelInstance:
    """`documents`: iterable of ``(document_id, title, document_class, content)``
    where `content` is a tuple of submodel elements (may be empty)."""
    docs = []
    for name, (doc_id, title, doc_class, content) in _indexed("Document", documents):
        docs.append(Collection(name, (_s("DocumentId", doc_id), _s("Title", title),
                                      _s("DocumentClass", doc_class),
                                      Collection("Content", tuple(content)))))
    return _sm(HANDOVER_DOCUMENTATION, submodel_id, [Collection("Documents", tuple(docs))])


def cam_plan_elements(plan):
    steps = tuple(
        Collection(name, (_s("FeatureId", s.feature_id), _s("Operation", s.operation),
                          _s("ToolId", s.tool_id), _d("RemovalVolume", s.removal_volume)))
        for name, s in _indexed("Step", plan.steps))
    return (_s("MachineId", plan.machine_id), Collection("Steps", steps),
            _i("ToolChangeCount", plan.tool_change_count),
            _i("SetupComplexity", plan.setup_complexity))


# Technical Data

def _feature_element(f: FeatureInstance):
    return Collection(f.feature_id, (
        _s("FeatureClass", f.feature_class),
        Collection("Parameters", tuple(_d(k, f.params[k]) for k in sorted(f.params))),
        Collection("FaceRefs", tuple(_s(n, ref) for n, ref in _indexed("Face", f.face_refs))),
        _i("FaceCount", len(f.face_refs)),
        _d("Confidence", f.confidence),
        _d("RemovalVolume", f.removal_volume),
        _s("AccessDirection", f.access_direction),
    ))


def build_technical_data(part_id, stock, material, features, submodel_id=None) -> SubmodelInstance:
    """Part technical data: general info, one collection per feature, aggregates."""
    features = list(features)
    agg = aggregate(features)
    general = Collection("GeneralInformation", (
        _s("PartId", part_id), _s("Material", material or ""),
        _d("StockLength", stock[0]), _d("StockWidth", stock[1]), _d("StockHeight", stock[2])))
    agg_children = [Collection("CountsPerClass", tuple(_i(k, v) for k, v in agg.counts_per_class.items())),
                    _i("FeatureCount", len(features)),
                    _d("TotalRemovalVolume", agg.total_removal_volume)]
    if agg.min_tool_diameter is not None:
        agg_children.append(_d("MinRequiredToolDiameter", agg.min_tool_diameter))
    if agg.mean_confidence is not None:
        agg_children.append(_d("MeanConfidence", agg.mean_confidence))
    return _sm(TECHNICAL_DATA, submodel_id or f"urn:maasx:sm:td:{part_id}", [
        general,
        Collection("Features", tuple(_feature_element(f) for f in features)),
        Collection("Aggregates", tuple(agg_children)),
    ])


def parse_technical_data(sm: SubmodelInstance):
    """Returns ``(part_id, stock, material, features)``."""
    g = sm.element("GeneralInformation")
    stock = (g["StockLength"].value, g["StockWidth"].value, g["StockHeight"].value)
    features = []
    for c in sm.element("Features").children:
        features.append(FeatureInstance(
            c.id_short, c["FeatureClass"].value,
            {p.id_short: p.value for p in c["Parameters"].children},
            tuple(p.value for p in c["FaceRefs"].children),
            c["Confidence"].value, c["RemovalVolume"].value, c["AccessDirection"].value))
    return g["PartId"].value, stock, g["Material"].value, features


def with_feature_costs(sm: SubmodelInstance, breakdown) -> SubmodelInstance:
    """Copy of a part Technical Data submodel with a Cost collection per feature."""
    costs = {c.feature_id: c for c in breakdown.per_feature}
    feats = []
    for c in sm.element("Features").children:
        fc = costs.get(c.id_short)
        children = [e for e in c.children if e.id_short != "Cost"]
        if fc is not None:
            children.append(Collection("Cost", (
                _s("MachineId", fc.machine_id), _s("ToolId", fc.tool_id),
                _d("EstimatedTime", fc.est_time), _i("CostMicro", fc.cost_micro))))
        feats.append(Collection(c.id_short, tuple(children), c.semantic_id))
    out = sm.replace_element(Collection("Features", tuple(feats)))
    return out.replace_element(Collection("CostSummary", (
        _i("SetupMicro", breakdown.setup_micro), _i("TotalMicro", breakdown.total_micro))))


def build_machine_technical_data(machine, submodel_id=None) -> SubmodelInstance:
    """Machine Technical Data: hourly rate, supported classes and tool library."""
    tools = tuple(Collection(name, (_s("ToolId", t.tool_id), _s("Type", t.type),
                                    _d("Diameter", t.diameter)))
                  for name, t in _indexed("Tool", machine.tools))
    return _sm(TECHNICAL_DATA, submodel_id or f"urn:maasx:sm:machine:{machine.machine_id}", [
        Collection("GeneralInformation", (_s("MachineId", machine.machine_id),)),
        Collection("TechnicalProperties", (
            _d("HourlyRate", machine.hourly_rate),
            Collection("SupportedClasses", tuple(_s(n, c) for n, c in _indexed(
                "Class", sorted(machine.supported_classes)))),
            Collection("Tools", tools))),
    ])


def parse_machine_technical_data(sm: SubmodelInstance):
    from ..planning import MachineRecord, Tool

    props = sm.element("TechnicalProperties")
    return MachineRecord(
        sm.value("GeneralInformation.MachineId"),
        frozenset(p.value for p in props["SupportedClasses"].children),
        props["HourlyRate"].value,
        tuple(Tool(t["ToolId"].value, t["Type"].value, t["Diameter"].value)
              for t in props["Tools"].children))
