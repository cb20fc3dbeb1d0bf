"""Pinned template catalog and structural validation of submodel instances."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Tuple

from ..aas.model import Collection, Property, SubmodelInstance, _coerce, iter_properties
from ..errors import InvalidElement

SEMANTIC_BASE = "https://maasx.example/idta/"

ORDER_STATES = ("PLACED", "CONFIRMED", "IN_PRODUCTION", "QUALITY_CHECK", "COMPLETED",
                "FAILED_QUALITY")


@dataclass(frozen=True)
class TemplateId:
    name: str
    version: str
    semantic_id: str
    title: str
    required: Tuple[Tuple[str, str, str], ...] = ()   # (path, kind, valueType or "")

    @property
    def label(self):
        return f"{self.name} {self.version}"


def _template(name, version, title, required):
    major, minor = version.split(".")
    return TemplateId(name, version, f"{SEMANTIC_BASE}{name}/{major}/{minor}", title,
                      tuple(required))


DIGITAL_NAMEPLATE = _template("DigitalNameplate", "3.0", "Digital Nameplate for Industrial Equipment", [
    ("ManufacturerName", "Property", "string"),
    ("ManufacturerProductDesignation", "Property", "string"),
])
CAPABILITY_DESCRIPTION = _template("CapabilityDescription", "1.0", "Capability Description", [
    ("Capabilities", "Collection", ""),
])
PURCHASE_ORDER = _template("PurchaseOrder", "1.0", "Purchase Order", [
    ("OrderId", "Property", "string"),
    ("BuyerId", "Property", "string"),
    ("Status", "Property", "string"),
    ("Lines", "Collection", ""),
])
QUALITY_CONTROL = _template("QualityControlForMachining", "1.0", "Quality Control for Machining", [
    ("Requirements", "Collection", ""),
    ("Results", "Collection", ""),
])
HANDOVER_DOCUMENTATION = _template("HandoverDocumentation", "2.0", "Handover Documentation", [
    ("Documents", "Collection", ""),
])
TECHNICAL_DATA = _template("TechnicalData", "2.0",
                           "Generic Frame for Technical Data for Industrial Equipment in Manufacturing", [
    ("GeneralInformation", "Collection", ""),
])

CATALOG = (DIGITAL_NAMEPLATE, CAPABILITY_DESCRIPTION, PURCHASE_ORDER, QUALITY_CONTROL,
           HANDOVER_DOCUMENTATION, TECHNICAL_DATA)
BY_NAME = {t.name: t for t in CATALOG}
BY_SEMANTIC_ID = {t.semantic_id: t for t in CATALOG}


def template_for(semantic_id):
    """Catalog entry for a semantic id, or None for an unknown template."""
    return BY_SEMANTIC_ID.get(semantic_id)


@dataclass(frozen=True)
class Violation:
    path: str
    rule: str
    message: str


@dataclass
class ValidationReport:
    template: str
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {"template": self.template, "ok": self.ok,
                "violations": [{"path": v.path, "rule": v.rule, "message": v.message}
                               for v in self.violations]}


def validate(sm: SubmodelInstance, template: TemplateId) -> ValidationReport:
    report = ValidationReport(template.label)
    bad = report.violations.append
    if sm.semantic_id != template.semantic_id:
        bad(Violation("semanticId", "semanticId", "semanticId mismatch"))
    for path, kind, value_type in template.required:
        node = sm.element(path)
        if node is None:
            bad(Violation(path, "required", f"missing required element {path}"))
        elif node.kind != kind:
            bad(Violation(path, "kind", f"expected {kind}, found {node.kind}"))
        elif kind == "Property" and node.value_type != value_type:
            bad(Violation(path, "valueType", f"expected {value_type}, found {node.value_type}"))
    for path, prop in iter_properties(sm.elements):
        try:
            _coerce(prop.value_type, prop.value)
        except InvalidElement as exc:
            bad(Violation(path, "valueType", str(exc)))
    if template is PURCHASE_ORDER:
        _check_purchase_order(sm, bad)
    return report


def validate_any(sm: SubmodelInstance) -> ValidationReport:
    template = template_for(sm.semantic_id)
    if template is None:
        return ValidationReport("unknown", [Violation("semanticId", "catalog",
                                                      f"unknown template {sm.semantic_id}")])
    return validate(sm, template)


def _check_purchase_order(sm, bad):
    status = sm.element("Status")
    if isinstance(status, Property) and status.value not in ORDER_STATES:
        bad(Violation("Status", "enum", f"unknown order status {status.value!r}"))
    lines = sm.element("Lines")
    if isinstance(lines, Collection):
        if not lines.children:
            bad(Violation("Lines", "cardinality", "an order needs at least one line"))
        for line in lines.children:
            q = line.child("Quantity") if isinstance(line, Collection) else None
            if not isinstance(q, Property) or q.value_type != "integer" or q.value < 1:
                bad(Violation(f"Lines.{line.id_short}.Quantity", "range", "quantity must be >= 1"))


def catalog_document():
    return [{"name": t.name, "version": t.version, "semanticId": t.semantic_id, "title": t.title,
             "requiredPaths": [{"path": p, "kind": k, "valueType": v or None}
                               for p, k, v in t.required]}
            for t in CATALOG]


def export_catalog(path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(catalog_document(), fh, indent=2, ensure_ascii=False)
        fh.write("\n")
