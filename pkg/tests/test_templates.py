import json
from dataclasses import replace
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maasx.aas import Property, canonical_serialize, deserialize
from maasx.capability import MILLING, CapabilityEntry, CapabilityProfile, Interval
from maasx.errors import DanglingResult, EmptyProfile, InvalidOrder
from maasx.features import FeatureInstance, PartBuilder, recognize_features
from maasx.planning import MachineRecord, Tool
from maasx.templates import (CAPABILITY_DESCRIPTION, CATALOG, DIGITAL_NAMEPLATE,
                             HANDOVER_DOCUMENTATION, PURCHASE_ORDER, QUALITY_CONTROL,
                             TECHNICAL_DATA, OrderDraft, OrderLine, QualityRequirement,
                             QualityResult, build_capability_description, build_digital_nameplate,
                             build_handover_documentation, build_machine_technical_data,
                             build_purchase_order, build_quality_report, build_technical_data,
                             catalog_document, parse_capability_description,
                             parse_machine_technical_data, parse_purchase_order,
                             parse_quality_report, parse_technical_data, template_for, validate)

DOCS = Path(__file__).resolve().parent.parent / "docs"


def test_pinned_versions():
    versions = {t.name: t.version for t in CATALOG}
    assert versions == {"DigitalNameplate": "3.0", "CapabilityDescription": "1.0",
                        "PurchaseOrder": "1.0", "QualityControlForMachining": "1.0",
                        "HandoverDocumentation": "2.0", "TechnicalData": "2.0"}
    assert CAPABILITY_DESCRIPTION.semantic_id == "https://maasx.example/idta/CapabilityDescription/1/0"
    assert CAPABILITY_DESCRIPTION.label == "CapabilityDescription 1.0"


def test_exported_catalog_in_sync():
    assert json.loads((DOCS / "templates.json").read_text()) == catalog_document()


# capability description

def _milling_profile():
    return CapabilityProfile([CapabilityEntry(MILLING, {"length": Interval(0, 1000)},
                                              {"material": {"Al", "Steel"}})])


def test_capability_description_structure():
    sm = build_capability_description(_milling_profile())
    caps = sm.element("Capabilities").children
    assert len(caps) == 1
    constraints = [c for c in caps[0].children if c.id_short != "CapabilityId"]
    assert len(constraints) == 2
    assert validate(sm, CAPABILITY_DESCRIPTION).ok


def test_empty_profile():
    with pytest.raises(EmptyProfile):
        build_capability_description(CapabilityProfile([]))


def test_wrong_semantic_id():
    sm = replace(build_capability_description(_milling_profile()),
                 semantic_id="https://maasx.example/idta/CapabilityDescription/2/0")
    report = validate(sm, CAPABILITY_DESCRIPTION)
    assert not report.ok
    assert any(v.message == "semanticId mismatch" for v in report.violations)


_bounds = st.tuples(st.floats(0, 500, allow_nan=False), st.floats(0, 500, allow_nan=False)).map(sorted)
_entry = st.builds(
    lambda cap, nums, mats: CapabilityEntry(cap, {k: Interval(*v) for k, v in nums.items()},
                                            {"material": mats} if mats else {}),
    st.sampled_from(["https://maasx.example/capability/Drilling",
                     "https://maasx.example/capability/Milling",
                     "https://maasx.example/capability/Slotting"]),
    st.dictionaries(st.sampled_from(["diameter", "depth", "length", "width", "cornerRadius"]),
                    _bounds, max_size=4),
    st.frozensets(st.sampled_from(["AlMg3", "S235", "POM", "Ti6Al4V"]), max_size=3))
_profiles = st.lists(_entry, min_size=1, max_size=3, unique_by=lambda e: e.capability_id).map(CapabilityProfile)


@settings(max_examples=200)
@given(_profiles)
def test_capability_round_trip(profile):
    sm = build_capability_description(profile)
    assert validate(sm, CAPABILITY_DESCRIPTION).ok
    assert parse_capability_description(sm) == profile
    assert parse_capability_description(deserialize(canonical_serialize(sm))) == profile


# purchase order

def _order(qty=5, lines=1):
    return OrderDraft("ORD-1", "buyer-1",
                      [OrderLine(f"part-{i}", qty, "2026-03-31") for i in range(lines)],
                      "urn:maasx:aas:part:x")


def test_purchase_order_basics():
    sm = build_purchase_order(_order())
    assert len(sm.element("Lines").children) == 1
    assert sm.value("Status") == "PLACED"
    assert parse_purchase_order(sm) == _order()


@pytest.mark.parametrize("draft", [_order(qty=0), _order(lines=0), _order(qty=True)])
def test_invalid_orders(draft):
    with pytest.raises(InvalidOrder):
        build_purchase_order(draft)


def test_missing_status_is_reported_at_its_path():
    sm = build_purchase_order(_order())
    stripped = replace(sm, elements=tuple(e for e in sm.elements if e.id_short != "Status"))
    report = validate(stripped, PURCHASE_ORDER)
    assert [v.path for v in report.violations] == ["Status"]


_drafts = st.builds(
    OrderDraft,
    st.from_regex(r"ORD-[0-9]{4}", fullmatch=True),
    st.sampled_from(["buyer-1", "buyer-2"]),
    st.lists(st.builds(OrderLine, st.sampled_from(["bracket", "flange", "shaft"]),
                       st.integers(1, 10_000), st.sampled_from(["2026-03-31", "2026-12-01"])),
             min_size=1, max_size=4),
    st.one_of(st.none(), st.just("urn:maasx:aas:part:bracket")))


@settings(max_examples=200)
@given(_drafts)
def test_purchase_order_round_trip(draft):
    sm = build_purchase_order(draft)
    assert validate(sm, PURCHASE_ORDER).ok
    assert parse_purchase_order(sm) == draft


# quality control

def _reqs():
    return [QualityRequirement("PMI-01", "Diameter", 8.0, -0.01, 0.02, feature_ref="Hole_F001"),
            QualityRequirement("PMI-02", "Depth", 10.0, -0.05, 0.05)]


def test_quality_report_sizes():
    res = [QualityResult("PMI-01", "SEG01", True, {"skewness": 0.01}),
           QualityResult("PMI-02", "SEG02", False, {"skewness": 0.9}, "too skewed")]
    sm = build_quality_report(_reqs(), res)
    assert len(sm.element("Requirements").children) == 2
    assert len(sm.element("Results").children) == 2
    assert parse_quality_report(sm) == (_reqs(), res)


def test_dangling_result():
    with pytest.raises(DanglingResult):
        build_quality_report(_reqs(), [QualityResult("PMI-99", "SEG01", True)])


def test_pre_production_plan_is_valid():
    sm = build_quality_report(_reqs(), [])
    assert validate(sm, QUALITY_CONTROL).ok
    assert sm.element("Results").children == ()


_reqs_st = st.lists(st.builds(QualityRequirement, st.sampled_from(["R1", "R2", "R3", "R4"]),
                              st.sampled_from(["Diameter", "Depth", "Flatness"]),
                              st.floats(0, 100), st.floats(-1, 0), st.floats(0, 1),
                              st.sampled_from(["mm", "um"]),
                              st.one_of(st.none(), st.sampled_from(["Hole_F001", "Slot_F010"]))),
                    max_size=4, unique_by=lambda r: r.requirement_id)


@settings(max_examples=200)
@given(_reqs_st, st.data())
def test_quality_round_trip(reqs, data):
    results = []
    if reqs:
        n = data.draw(st.integers(0, 4))
        for i in range(n):
            rid = data.draw(st.sampled_from([r.requirement_id for r in reqs]))
            meas = data.draw(st.dictionaries(st.sampled_from(["mean", "skewness", "stdev"]),
                                             st.floats(-5, 5), max_size=3))
            results.append(QualityResult(rid, f"SEG{i + 1:02d}", data.draw(st.booleans()), meas,
                                         data.draw(st.sampled_from(["", "bound exceeded"]))))
    sm = build_quality_report(reqs, results)
    assert validate(sm, QUALITY_CONTROL).ok
    assert parse_quality_report(sm) == (reqs, results)


# the carriers

@settings(max_examples=200)
@given(st.text(min_size=1, max_size=30), st.text(min_size=1, max_size=30),
       st.one_of(st.none(), st.text(max_size=10)))
def test_nameplate_valid(name, designation, serial):
    sm = build_digital_nameplate("urn:maasx:sm:np", name, designation, serial)
    assert validate(sm, DIGITAL_NAMEPLATE).ok
    assert sm.value("ManufacturerName") == name


@settings(max_examples=200)
@given(st.lists(st.tuples(st.sampled_from(["D1", "D2", "D3"]), st.text(max_size=20),
                          st.sampled_from(["CAMProgram", "Certificate"])),
                max_size=3, unique_by=lambda t: t[0]))
def test_handover_valid(docs):
    sm = build_handover_documentation([(d, t, c, (Property("Note", "string", t),))
                                       for d, t, c in docs], "urn:maasx:sm:hd")
    assert validate(sm, HANDOVER_DOCUMENTATION).ok
    assert len(sm.element("Documents").children) == len(docs)


_machines = st.builds(
    MachineRecord, st.sampled_from(["M1", "M2"]),
    st.frozensets(st.sampled_from(["Hole", "Pocket", "Slot"]), min_size=1),
    st.floats(1, 500),
    st.lists(st.builds(Tool, st.sampled_from(["T1", "T2", "T3"]),
                       st.sampled_from(["drill", "endmill", "slotmill", "center_drill"]),
                       st.floats(0.5, 40)), max_size=3, unique_by=lambda t: t.tool_id).map(tuple))


@settings(max_examples=200)
@given(_machines)
def test_machine_technical_data_round_trip(machine):
    sm = build_machine_technical_data(machine)
    assert validate(sm, TECHNICAL_DATA).ok
    assert parse_machine_technical_data(sm) == machine


@settings(max_examples=200)
@given(st.lists(st.tuples(st.sampled_from(["hole", "cavity"]), st.integers(2, 30),
                          st.integers(2, 30), st.integers(1, 9)), max_size=4))
def test_technical_data_one_collection_per_feature(cuts):
    b = PartBuilder("P1", (400, 400, 50), "AlMg3")
    for i, (kind, a, c, depth) in enumerate(cuts):
        x = 10 + 90 * i
        if kind == "hole":
            b.add_hole(x + 20, 50, a, depth)
        else:
            b.add_cavity(x, 20, a + c, c, depth, corner_radius=0.5)
    feats = recognize_features(b.build())
    sm = build_technical_data("P1", (400, 400, 50), "AlMg3", feats)
    assert validate(sm, TECHNICAL_DATA).ok
    assert len(sm.element("Features").children) == len(feats)
    assert sm.element("Aggregates") is not None
    _, _, _, back = parse_technical_data(sm)
    assert back == feats


def test_template_lookup():
    assert template_for(PURCHASE_ORDER.semantic_id) is PURCHASE_ORDER
    assert template_for("https://unknown.example/x") is None
    assert isinstance(FeatureInstance("Hole_F1", "Hole", {"diameter": 8.0, "depth": 20.0}).removal_volume,
                      float)
