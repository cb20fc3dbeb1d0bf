"""Regenerate the JSON fixtures shipped in src/maasx/fixtures.

The files are committed; run this only after changing the fixture design.
"""

import json
from pathlib import Path

from maasx.features import PartBuilder, recognize_features

OUT = Path(__file__).resolve().parents[1] / "src" / "maasx" / "fixtures"
PORTS = {"platform": 18700, "buyer-1": 18701, "supplier-a": 18711, "supplier-b": 18712,
         "supplier-c": 18713}


def dump(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def part():
    b = PartBuilder("bracket-7", (120, 80, 30), "AlMg3")
    b.add_hole(20, 20, 8, 20)
    b.add_hole(20, 60, 8, 20)
    b.add_cavity(40, 15, 40, 25, 10, corner_radius=5)
    b.add_cavity(40, 55, 50, 10, 6)
    return b.build()


def record(cls, params, time, machine, material, part_dims):
    p = dict(params)
    p.update(partLength=part_dims[0], partWidth=part_dims[1], partHeight=part_dims[2])
    return {"featureClass": cls, "params": p, "processTime": time, "machineId": machine,
            "material": material}


def history_a():
    parts = [(60, 40, 20), (200, 150, 60)]
    return [
        record("Hole", {"diameter": 4, "depth": 10}, 14.0, "M-A2", "AlMg3", parts[0]),
        record("Hole", {"diameter": 12, "depth": 40}, 52.0, "M-A1", "S235", parts[1]),
        record("Hole", {"diameter": 8, "depth": 16}, 24.0, "M-A2", "AlMg3", parts[0]),
        record("Pocket", {"length": 20, "width": 10, "depth": 5, "cornerRadius": 2}, 48.0, "M-A1",
               "AlMg3", parts[0]),
        record("Pocket", {"length": 80, "width": 50, "depth": 20, "cornerRadius": 8}, 610.0, "M-A1",
               "S235", parts[1]),
        record("Slot", {"length": 20, "width": 6, "depth": 3}, 22.0, "M-A1", "AlMg3", parts[0]),
        record("Slot", {"length": 100, "width": 16, "depth": 10}, 190.0, "M-A1", "S235", parts[1]),
    ]


def history_b():
    parts = [(80, 50, 15), (160, 120, 50)]
    return [
        record("Hole", {"diameter": 5, "depth": 12}, 17.0, "M-B1", "AlMg3", parts[0]),
        record("Hole", {"diameter": 10, "depth": 30}, 40.0, "M-B1", "AlMg3", parts[1]),
        record("Pocket", {"length": 30, "width": 20, "depth": 8, "cornerRadius": 3}, 95.0, "M-B1",
               "AlMg3", parts[0]),
        record("Pocket", {"length": 60, "width": 40, "depth": 15, "cornerRadius": 6}, 380.0, "M-B1",
               "AlMg3", parts[1]),
        record("Slot", {"length": 30, "width": 8, "depth": 4}, 30.0, "M-B1", "AlMg3", parts[0]),
        record("Slot", {"length": 80, "width": 12, "depth": 8}, 120.0, "M-B1", "AlMg3", parts[1]),
    ]


def history_c():
    parts = [(50, 50, 10), (300, 200, 80)]
    return [
        record("Hole", {"diameter": 3, "depth": 6}, 9.0, "M-C1", "AlMg3", parts[0]),
        record("Hole", {"diameter": 16, "depth": 60}, 70.0, "M-C1", "S235", parts[1]),
        record("Pocket", {"length": 20, "width": 20, "depth": 4, "cornerRadius": 1}, 60.0, "M-C1",
               "AlMg3", parts[0]),
        record("Pocket", {"length": 120, "width": 90, "depth": 30, "cornerRadius": 10}, 900.0, "M-C1",
               "S235", parts[1]),
    ]


def tool(tid, ttype, d):
    return {"toolId": tid, "type": ttype, "diameter": d}


MACHINES = {
    "supplier-a": [
        {"machineId": "M-A1", "supportedClasses": ["Hole", "Pocket", "Slot"], "hourlyRate": 90.0,
         "tools": [tool("T01", "center_drill", 6), tool("T02", "drill", 8), tool("T03", "drill", 12),
                   tool("T04", "endmill", 10), tool("T05", "slotmill", 10), tool("T06", "slotmill", 6)]},
        {"machineId": "M-A2", "supportedClasses": ["Hole"], "hourlyRate": 60.0,
         "tools": [tool("T11", "center_drill", 6), tool("T12", "drill", 8), tool("T13", "drill", 4)]},
    ],
    "supplier-b": [
        {"machineId": "M-B1", "supportedClasses": ["Hole", "Pocket", "Slot"], "hourlyRate": 75.0,
         "tools": [tool("T21", "center_drill", 4), tool("T22", "drill", 8), tool("T23", "endmill", 8),
                   tool("T24", "slotmill", 10), tool("T25", "drill", 5)]},
    ],
    "supplier-c": [
        {"machineId": "M-C1", "supportedClasses": ["Hole", "Pocket"], "hourlyRate": 50.0,
         "tools": [tool("T31", "center_drill", 4), tool("T32", "drill", 6), tool("T33", "endmill", 6)]},
    ],
}

SETUP = {"supplier-a": "25.00", "supplier-b": "40.00", "supplier-c": "15.00"}
FALLBACK = {"Hole": 900.0, "Pocket": 2400.0, "Slot": 1500.0}
NAMES = {"supplier-a": "Alpha Zerspanung", "supplier-b": "Beta Machining", "supplier-c": "Gamma CNC"}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    graph = part()
    feats = {f.feature_class: f.feature_id for f in recognize_features(graph)}
    dump("part_bracket.json", graph.to_dict())
    hole_ids = sorted(f.feature_id for f in recognize_features(graph) if f.feature_class == "Hole")
    dump("buyer_request.json", {
        "faceGraph": "part_bracket.json", "quantity": 50, "dueDate": "2026-03-31",
        "pmi": [
            {"requirementId": "PMI-01", "characteristic": "Diameter", "nominal": 8.0,
             "lowerTolerance": -0.02, "upperTolerance": 0.02, "unit": "mm", "featureRef": hole_ids[0]},
            {"requirementId": "PMI-02", "characteristic": "Depth", "nominal": 10.0,
             "lowerTolerance": -0.05, "upperTolerance": 0.05, "unit": "mm", "featureRef": feats["Pocket"]},
        ]})
    signal = {"level": 1.0, "sigma": 0.05, "nSamples": 2048}
    for pid, hist in (("supplier-a", history_a()), ("supplier-b", history_b()),
                      ("supplier-c", history_c())):
        dump(f"{pid}.history.json", hist)
        dump(f"{pid}.machines.json", MACHINES[pid])
        dump(f"{pid}.json", {
            "partyId": pid, "role": "supplier", "displayName": NAMES[pid],
            "endpoint": f"http://127.0.0.1:{PORTS[pid]}", "listen": f"127.0.0.1:{PORTS[pid]}",
            "assetId": f"urn:maasx:asset:{pid}", "machines": f"{pid}.machines.json",
            "history": f"{pid}.history.json", "fallbackMrr": FALLBACK, "setupCost": SETUP[pid],
            "signal": signal, "k": 3.0, "referenceRuns": 5})
    for pid, role in (("platform", "platform"), ("buyer-1", "buyer")):
        dump(f"{pid}.json", {"partyId": pid, "role": role, "displayName": pid,
                             "endpoint": f"http://127.0.0.1:{PORTS[pid]}",
                             "listen": f"127.0.0.1:{PORTS[pid]}"})
    dump("world.json", {
        "seed": 42, "epoch": 1767225600, "sharedSecret": "fixture-shared-secret",
        "parties": ["platform.json", "buyer-1.json", "supplier-a.json", "supplier-b.json",
                    "supplier-c.json"],
        "buyerRequest": "buyer_request.json", "anomaly": "none", "scenario1Mode": "pull"})
    dump("seeds.json", {"clean": 42, "spike": 7})


if __name__ == "__main__":
    main()
