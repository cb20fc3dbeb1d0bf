import math
import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maasx.errors import MalformedGraph
from maasx.features import (Face, FaceGraph, FeatureInstance, PartBuilder, aggregate,
                            feature_volume, recognize_features)

import oracles
from conftest import fixture_json


def _one(graph):
    (f,) = recognize_features(graph)
    return f


def test_hole_rule():
    f = _one(PartBuilder("p", (100, 100, 50), "AlMg3").add_hole(50, 50, 10, 20).build())
    assert (f.feature_class, f.params, f.confidence) == ("Hole", {"diameter": 10.0, "depth": 20.0}, 1.0)


def test_pocket_rule():
    f = _one(PartBuilder("p", (100, 100, 50), "AlMg3").add_cavity(10, 10, 40, 20, 10, 5).build())
    assert f.feature_class == "Pocket"
    assert f.params == {"length": 40.0, "width": 20.0, "depth": 10.0, "cornerRadius": 5.0}


@pytest.mark.parametrize("length, width, cls, conf", [
    (30, 8, "Slot", 1.0),       # ratio 3.75
    (30, 10, "Slot", 1.0),      # ratio exactly 3
    (27, 10, "Slot", 0.7),      # ambiguity band
    (25, 10, "Slot", 0.7),      # band lower edge
    (24, 10, "Pocket", 1.0),
])
def test_ratio_rules(length, width, cls, conf):
    f = _one(PartBuilder("p", (100, 100, 50), "AlMg3").add_cavity(10, 10, length, width, 5).build())
    assert (f.feature_class, f.confidence) == (cls, conf)


def test_cavity_orientation_does_not_matter():
    # long side along Y: the rule still sees 30 x 8
    f = _one(PartBuilder("p", (100, 100, 50), "AlMg3").add_cavity(10, 10, 8, 30, 5).build())
    assert f.params == {"length": 30.0, "width": 8.0, "depth": 5.0}


def test_dangling_adjacency():
    g = PartBuilder("p", (100, 100, 50), "AlMg3").add_hole(50, 50, 10, 20).build()
    g.adjacency.append(("F001", "F999"))
    with pytest.raises(MalformedGraph):
        recognize_features(g)


def test_unmatched_faces_are_ignored():
    g = PartBuilder("p", (100, 100, 50), "AlMg3").build()
    g.faces.append(Face("X1", "planar", {"normal": "+Z", "bbox": [[1, 1, 20], [5, 5, 20]]}))
    assert recognize_features(g) == []


def test_fixture_part():
    feats = recognize_features(FaceGraph.from_dict(fixture_json("part_bracket.json")))
    counts = {}
    for f in feats:
        counts[f.feature_class] = counts.get(f.feature_class, 0) + 1
    assert counts == {"Hole": 2, "Pocket": 1, "Slot": 1}
    assert [f.feature_id for f in feats] == sorted(f.feature_id for f in feats)


# volumes

def test_volume_examples():
    assert feature_volume(FeatureInstance("h", "Hole", {"diameter": 10.0, "depth": 20.0})) == \
        pytest.approx(1570.796, abs=5e-4)
    pocket = FeatureInstance("p", "Pocket", {"length": 40.0, "width": 20.0, "depth": 10.0,
                                             "cornerRadius": 5.0})
    assert feature_volume(pocket) == pytest.approx(7785.40, abs=5e-3)
    slot = FeatureInstance("s", "Slot", {"length": 30.0, "width": 8.0, "depth": 5.0})
    assert feature_volume(slot) == pytest.approx(1131.33, abs=5e-3)


@given(st.floats(0.5, 50), st.floats(0.5, 50), st.floats(0.5, 50), st.floats(0, 1))
def test_volumes_match_closed_forms(a, b, depth, t):
    L, W = max(a, b), min(a, b)
    r = t * W / 2
    for f in (FeatureInstance("h", "Hole", {"diameter": a, "depth": depth}),
              FeatureInstance("p", "Pocket", {"length": L, "width": W, "depth": depth, "cornerRadius": r}),
              FeatureInstance("s", "Slot", {"length": L, "width": W, "depth": depth})):
        assert feature_volume(f) == pytest.approx(oracles.volume(f.feature_class, f.params), rel=1e-12)


# aggregates

def test_empty_aggregate():
    agg = aggregate([])
    assert (agg.counts_per_class, agg.total_removal_volume) == ({}, 0.0)
    assert agg.min_tool_diameter is None and agg.mean_confidence is None


def test_min_tool_diameter():
    feats = [FeatureInstance("h", "Hole", {"diameter": 10.0, "depth": 5.0}),
             FeatureInstance("p", "Pocket", {"length": 40.0, "width": 20.0, "depth": 5.0, "cornerRadius": 5.0}),
             FeatureInstance("s", "Slot", {"length": 30.0, "width": 8.0, "depth": 5.0}, confidence=0.7)]
    agg = aggregate(feats)
    assert agg.min_tool_diameter == 8.0
    assert agg.counts_per_class == {"Hole": 1, "Pocket": 1, "Slot": 1}
    assert agg.mean_confidence == pytest.approx(0.9)
    assert agg.total_removal_volume == pytest.approx(math.fsum(map(feature_volume, feats)), rel=1e-9)


_cuts = st.lists(st.tuples(st.sampled_from(["hole", "cavity"]), st.integers(2, 30),
                           st.integers(2, 30), st.integers(1, 20)), min_size=1, max_size=5)


def _part(cuts, s=1.0):
    b = PartBuilder("p", (500 * s, 100 * s, 40 * s), "AlMg3")
    for i, (kind, a, c, depth) in enumerate(cuts):
        x = 10 + 95 * i
        if kind == "hole":
            b.add_hole((x + 40) * s, 50 * s, a * s, depth * s)
        else:
            b.add_cavity(x * s, 10 * s, (a + c) * s, c * s, depth * s, corner_radius=c * s / 4)
    return b.build()


@settings(max_examples=60)
@given(_cuts)
def test_volume_additivity(cuts):
    feats = recognize_features(_part(cuts))
    assert len(feats) == len(cuts)
    total = aggregate(feats).total_removal_volume
    assert total == pytest.approx(math.fsum(feature_volume(f) for f in feats), rel=1e-9)
    assert sum(aggregate(feats).counts_per_class.values()) == len(feats)


@settings(max_examples=40)
@given(_cuts)
def test_scale_covariance(cuts):
    base = recognize_features(_part(cuts))
    for s in (0.5, 2.0, 10.0):
        scaled = recognize_features(_part(cuts, s))
        assert [f.feature_class for f in scaled] == [f.feature_class for f in base]
        for f0, f1 in zip(base, scaled):
            assert f1.removal_volume == pytest.approx(f0.removal_volume * s ** 3, rel=1e-9)


@settings(max_examples=60)
@given(_cuts, st.randoms(use_true_random=False))
def test_recognition_ignores_face_order(cuts, rnd):
    g = _part(cuts)
    faces, adjacency = list(g.faces), [tuple(reversed(p)) if rnd.random() < 0.5 else p for p in g.adjacency]
    rnd.shuffle(faces)
    rnd.shuffle(adjacency)
    assert recognize_features(replace(g, faces=faces, adjacency=adjacency)) == recognize_features(g)


@settings(max_examples=60)
@given(_cuts)
def test_face_refs_disjoint(cuts):
    seen = set()
    for f in recognize_features(_part(cuts)):
        assert not seen & set(f.face_refs)
        seen |= set(f.face_refs)


def test_face_graph_json_round_trip():
    raw = fixture_json("part_bracket.json")
    g = FaceGraph.from_dict(raw)
    assert FaceGraph.from_dict(g.to_dict()) == g
    with pytest.raises(MalformedGraph):
        FaceGraph.from_dict({"partId": "x"})


def test_builder_graphs_are_reproducible():
    rng = random.Random(3)
    cuts = [("hole", rng.randint(2, 9), 3, 5), ("cavity", 10, 5, 4)]
    assert _part(cuts) == _part(cuts)
