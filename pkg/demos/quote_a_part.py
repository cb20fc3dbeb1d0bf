"""Recognise features in the fixture part and cost it on each supplier's machine park."""

from maasx.config import load_world
from maasx.errors import NoCapableMachine, NoHistoryNoFallback
from maasx.features import FaceGraph, recognize_features
from maasx.cli import default_world_path
from maasx.planning import HistoryRecord, cost_analysis


def main():
    world = load_world(default_world_path())
    features = recognize_features(FaceGraph.from_dict(world.buyer_request["faceGraph"]))
    for f in features:
        print(f"{f.feature_id:12s} {f.feature_class:8s} {f.params}")
    for party in world.parties:
        if party.role != "supplier":
            continue
        history = [HistoryRecord.from_dict(h) for h in party.history if "processTime" in h]
        try:
            cb = cost_analysis(features, party.machines, history, party.setup_cost, party.fallback_mrr)
        except (NoCapableMachine, NoHistoryNoFallback) as exc:
            print(f"{party.party_id}: declines ({type(exc).__name__})")
            continue
        print(f"{party.party_id}: total {cb.total_micro} micro, setup {cb.setup_micro}")
        for c in cb.per_feature:
            print(f"    {c.feature_id} on {c.machine_id}: {c.cost_micro}")


if __name__ == "__main__":
    main()
