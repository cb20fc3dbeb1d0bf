"""Run the bundled marketplace once in one process and print what happened.

    python demos/marketplace_in_process.py [--seed 42] [--anomaly spikes]
"""

import argparse
from collections import Counter

from maasx.config import load_world
from maasx.cli import default_world_path
from maasx.workflow import deploy_in_process, run_e2e


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--anomaly", choices=["none", "spikes", "drift"], default="none")
    args = ap.parse_args()

    world = load_world(default_world_path(), seed=args.seed)
    dep = deploy_in_process(world)
    out = run_e2e(dep, anomaly=args.anomaly)

    print("suppliers with a capability description:", ", ".join(out["scenario1"]["suppliers"]))
    for offer in out["scenario2"]["offers"]:
        print(f"  offer {offer['offerId']}: {offer['totalMicro'] / 1e6:.6f}")
    s3 = out["scenario3"]
    print("order", s3["order"]["orderId"], "->", s3["order"]["state"])
    for seg in s3["verdict"]["segments"]:
        print(f"  {seg['segmentId']}: {'pass' if seg['passed'] else 'FAIL'}")
    calls = Counter(e["path"].split("/")[1] for e in dep.trace.events)
    print("gate calls by first path segment:", dict(sorted(calls.items())))


if __name__ == "__main__":
    main()
