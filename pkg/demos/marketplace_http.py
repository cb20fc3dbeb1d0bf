"""Start every party as its own ``maasx serve`` process and drive them over HTTP.

    python demos/marketplace_http.py
"""

import tempfile
from pathlib import Path

from maasx.config import load_world
from maasx.workflow import connect_http, run_e2e, submodel_files
from maasx.workflow.launch import prepare_world, served


def main():
    with tempfile.TemporaryDirectory() as tmp:
        path = prepare_world(Path(tmp) / "world")
        world = load_world(path)
        with served(path) as procs:
            print("serving:", ", ".join(f"{p.party_id}@{p.endpoint}" for p in world.parties))
            dep = connect_http(world)
            out = run_e2e(dep)
            assert len(procs) == len(world.parties)
        print("order state:", out["scenario3"]["order"]["state"])
        print("HTTP calls made by this driver:", len(dep.trace.events))
        for pid, files in submodel_files(dep).items():
            print(f"  {pid}: {len(files)} submodels on disk")


if __name__ == "__main__":
    main()
