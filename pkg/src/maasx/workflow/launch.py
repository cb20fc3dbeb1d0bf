"""Start every party of a world as its own ``maasx serve`` process.

Used by the transport-equivalence tests and the demos.  The fixture world is
copied to a scratch directory and its endpoints are rewritten to free ports,
with one data directory per party.
"""

from __future__ import annotations

import json
import os
import shutil
import socket
import subprocess
import sys
import time
from contextlib import contextmanager
from importlib.resources import files
from pathlib import Path

from ..errors import TransportError


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def prepare_world(dest, source=None):
    """Copy a world (default: the fixtures) to `dest` with fresh ports and data dirs."""
    src = Path(source).parent if source else Path(str(files("maasx.fixtures")))
    dest = Path(dest)
    shutil.copytree(src, dest, dirs_exist_ok=True, ignore=shutil.ignore_patterns("*.py", "__pycache__"))
    world_path = dest / (Path(source).name if source else "world.json")
    world = json.loads(world_path.read_text())
    for entry in world["parties"]:
        p = dest / entry
        d = json.loads(p.read_text())
        port = free_port()
        d["endpoint"] = f"http://127.0.0.1:{port}"
        d["listen"] = f"127.0.0.1:{port}"
        d["dataDir"] = f"data/{d['partyId']}"
        p.write_text(json.dumps(d, indent=2, sort_keys=True))
    return world_path


@contextmanager
def served(world_path, timeout=30.0):
    """Run one ``serve`` process per party; yields ``{partyId: process}``."""
    world = json.loads(Path(world_path).read_text())
    procs = {}
    env = dict(os.environ)
    try:
        for entry in world["parties"]:
            pid = json.loads((Path(world_path).parent / entry).read_text())["partyId"]
            procs[pid] = subprocess.Popen(
                [sys.executable, "-m", "maasx", "serve", "--config", str(world_path), "--party", pid],
                stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True, env=env)
        deadline = time.monotonic() + timeout
        for pid, proc in procs.items():
            line = proc.stdout.readline()
            if not line.startswith("ready"):
                raise TransportError(f"{pid} did not start: {line!r} {proc.stderr.read()}")
            if time.monotonic() > deadline:
                raise TransportError("services did not start in time")
        yield procs
    finally:
        for proc in procs.values():
            proc.terminate()
        for proc in procs.values():
            try:
                proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                proc.kill()
            for stream in (proc.stdout, proc.stderr):
                if stream is not None:
                    stream.close()
