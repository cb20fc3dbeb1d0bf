"""Command line: ``maasx serve | scenario | modeler derive | inspect``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  A part that fails
its quality check is still a successful run; the verdict is in the output.
"""

from __future__ import annotations

import argparse
import json
import logging
import signal
import sys
import threading
from dataclasses import replace
from pathlib import Path

from .aas.serialization import canonical_serialize, deserialize
from .config import UINT64_MAX, env_overrides, load_config, load_world
from .errors import ConfigError, MaasxError

log = logging.getLogger("maasx")

SCENARIO_IDS = ("1", "2", "3", "e2e")


def _uint64(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v <= UINT64_MAX:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {v}")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="maasx", description="MaaS data-space services and scenarios")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("serve", help="serve one party over HTTP")
    s.add_argument("--config", required=True, help="party config, or world config with --party")
    s.add_argument("--party", help="party to serve when --config is a world file")

    sc = sub.add_parser("scenario", help="run a scenario against the fixtures or a config")
    sc.add_argument("--id", required=True, choices=SCENARIO_IDS)
    sc.add_argument("--config", help="world config (default: bundled fixtures)")
    sc.add_argument("--seed", type=_uint64)
    sc.add_argument("--out", required=True)
    sc.add_argument("--transport", choices=("inprocess", "http"), default="inprocess",
                    help="http drives parties already started with `serve`")
    sc.add_argument("--anomaly", choices=("none", "spikes", "drift"))

    m = sub.add_parser("modeler", help="capability modeler")
    msub = m.add_subparsers(dest="action", required=True)
    d = msub.add_parser("derive", help="derive a CapabilityDescription from a feature history")
    d.add_argument("--history", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--submodel-id", default="urn:maasx:sm:capability")

    i = sub.add_parser("inspect", help="identify and validate a submodel file")
    i.add_argument("--file", required=True)
    return p


def default_world_path():
    from importlib.resources import files
    return Path(str(files("maasx.fixtures") / "world.json"))


# commands

def cmd_serve(args):
    from .mxport.server import make_server
    from .mxport.transport import HttpNetwork, Trace
    from .workflow.services import build_service

    raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if "parties" in raw:
        party = args.party or env_overrides().get("partyId")
        if not party:
            raise ConfigError("--party is required with a world config")
        cfg = load_world(args.config).party(party)
        env = env_overrides()
        if "listen" in env:
            cfg = replace(cfg, listen=env["listen"])
        if "dataDir" in env:
            cfg = replace(cfg, data_dir=env["dataDir"])
    else:
        cfg = load_config(args.config)
    sink = Path(cfg.data_dir) / "trace.jsonl" if cfg.data_dir else None
    trace = Trace(sink)
    directory = {p.endpoint: pid for pid, p in cfg.peers.items()}
    service = build_service(cfg, HttpNetwork(trace, directory))
    host, port = cfg.listen_address
    server = make_server(service.gate, host, port)
    stop = threading.Event()

    def _stop(*_):
        stop.set()
        threading.Thread(target=server.shutdown, daemon=True).start()

    signal.signal(signal.SIGTERM, _stop)
    h, p = server.server_address[:2]
    print(f"ready {cfg.party_id} http://{h}:{p}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_scenario(args):
    from .workflow.scenarios import connect_http, deploy_in_process, run_e2e, write_output

    world = load_world(args.config or default_world_path(), seed=args.seed)
    upto = args.id
    if args.transport == "http":
        dep = connect_http(world)
    else:
        dep = deploy_in_process(world)
    outcome = run_e2e(dep, anomaly=args.anomaly, upto=upto)
    outcome["scenario"] = upto
    out = write_output(args.out, dep, outcome)
    summary = {"out": str(out), "scenario": upto}
    if "scenario3" in outcome:
        summary["orderState"] = outcome["scenario3"]["order"]["state"]
        summary["qualityPassed"] = outcome["scenario3"]["verdict"]["overall"]
    elif "scenario2" in outcome:
        summary["offers"] = [(o["supplierId"], o["totalMicro"]) for o in outcome["scenario2"]["offers"]]
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_derive(args):
    from .capability import FeatureRecord, derive_capabilities
    from .templates import build_capability_description

    try:
        records = json.loads(Path(args.history).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"history file not found: {args.history}") from None
    history = [FeatureRecord.from_dict(r) for r in records]
    sm = build_capability_description(derive_capabilities(history), args.submodel_id)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(canonical_serialize(sm))
    print(f"{len(sm.element('Capabilities').children)} capabilities -> {out}")
    return 0


def cmd_inspect(args):
    from .templates.catalog import template_for, validate

    sm = deserialize(Path(args.file).read_bytes())
    template = template_for(sm.semantic_id)
    if template is None:
        print(f"unknown template {sm.semantic_id}")
        print(f"id: {sm.id}")
        return 1
    report = validate(sm, template)
    print(template.label)
    print(f"id: {sm.id}")
    print("valid" if report.ok else "invalid")
    for v in report.violations:
        print(f"  {v.path}: {v.rule}: {v.message}")
    return 0 if report.ok else 1


COMMANDS = {"serve": cmd_serve, "scenario": cmd_scenario, "inspect": cmd_inspect}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = cmd_derive if args.command == "modeler" else COMMANDS[args.command]
    try:
        return handler(args)
    except (MaasxError, OSError, ValueError, KeyError) as exc:
        print(f"maasx {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
