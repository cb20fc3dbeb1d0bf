"""AAS repository and Digital Twin Registry with on-disk persistence.

Layout under ``data_dir``::

    submodels/<base64url(id)>.json   canonical submodel JSON
    shells/<base64url(aasId)>.json   shell records
    registry.json                    ordered list of shell descriptors

Writes go to a temp file in the same directory followed by ``os.replace``.
Reads are lock-free over immutable values; writes are serialized.
"""

import json
import os
import tempfile
import threading
from pathlib import Path

from ..errors import ConflictingRegistration, DanglingReference, NotFound, StorageFailure
from .identifiers import check_identifier, encode_identifier
from .model import Shell, ShellDescriptor, SubmodelInstance
from .serialization import (canonical_json, canonical_serialize, deserialize,
                            descriptor_from_dict, descriptor_to_dict, shell_from_dict,
                            shell_to_dict)


def atomic_write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise StorageFailure(f"could not write {path}: {exc}") from exc


class Repository:
    """Shells and submodels of one party.  ``data_dir=None`` keeps it in memory."""

    def __init__(self, data_dir=None):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self._shells = {}
        self._submodels = {}
        self._lock = threading.Lock()
        if self.data_dir is not None:
            self._load()

    def _load(self):
        try:
            for p in sorted((self.data_dir / "submodels").glob("*.json")):
                sm = deserialize(p.read_bytes())
                self._submodels[sm.id] = sm
            for p in sorted((self.data_dir / "shells").glob("*.json")):
                sh = shell_from_dict(json.loads(p.read_bytes()))
                self._shells[sh.aas_id] = sh
        except OSError as exc:
            raise StorageFailure(f"could not load {self.data_dir}: {exc}") from exc

    # submodels
    def put_submodel(self, sm: SubmodelInstance):
        data = canonical_serialize(sm)
        with self._lock:
            if self.data_dir is not None:
                atomic_write(self.data_dir / "submodels" / f"{encode_identifier(sm.id)}.json", data)
            self._submodels[sm.id] = sm

    def get_submodel(self, submodel_id) -> SubmodelInstance:
        try:
            return self._submodels[submodel_id]
        except KeyError:
            raise NotFound(f"submodel {submodel_id!r}") from None

    def has_submodel(self, submodel_id):
        return submodel_id in self._submodels

    def submodels(self):
        return [self._submodels[k] for k in sorted(self._submodels)]

    def find_by_semantic_id(self, semantic_id):
        return [sm for sm in self.submodels() if sm.semantic_id == semantic_id]

    # shells
    def put_shell(self, shell: Shell):
        for ref in shell.submodel_refs:
            if not ref.external and ref.submodel_id not in self._submodels:
                raise DanglingReference(
                    f"shell {shell.aas_id!r} references missing submodel {ref.submodel_id!r}")
        with self._lock:
            if self.data_dir is not None:
                atomic_write(self.data_dir / "shells" / f"{encode_identifier(shell.aas_id)}.json",
                             canonical_json(shell_to_dict(shell)))
            self._shells[shell.aas_id] = shell

    def get_shell(self, aas_id) -> Shell:
        try:
            return self._shells[aas_id]
        except KeyError:
            raise NotFound(f"shell {aas_id!r}") from None

    def shells(self):
        return [self._shells[k] for k in sorted(self._shells)]

    def snapshot(self):
        """(shells, submodels) dicts for equality checks after reload."""
        return dict(self._shells), dict(self._submodels)


class Registry:
    """Digital Twin Registry: descriptors in registration order."""

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self._descriptors = []
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            try:
                items = json.loads(self.path.read_bytes())
            except (OSError, ValueError) as exc:
                raise StorageFailure(f"could not load {self.path}: {exc}") from exc
            self._descriptors = [descriptor_from_dict(d) for d in items]

    def register_shell(self, desc: ShellDescriptor):
        with self._lock:
            for i, old in enumerate(self._descriptors):
                if old.aas_id == desc.aas_id:
                    if old.endpoint != desc.endpoint:
                        raise ConflictingRegistration(
                            f"{desc.aas_id!r} already registered at {old.endpoint}")
                    # same endpoint: refresh refs in place, keep registration order
                    self._descriptors[i] = desc
                    break
            else:
                self._descriptors.append(desc)
            self._persist()

    def _persist(self):
        if self.path is not None:
            atomic_write(self.path, canonical_json([descriptor_to_dict(d) for d in self._descriptors]))

    def lookup_by_asset(self, asset_id):
        check_identifier(asset_id)
        return [d for d in self._descriptors if d.asset_id == asset_id]

    def get(self, aas_id) -> ShellDescriptor:
        for d in self._descriptors:
            if d.aas_id == aas_id:
                return d
        raise NotFound(f"shell descriptor {aas_id!r}")

    def descriptors(self):
        return list(self._descriptors)
