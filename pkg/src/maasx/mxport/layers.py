"""The five-layer connector stack.

adapter    internal record -> typed domain value
converter  domain value -> SubmodelInstance
gate       HTTP endpoint set serving the repository
access     rules + token validation (enforced inside the gate)
discovery  registry / ID-Link descriptors

Only converter output is ever stored in the repository the gate serves, so
internal records cannot leak onto the wire.
"""

from dataclasses import dataclass
from typing import Callable, Optional

from ..aas.model import SubmodelInstance, SubmodelRef, Shell, ShellDescriptor
from .access import AccessControl
from .gate import Gate


def identity(record):
    return record


@dataclass
class LayerStack:
    adapter: Callable
    converter: Callable
    gate: Gate
    access: AccessControl
    discovery: Optional[object] = None   # Registry

    def publish(self, record) -> SubmodelInstance:
        sm = self.converter(self.adapter(record))
        if not isinstance(sm, SubmodelInstance):
            raise TypeError("converter must produce a SubmodelInstance")
        self.gate.repository.put_submodel(sm)
        return sm

    def announce(self, aas_id, id_short, asset_id, submodel_ids):
        """Store a shell for `asset_id` and register it with discovery."""
        repo = self.gate.repository
        refs = tuple(SubmodelRef(s, repo.get_submodel(s).semantic_id) for s in submodel_ids)
        repo.put_shell(Shell(aas_id, id_short, asset_id, refs))
        if self.discovery is not None:
            self.discovery.register_shell(ShellDescriptor(aas_id, asset_id, refs, self.gate.endpoint))
        return refs
