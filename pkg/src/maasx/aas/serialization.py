"""Canonical JSON for submodels, shells and generic payloads.

Key order for AAS objects is fixed (see docs/wire-format.md):

* Submodel: modelType, id, idShort, semanticId, version, submodelElements
* Property: modelType, idShort, [semanticId], valueType, value
* SubmodelElementCollection: modelType, idShort, [semanticId], value

Output is UTF-8, without insignificant whitespace; doubles use Python's
shortest round-trip ``repr``.  Generic payloads (`canonical_json`) sort keys.
"""

import json

from ..errors import InvalidElement, NonSerializableValue
from .model import (Collection, Property, Shell, ShellDescriptor, SubmodelInstance,
                    SubmodelRef)


def _dumps(obj, sort_keys=False):
    try:
        return json.dumps(obj, ensure_ascii=False, separators=(",", ":"),
                          allow_nan=False, sort_keys=sort_keys).encode("utf-8")
    except ValueError as exc:
        raise NonSerializableValue(str(exc)) from exc


def canonical_json(obj) -> bytes:
    """Compact, key-sorted JSON for protocol payloads."""
    return _dumps(obj, sort_keys=True)


def element_to_dict(e):
    if isinstance(e, Property):
        d = {"modelType": "Property", "idShort": e.id_short}
        if e.semantic_id is not None:
            d["semanticId"] = e.semantic_id
        d["valueType"] = e.value_type
        d["value"] = e.value
        return d
    d = {"modelType": "SubmodelElementCollection", "idShort": e.id_short}
    if e.semantic_id is not None:
        d["semanticId"] = e.semantic_id
    d["value"] = [element_to_dict(c) for c in e.children]
    return d


def element_from_dict(d):
    try:
        kind = d["modelType"]
        if kind == "Property":
            return Property(d["idShort"], d["valueType"], d["value"], d.get("semanticId"))
        if kind == "SubmodelElementCollection":
            return Collection(d["idShort"], tuple(element_from_dict(c) for c in d["value"]),
                              d.get("semanticId"))
    except (KeyError, TypeError) as exc:
        raise InvalidElement(f"malformed element: {exc}") from exc
    raise InvalidElement(f"unsupported modelType {kind!r}")


def submodel_to_dict(sm: SubmodelInstance):
    return {
        "modelType": "Submodel",
        "id": sm.id,
        "idShort": sm.id_short,
        "semanticId": sm.semantic_id,
        "version": sm.version,
        "submodelElements": [element_to_dict(e) for e in sm.elements],
    }


def submodel_from_dict(d) -> SubmodelInstance:
    try:
        if d.get("modelType") != "Submodel":
            raise InvalidElement("modelType must be 'Submodel'")
        return SubmodelInstance(d["id"], d["idShort"], d["semanticId"], d["version"],
                                tuple(element_from_dict(e) for e in d["submodelElements"]))
    except (KeyError, TypeError, AttributeError) as exc:
        raise InvalidElement(f"malformed submodel: {exc}") from exc


def canonical_serialize(sm: SubmodelInstance) -> bytes:
    return _dumps(submodel_to_dict(sm))


def deserialize(data) -> SubmodelInstance:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except ValueError as exc:
        raise InvalidElement(f"not JSON: {exc}") from exc
    return submodel_from_dict(obj)


def ref_to_dict(r: SubmodelRef):
    d = {"submodelId": r.submodel_id, "semanticId": r.semantic_id}
    if r.external:
        d["external"] = True
    return d


def ref_from_dict(d):
    return SubmodelRef(d["submodelId"], d["semanticId"], bool(d.get("external", False)))


def shell_to_dict(s: Shell):
    return {"id": s.aas_id, "idShort": s.id_short, "assetId": s.asset_id,
            "submodels": [ref_to_dict(r) for r in s.submodel_refs]}


def shell_from_dict(d):
    return Shell(d["id"], d["idShort"], d["assetId"],
                 tuple(ref_from_dict(r) for r in d["submodels"]))


def descriptor_to_dict(desc: ShellDescriptor):
    return {"id": desc.aas_id, "assetId": desc.asset_id,
            "submodelDescriptors": [ref_to_dict(r) for r in desc.submodel_refs],
            "endpoint": desc.endpoint}


def descriptor_from_dict(d):
    try:
        return ShellDescriptor(d["id"], d["assetId"],
                               tuple(ref_from_dict(r) for r in d["submodelDescriptors"]),
                               d["endpoint"])
    except (KeyError, TypeError) as exc:
        raise InvalidElement(f"malformed shell descriptor: {exc}") from exc
