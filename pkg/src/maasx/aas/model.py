"""Minimal AAS metamodel: Property and Collection elements inside a submodel.

Instances are frozen dataclasses with tuple children, so structural equality
is plain ``==`` and values can be shared across threads without copying.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from ..errors import InvalidElement
from .identifiers import check_identifier, is_id_short

VALUE_TYPES = ("string", "double", "integer", "boolean")


def _coerce(value_type, value):
    if value_type == "string":
        if isinstance(value, str):
            return value
    elif value_type == "double":
        if isinstance(value, float):
            return value
        if isinstance(value, int) and not isinstance(value, bool):
            return float(value)
    elif value_type == "integer":
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif value_type == "boolean":
        if isinstance(value, bool):
            return value
    else:
        raise InvalidElement(f"unknown valueType {value_type!r}")
    raise InvalidElement(f"value {value!r} does not parse as {value_type}")


@dataclass(frozen=True)
class Property:
    id_short: str
    value_type: str
    value: Union[str, float, int, bool]
    semantic_id: Optional[str] = None

    kind = "Property"

    def __post_init__(self):
        if not is_id_short(self.id_short):
            raise InvalidElement(f"invalid idShort {self.id_short!r}")
        object.__setattr__(self, "value", _coerce(self.value_type, self.value))
        if self.semantic_id is not None:
            check_identifier(self.semantic_id)


@dataclass(frozen=True)
class Collection:
    id_short: str
    children: Tuple["SubmodelElement", ...] = ()
    semantic_id: Optional[str] = None

    kind = "Collection"

    def __post_init__(self):
        if not is_id_short(self.id_short):
            raise InvalidElement(f"invalid idShort {self.id_short!r}")
        object.__setattr__(self, "children", tuple(self.children))
        _check_siblings(self.children, self.id_short)
        if self.semantic_id is not None:
            check_identifier(self.semantic_id)

    def child(self, id_short):
        for c in self.children:
            if c.id_short == id_short:
                return c
        return None

    def __getitem__(self, id_short):
        c = self.child(id_short)
        if c is None:
            raise KeyError(id_short)
        return c


SubmodelElement = Union[Property, Collection]


def _check_siblings(elements, where):
    seen = set()
    for e in elements:
        if not isinstance(e, (Property, Collection)):
            raise InvalidElement(f"{where}: not a submodel element: {e!r}")
        if e.id_short in seen:
            raise InvalidElement(f"{where}: duplicate idShort {e.id_short!r}")
        seen.add(e.id_short)


@dataclass(frozen=True)
class SubmodelInstance:
    id: str
    id_short: str
    semantic_id: str
    version: str
    elements: Tuple[SubmodelElement, ...] = ()

    def __post_init__(self):
        check_identifier(self.id)
        check_identifier(self.semantic_id)
        if not is_id_short(self.id_short):
            raise InvalidElement(f"invalid idShort {self.id_short!r}")
        object.__setattr__(self, "elements", tuple(self.elements))
        _check_siblings(self.elements, self.id_short)

    def element(self, path):
        """Resolve a dot-separated idShort path, or return None."""
        node = None
        children = self.elements
        for part in path.split("."):
            node = next((c for c in children if c.id_short == part), None)
            if node is None:
                return None
            children = node.children if isinstance(node, Collection) else ()
        return node

    def value(self, path, default=None):
        node = self.element(path)
        if isinstance(node, Property):
            return node.value
        return default

    def replace_element(self, element):
        """Copy with the top-level element of the same idShort swapped (or appended)."""
        out = [element if e.id_short == element.id_short else e for e in self.elements]
        if all(e.id_short != element.id_short for e in self.elements):
            out.append(element)
        return SubmodelInstance(self.id, self.id_short, self.semantic_id, self.version, tuple(out))


def iter_properties(elements, prefix=""):
    """Yield (path, Property) for every property in an element tree."""
    for e in elements:
        path = f"{prefix}{e.id_short}"
        if isinstance(e, Property):
            yield path, e
        else:
            yield from iter_properties(e.children, path + ".")


def has_non_finite(sm):
    return any(p.value_type == "double" and not math.isfinite(p.value)
               for _, p in iter_properties(sm.elements))


@dataclass(frozen=True)
class SubmodelRef:
    submodel_id: str
    semantic_id: str
    external: bool = False


@dataclass(frozen=True)
class ShellDescriptor:
    """Registry entry pointing a consumer at the gate serving one shell."""

    aas_id: str
    asset_id: str
    submodel_refs: Tuple[SubmodelRef, ...]
    endpoint: str

    def __post_init__(self):
        check_identifier(self.aas_id)
        check_identifier(self.asset_id)
        object.__setattr__(self, "submodel_refs", tuple(self.submodel_refs))
        if not (self.endpoint.startswith("http://") or self.endpoint.startswith("https://")):
            raise InvalidElement(f"endpoint must be an absolute http(s) URL: {self.endpoint!r}")
        if "://" in self.endpoint and not self.endpoint.split("://", 1)[1]:
            raise InvalidElement(f"endpoint has no host: {self.endpoint!r}")


@dataclass(frozen=True)
class Shell:
    """Shell record held by a repository."""

    aas_id: str
    id_short: str
    asset_id: str
    submodel_refs: Tuple[SubmodelRef, ...] = field(default_factory=tuple)

    def __post_init__(self):
        check_identifier(self.aas_id)
        check_identifier(self.asset_id)
        if not is_id_short(self.id_short):
            raise InvalidElement(f"invalid idShort {self.id_short!r}")
        object.__setattr__(self, "submodel_refs", tuple(self.submodel_refs))
