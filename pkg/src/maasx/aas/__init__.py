from .identifiers import check_identifier, decode_identifier, encode_identifier, is_id_short
from .model import (Collection, Property, Shell, ShellDescriptor, SubmodelElement,
                    SubmodelInstance, SubmodelRef, iter_properties)
from .repository import Registry, Repository, atomic_write
from .serialization import (canonical_json, canonical_serialize, descriptor_from_dict,
                            descriptor_to_dict, deserialize, element_from_dict, element_to_dict,
                            submodel_from_dict, submodel_to_dict)

__all__ = [
    "Collection", "Property", "Registry", "Repository", "Shell", "ShellDescriptor",
    "SubmodelElement", "SubmodelInstance", "SubmodelRef", "atomic_write", "canonical_json",
    "canonical_serialize", "check_identifier", "decode_identifier", "descriptor_from_dict",
    "descriptor_to_dict", "deserialize", "element_from_dict", "element_to_dict",
    "encode_identifier", "is_id_short", "iter_properties", "submodel_from_dict",
    "submodel_to_dict",
]
