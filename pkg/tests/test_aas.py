import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maasx.aas import (Collection, Property, Registry, Repository, Shell, ShellDescriptor,
                       SubmodelInstance, SubmodelRef, canonical_serialize, decode_identifier,
                       deserialize, encode_identifier)
from maasx.errors import (ConflictingRegistration, DanglingReference, InvalidElement,
                          InvalidIdentifier, NonSerializableValue, NotFound)

from oracles import b64url_nopad

SEM = "https://maasx.example/idta/TechnicalData/2/0"


def _sm(elements=(), sm_id="urn:maasx:sm:1"):
    return SubmodelInstance(sm_id, "Sample", SEM, "2.0", tuple(elements))


# identifiers

def test_encode_matches_reference_encoder():
    assert encode_identifier("urn:maasx:sm:1") == b64url_nopad("urn:maasx:sm:1")
    assert encode_identifier("urn:maasx:sm:1") == "dXJuOm1hYXN4OnNtOjE"


def test_unicode_round_trip():
    iri = "https://ex.com/aas/α"
    assert decode_identifier(encode_identifier(iri)) == iri
    assert "=" not in encode_identifier(iri)


@pytest.mark.parametrize("bad", ["", "has space", "tab\there", "x" * 2049])
def test_invalid_identifiers(bad):
    with pytest.raises(InvalidIdentifier):
        encode_identifier(bad)


def test_decode_rejects_padding_and_garbage():
    token = encode_identifier("urn:a")
    with pytest.raises(InvalidIdentifier):
        decode_identifier(token + "=")
    with pytest.raises(InvalidIdentifier):
        decode_identifier("")
    with pytest.raises(InvalidIdentifier):
        decode_identifier("!!!")


_iri = st.text(st.characters(blacklist_categories=("Cs", "Zs", "Zl", "Zp", "Cc")),
               min_size=1, max_size=80).filter(lambda s: not any(c.isspace() for c in s))


@given(_iri)
def test_identifier_round_trip(iri):
    token = encode_identifier(iri)
    assert token == b64url_nopad(iri)
    assert decode_identifier(token) == iri


# elements

def test_property_value_must_parse():
    with pytest.raises(InvalidElement):
        Property("X", "integer", "3")
    with pytest.raises(InvalidElement):
        Property("X", "boolean", 1)
    assert Property("X", "double", 3).value == 3.0


def test_id_short_rules():
    with pytest.raises(InvalidElement):
        Property("1x", "string", "a")
    with pytest.raises(InvalidElement):
        Collection("A", (Property("B", "string", "x"), Property("B", "string", "y")))


def test_element_path_lookup():
    sm = _sm([Collection("A", (Collection("B", (Property("C", "integer", 4),)),))])
    assert sm.value("A.B.C") == 4
    assert sm.element("A.X") is None


# serialization

def test_canonical_bytes_layout():
    sm = _sm([Property("P", "double", 0.1), Collection("C", ())])
    data = canonical_serialize(sm)
    assert data == (b'{"modelType":"Submodel","id":"urn:maasx:sm:1","idShort":"Sample",'
                    b'"semanticId":"' + SEM.encode() + b'","version":"2.0","submodelElements":['
                    b'{"modelType":"Property","idShort":"P","valueType":"double","value":0.1},'
                    b'{"modelType":"SubmodelElementCollection","idShort":"C","value":[]}]}')


def test_nan_is_not_serializable():
    with pytest.raises(NonSerializableValue):
        canonical_serialize(_sm([Property("P", "double", math.nan)]))
    with pytest.raises(NonSerializableValue):
        canonical_serialize(_sm([Property("P", "double", math.inf)]))


def test_equal_structures_give_identical_bytes():
    a = _sm([Property("P", "string", "x"), Property("Q", "integer", 2)])
    b = _sm([Property("P", "string", "x"), Property("Q", "integer", 2)])
    assert a == b and canonical_serialize(a) == canonical_serialize(b)


def test_deserialize_rejects_malformed():
    with pytest.raises(InvalidElement):
        deserialize(b"{")
    with pytest.raises(InvalidElement):
        deserialize(json.dumps({"modelType": "Shell"}))


_names = st.sampled_from(["A", "b", "Cap_01", "x9", "Value", "Z_z"])
_doubles = st.floats(allow_nan=False, allow_infinity=False)
_props = st.one_of(
    st.builds(lambda n, v: Property(n, "string", v), _names, st.text(max_size=20)),
    st.builds(lambda n, v: Property(n, "double", v), _names, _doubles),
    st.builds(lambda n, v: Property(n, "integer", v), _names, st.integers(-2**53, 2**53)),
    st.builds(lambda n, v: Property(n, "boolean", v), _names, st.booleans()),
)


def _unique(elements):
    seen, out = set(), []
    for e in elements:
        if e.id_short not in seen:
            seen.add(e.id_short)
            out.append(e)
    return tuple(out)


def _collections(children):
    return st.builds(lambda n, c: Collection(n, _unique(c)), _names, st.lists(children, max_size=4))


def _tree(depth):
    if depth == 1:
        return _props
    return st.one_of(_props, _collections(_tree(depth - 1)))


_elements = _tree(5)


@settings(max_examples=500)
@given(st.lists(_elements, max_size=5))
def test_round_trip_random_trees(elements):
    sm = _sm(_unique(elements))
    data = canonical_serialize(sm)
    back = deserialize(data)
    assert back == sm
    assert canonical_serialize(back) == data


# repository

def test_read_your_write_and_not_found(tmp_path):
    repo = Repository(tmp_path)
    sm = _sm([Property("P", "integer", 1)])
    repo.put_submodel(sm)
    assert repo.get_submodel(sm.id) == sm
    with pytest.raises(NotFound):
        repo.get_submodel("urn:unknown")


def test_persistence_round_trip(tmp_path):
    repo = Repository(tmp_path)
    sm = _sm([Property("P", "double", 2.5)])
    repo.put_submodel(sm)
    repo.put_shell(Shell("urn:aas:1", "Shell1", "urn:asset:1", (SubmodelRef(sm.id, SEM),)))
    path = tmp_path / "submodels" / f"{encode_identifier(sm.id)}.json"
    assert path.read_bytes() == canonical_serialize(sm)
    assert not list((tmp_path / "submodels").glob(".tmp-*"))
    again = Repository(tmp_path)
    assert again.snapshot() == repo.snapshot()


def test_shell_refs_must_resolve():
    repo = Repository()
    with pytest.raises(DanglingReference):
        repo.put_shell(Shell("urn:aas:1", "S", "urn:asset:1", (SubmodelRef("urn:missing", SEM),)))
    repo.put_shell(Shell("urn:aas:1", "S", "urn:asset:1", (SubmodelRef("urn:x", SEM, external=True),)))


# registry

def _desc(aas, asset="urn:asset:1", endpoint="http://a.example"):
    return ShellDescriptor(aas, asset, (SubmodelRef("urn:sm:1", SEM),), endpoint)


def test_registry_lookup_order_and_conflict(tmp_path):
    reg = Registry(tmp_path / "registry.json")
    a, b = _desc("urn:aas:a"), _desc("urn:aas:b", endpoint="http://b.example")
    reg.register_shell(a)
    reg.register_shell(b)
    assert reg.lookup_by_asset("urn:asset:1") == [a, b]
    assert reg.lookup_by_asset("urn:asset:none") == []
    with pytest.raises(ConflictingRegistration):
        reg.register_shell(_desc("urn:aas:a", endpoint="http://other.example"))
    assert Registry(tmp_path / "registry.json").descriptors() == [a, b]


def test_descriptor_endpoint_must_be_absolute():
    with pytest.raises(InvalidElement):
        _desc("urn:aas:a", endpoint="a.example/path")


@given(st.lists(st.tuples(st.sampled_from(["urn:aas:1", "urn:aas:2", "urn:aas:3"]),
                          st.sampled_from(["urn:asset:x", "urn:asset:y"])), max_size=8))
def test_lookup_only_returns_registered(ops):
    reg = Registry()
    registered = []
    for aas, asset in ops:
        d = _desc(aas, asset)
        try:
            reg.register_shell(d)
            registered.append(d)
        except ConflictingRegistration:
            pass
    for asset in ("urn:asset:x", "urn:asset:y", "urn:asset:z"):
        for d in reg.lookup_by_asset(asset):
            assert d in registered and d.asset_id == asset
