"""Spec document parsing, validation, and round-trip stability."""

import json

import pytest

from compactor import (
    ElementType,
    MappingDecl,
    SpecError,
    parse_spec,
    serialize_spec,
    validate_mapping_decls,
)
from compactor.model import ArraySpec, c_div


def doc(**kw):
    base = {"platform": {"int_bytes": 2, "endianness": "little", "pointer_bytes": 4}}
    base.update(kw)
    return json.dumps(base)


def test_parse_two_array_demo():
    spec = parse_spec(
        doc(arrays=[{"name": "iA", "ctype": "int", "dims": [2, 2], "data": [[-32768, -1], [0, 32767]]}])
    )
    (a,) = spec.arrays
    assert a.name == "iA"
    assert a.elem_type is ElementType.INT
    assert a.dims == (2, 2)
    assert a.data == ((-32768, -1), (0, 32767))


def test_parse_minimal():
    spec = parse_spec(doc(arrays=[{"name": "u", "ctype": "unsigned char", "dims": [1], "data": [0]}]))
    assert spec.arrays[0].dims == (1,)


def test_value_out_of_range():
    with pytest.raises(SpecError, match="out of range"):
        parse_spec(doc(arrays=[{"name": "x", "ctype": "unsigned char", "dims": [2], "data": [0, 300]}]))


def test_int_range_depends_on_width():
    arrays = [{"name": "x", "ctype": "int", "dims": [1], "data": [40000]}]
    with pytest.raises(SpecError, match="out of range"):
        parse_spec(doc(arrays=arrays))
    wide = {"platform": {"int_bytes": 4, "endianness": "little"}, "arrays": arrays}
    assert parse_spec(json.dumps(wide)).arrays[0].data == (40000,)


def test_syntax_error_reports_position():
    with pytest.raises(SpecError, match=r"line \d+, column \d+"):
        parse_spec("{ not json }")


def test_unknown_type_name():
    with pytest.raises(SpecError, match="unknown type"):
        parse_spec(doc(arrays=[{"name": "x", "ctype": "float", "dims": [1], "data": [0]}]))


def test_dimension_data_mismatch():
    with pytest.raises(SpecError, match="mismatch"):
        parse_spec(doc(arrays=[{"name": "x", "ctype": "int", "dims": [2, 2], "data": [[1, 2], [3]]}]))


def test_null_at_element_level_rejected():
    with pytest.raises(SpecError, match="NULL at element level"):
        parse_spec(doc(arrays=[{"name": "x", "ctype": "int", "dims": [2], "data": [1, None]}]))


def test_null_sub_array_accepted():
    spec = parse_spec(
        doc(arrays=[{"name": "x", "ctype": "unsigned char", "dims": [2, 2], "data": [None, [1, 2]]}])
    )
    assert spec.arrays[0].data == (None, (1, 2))
    assert list(spec.arrays[0].null_nodes()) == [(0,)]
    assert list(spec.arrays[0].rows()) == [((1,), (1, 2))]


def test_duplicate_names_rejected():
    arrays = [
        {"name": "x", "ctype": "int", "dims": [1], "data": [1]},
        {"name": "x", "ctype": "int", "dims": [1], "data": [2]},
    ]
    with pytest.raises(SpecError, match="duplicate"):
        parse_spec(doc(arrays=arrays))


def test_bool_elements_rejected():
    with pytest.raises(SpecError, match="not an integer"):
        parse_spec(doc(arrays=[{"name": "x", "ctype": "int", "dims": [1], "data": [True]}]))


def test_bad_identifier_rejected():
    with pytest.raises(SpecError, match="identifier"):
        parse_spec(doc(arrays=[{"name": "2fast", "ctype": "int", "dims": [1], "data": [1]}]))


def test_unknown_keys_rejected():
    with pytest.raises(SpecError, match="unknown key"):
        parse_spec(doc(bogus=1))


def test_lossy_requires_threshold():
    with pytest.raises(SpecError, match="lossy_threshold"):
        parse_spec(doc(options={"methods": ["lossy"]}))


def test_random_requires_seed():
    with pytest.raises(SpecError, match="seed"):
        parse_spec(doc(options={"tie_strategy": "random", "seed": None}))


# mapping declarations


def arr(name, dims=(3,), ctype=ElementType.UCHAR, data=(0, 16, 32)):
    return ArraySpec(name, ctype, tuple(dims), data)


def test_mapping_dangling_name():
    with pytest.raises(SpecError, match="dangling name"):
        validate_mapping_decls([arr("a")], [MappingDecl("a", "missing", 1, 2, 0)])


def test_mapping_between_uchar_1d_ok():
    validate_mapping_decls(
        [arr("a"), arr("b", dims=(2,), data=(0, 8))], [MappingDecl("a", "b", 1, 2, 0)]
    )


def test_mapping_dimension_mismatch():
    two_d = ArraySpec("b", ElementType.UCHAR, (2, 2), ((1, 2), (3, 4)))
    with pytest.raises(SpecError, match="dimension mismatch"):
        validate_mapping_decls([arr("a"), two_d], [MappingDecl("a", "b", 1, 2, 0)])


def test_mapping_type_mismatch():
    b = ArraySpec("b", ElementType.SCHAR, (3,), (0, 8, 16))
    with pytest.raises(SpecError, match="type mismatch"):
        validate_mapping_decls([arr("a"), b], [MappingDecl("a", "b", 1, 2, 0)])


def test_mapping_cycle_rejected():
    decls = [MappingDecl("a", "b", 1, 1, 0), MappingDecl("b", "a", 1, 1, 0)]
    with pytest.raises(SpecError, match="cycle"):
        validate_mapping_decls([arr("a"), arr("b")], decls)


def test_mapping_chain_allowed():
    decls = [MappingDecl("a", "b", 1, 1, 0), MappingDecl("b", "c", 1, 1, 0)]
    validate_mapping_decls([arr("a"), arr("b"), arr("c")], decls)


def test_c_div_truncates_toward_zero():
    assert c_div(7, 2) == 3
    assert c_div(-7, 2) == -3
    assert c_div(7, -2) == -3
    assert c_div(-7, -2) == 3


# round-trip stability


def test_round_trip(fixtures_dir):
    for name in ("pair_demo", "mixed_types_3d", "sparse_null", "oracle_trio"):
        text = (fixtures_dir / f"{name}.json").read_text()
        model = parse_spec(text)
        assert parse_spec(serialize_spec(model)) == model
