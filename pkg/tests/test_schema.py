import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clarify.schema import (
    EMPTY,
    NO_INFO,
    UNKNOWN,
    Boolean,
    CandidateCall,
    EqualTo,
    EstimatedFinite,
    Finite,
    ListOf,
    NotIn,
    NumericRange,
    OneOf,
    ParamSpec,
    Range,
    SchemaError,
    Text,
    ToolkitParseError,
    ToolSchema,
    contains,
    domain_size,
    intersect_domain,
    parse_toolkit,
    serialize_toolkit,
    validate_call,
)

CONVERT_DOC = {
    "tools": [
        {
            "name": "convert",
            "params": [
                {"name": "format", "domain": {"type": "finite", "values": ["pptx", "doc", "png", "jpeg", "tiff"]}},
                {"name": "output_filename", "domain": {"type": "string"}},
                {"name": "zip", "required": False, "domain": {"type": "boolean"}},
            ],
        }
    ]
}


def test_parse_convert_tool():
    tk = parse_toolkit(json.dumps(CONVERT_DOC))
    assert len(tk) == 1
    schema = tk.tool("convert")
    assert len(schema.params) == 3
    fmt = schema.param("format").domain
    assert isinstance(fmt, Finite) and domain_size(fmt) == 5


def test_parse_empty_tool_list():
    assert len(parse_toolkit('{"tools": []}')) == 0
    assert len(parse_toolkit("[]")) == 0


def test_parse_rejects_inverted_range():
    doc = {"tools": [{"name": "t", "params": [{"name": "x", "domain": {"type": "numeric_range", "lo": 5, "hi": 1}}]}]}
    with pytest.raises(SchemaError):
        parse_toolkit(doc)


def test_parse_error_names_location():
    doc = {"tools": [{"name": "t", "params": [{"name": "x", "domain": {"type": "blob"}}]}]}
    with pytest.raises(ToolkitParseError) as err:
        parse_toolkit(doc)
    assert "tools[0].params[0].domain" in str(err.value)
    with pytest.raises(ToolkitParseError):
        parse_toolkit("{not json")


def test_serialize_round_trip(toolkit):
    assert parse_toolkit(serialize_toolkit(toolkit)) == toolkit


def test_domain_invariants():
    with pytest.raises(SchemaError):
        Finite(())
    with pytest.raises(SchemaError):
        Finite(("a", "a"))
    with pytest.raises(SchemaError):
        NumericRange(3, 1)
    with pytest.raises(SchemaError):
        EstimatedFinite(("a", "b", "c"), 2)


def test_validate_fuel_amounts():
    fill = ToolSchema("fillFuelTank", (ParamSpec("fuelAmount", NumericRange(0, 50)),))
    assert validate_call(fill, CandidateCall("fillFuelTank", {"fuelAmount": 30})).ok
    report = validate_call(fill, CandidateCall("fillFuelTank", {"fuelAmount": -5}))
    assert report.kinds() == ("out of range",)


def test_validate_missing_required(toolkit):
    report = validate_call(toolkit.tool("convert"), CandidateCall("convert", {"format": "png"}))
    assert "missing required" in report.kinds()


def test_validate_skips_unknown_values(toolkit):
    call = CandidateCall("convert", {"format": UNKNOWN, "output_filename": "a"})
    assert validate_call(toolkit.tool("convert"), call).ok


def test_domain_sizes():
    assert domain_size(Boolean()) == 2
    assert domain_size(Finite(("economy", "business", "first"))) == 3
    assert math.isinf(domain_size(Text()))
    assert domain_size(NumericRange(1, 7, integer=True)) == 7
    assert math.isinf(domain_size(NumericRange(0.0, 1.0)))
    assert domain_size(EstimatedFinite(("a",), 40)) == 40
    assert math.isinf(domain_size(ListOf(Finite(("a",)))))
    assert domain_size(EMPTY) == 0


def test_intersections():
    assert intersect_domain(Finite(("a", "b", "c")), NotIn(("b",))) == Finite(("a", "c"))
    assert intersect_domain(NumericRange(0, 50), Range(30, 100)) == NumericRange(30, 50)
    assert intersect_domain(Finite(("a", "b")), EqualTo("c")) is EMPTY
    assert intersect_domain(Boolean(), NotIn((True,))) == Finite((False,))
    assert intersect_domain(Text(), OneOf(("x", "y"))) == Finite(("x", "y"))
    assert intersect_domain(NumericRange(1, 10, True), Range(3.5, 4.5)) == Finite((4,))


def test_booleans_are_not_numbers():
    assert not contains(NumericRange(0, 5), True)
    assert not contains(Finite((1, 2)), True)
    assert contains(Boolean(), False)


def test_unk_token_round_trip():
    call = CandidateCall("convert", {"format": UNKNOWN, "output_filename": "a"})
    obj = call.to_obj()
    assert obj["arguments"]["format"] == "<UNK>"
    assert CandidateCall.from_obj(obj) == call


# -- properties -----------------------------------------------------------------

values = st.sampled_from(["a", "b", "c", "d", "e"])
finite_domains = st.lists(values, min_size=1, max_size=5, unique=True).map(lambda v: Finite(tuple(v)))
int_ranges = st.tuples(st.integers(-20, 20), st.integers(0, 30)).map(lambda t: NumericRange(t[0], t[0] + t[1], True))
constraints_f = st.one_of(
    values.map(EqualTo),
    st.lists(values, max_size=4).map(lambda v: NotIn(tuple(v))),
    st.lists(values, min_size=1, max_size=4).map(lambda v: OneOf(tuple(v))),
    st.just(NO_INFO),
)
constraints_n = st.one_of(
    st.integers(-25, 55).map(EqualTo),
    st.lists(st.integers(-25, 55), max_size=6).map(lambda v: NotIn(tuple(v))),
    st.tuples(st.integers(-30, 60), st.integers(0, 40)).map(lambda t: Range(t[0], t[0] + t[1])),
    st.just(NO_INFO),
)
domain_and_constraint = st.one_of(st.tuples(finite_domains, constraints_f), st.tuples(int_ranges, constraints_n))


@given(domain_and_constraint)
def test_intersection_idempotent(dc):
    dom, c = dc
    once = intersect_domain(dom, c)
    assert intersect_domain(once, c) == once


@given(domain_and_constraint)
def test_intersection_never_grows(dc):
    dom, c = dc
    assert domain_size(intersect_domain(dom, c)) <= domain_size(dom)


@given(st.booleans(), st.sampled_from([None, "doc", "pptx"]))
def test_validation_stable_under_optional_params(zip_flag, fmt):
    schema = ToolSchema(
        "convert",
        (ParamSpec("format", Finite(("doc", "pptx"))), ParamSpec("zip", Boolean(), required=False)),
    )
    args = {"format": fmt or "doc"}
    assert validate_call(schema, CandidateCall("convert", args)).ok
    assert validate_call(schema, CandidateCall("convert", {**args, "zip": zip_flag})).ok
