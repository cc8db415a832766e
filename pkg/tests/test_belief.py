import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import belief_case_violations
from clarify.belief import (
    AspectId,
    ContradictoryResponse,
    EngineConfig,
    apply_response,
    belief_from_weights,
    id_key,
    initial_belief,
    param_certainty,
    viability,
)
from clarify.schema import NO_INFO, UNKNOWN, CandidateCall, EqualTo, Finite, NotIn, Text, UsageError
from clarify.voi import ClarifyingQuestion

FMT = AspectId("convert", "format")


def q(qid, *aspects, target="c1"):
    return ClarifyingQuestion(qid, "which?", target, aspects)


def two_formats(toolkit):
    cands = [
        CandidateCall("convert", {"format": "png", "output_filename": "a"}, "c1"),
        CandidateCall("convert", {"format": "doc", "output_filename": "a"}, "c2"),
    ]
    return initial_belief(cands, toolkit)


def test_param_certainty_cases(toolkit):
    call = CandidateCall("pick", {"a": "x", "b": UNKNOWN})
    schema = toolkit.tool("pick")
    assert param_certainty(call, "a", Finite(("x", "y")), 1e-4, schema) == 1.0
    assert param_certainty(call, "b", Finite(("p", "q", "r", "s")), 1e-4, schema) == 0.25
    text_call = CandidateCall("convert", {"format": "png", "output_filename": UNKNOWN})
    assert param_certainty(text_call, "output_filename", Text(), 1e-4, toolkit.tool("convert")) == 1e-4


def test_param_certainty_unknown_param(toolkit):
    with pytest.raises(UsageError):
        param_certainty(CandidateCall("pick", {}), "zzz", Text(), 1e-4, toolkit.tool("pick"))


def test_viability_cases(toolkit):
    full = CandidateCall("pick", {"a": "x", "b": "p"}, "c1")
    half = CandidateCall("pick", {"a": UNKNOWN, "b": UNKNOWN}, "c2")
    text = CandidateCall("convert", {"format": "png", "output_filename": UNKNOWN, "zip": False}, "c3")
    state = initial_belief([full, half, text], toolkit)
    assert viability(full, state) == 1.0
    assert viability(half, state) == 0.125
    assert viability(text, state, EngineConfig(epsilon=1e-4)) == 1e-4


def test_defaulted_optional_does_not_count(toolkit):
    call = CandidateCall("delete_page", {"page_num": 2, "overwrite": True, "output_pathname": UNKNOWN}, "c1")
    assert initial_belief([call], toolkit).weights["c1"] == 1.0


def test_normalize_cases():
    assert dict(belief_from_weights({"a": 0.5, "b": 0.5}).normalized) == {"a": 0.5, "b": 0.5}
    assert dict(belief_from_weights({"a": 1.0, "b": 0.25}).normalized) == {"a": 0.8, "b": 0.2}
    assert dict(belief_from_weights({"a": 0.3}).normalized) == {"a": 1.0}


def test_equal_to_eliminates(toolkit):
    state = apply_response(two_formats(toolkit), q("q1", FMT), {FMT: EqualTo("png")})
    assert state.weights["c2"] == 0.0
    assert state.normalized["c1"] == 1.0


def test_no_information_only_counts(toolkit):
    before = two_formats(toolkit)
    after = apply_response(before, q("q1", FMT), {FMT: NO_INFO})
    assert dict(after.weights) == dict(before.weights)
    assert after.count(FMT) == 1 and after.step == 1


def test_not_in_collapses_to_singleton(toolkit):
    cand = CandidateCall("pick", {"a": UNKNOWN, "b": "p"}, "c1")
    state = initial_belief([cand], toolkit)
    assert state.weights["c1"] == 0.5
    a = AspectId("pick", "a")
    state = apply_response(state, q("q1", a), {a: NotIn(("y",))})
    assert state.candidate("c1").value("a") == "x"
    assert state.weights["c1"] == 1.0


def test_answer_that_kills_everyone(toolkit):
    with pytest.raises(ContradictoryResponse):
        apply_response(two_formats(toolkit), q("q1", FMT), {FMT: EqualTo("tiff")})


def test_constraint_on_untargeted_aspect(toolkit):
    with pytest.raises(UsageError):
        apply_response(two_formats(toolkit), q("q1", FMT), {AspectId("convert", "zip"): NO_INFO})


def test_singleton_domain_assigns_value(toolkit):
    cand = CandidateCall("pick", {"a": UNKNOWN, "b": "p"}, "c1")
    state = initial_belief([cand], toolkit, domain_fn=lambda t, p: Finite(("y",)) if p == "a" else toolkit.tool(t).param(p).domain)
    assert state.candidate("c1").value("a") == "y"
    assert state.weights["c1"] == 1.0


def test_duplicate_ids_rejected(toolkit):
    c = CandidateCall("pick", {"a": "x", "b": "p"}, "c1")
    with pytest.raises(UsageError):
        initial_belief([c, c], toolkit)


def test_argmax_ties_use_natural_id_order(toolkit):
    cands = [CandidateCall("pick", {"a": "x", "b": "p"}, cid) for cid in ("c10", "c2")]
    assert initial_belief(cands, toolkit).argmax() == "c2"
    assert id_key("c2") < id_key("c10")


def test_config_rejects_bad_values():
    for bad in ({"lam": -1}, {"alpha": float("nan")}, {"epsilon": 0}, {"tau_exec": 1.5}, {"max_questions": 0}):
        with pytest.raises(UsageError):
            EngineConfig(**bad)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_response_sequences_keep_belief_laws(seed):
    assert belief_case_violations(seed) == []


@given(st.dictionaries(st.sampled_from("abcdef"), st.floats(0.001, 1.0), min_size=1))
def test_normalize_keeps_argmax_and_sums_to_one(weights):
    state = belief_from_weights(weights)
    assert abs(sum(state.normalized.values()) - 1.0) <= 1e-9
    top_w = max(weights, key=lambda k: (weights[k], k))
    top_n = max(state.normalized, key=lambda k: (state.normalized[k], k))
    assert weights[top_n] == weights[top_w]
