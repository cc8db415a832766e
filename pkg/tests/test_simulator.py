import pytest

from clarify.belief import AspectId, EngineConfig
from clarify.schema import NO_INFO, CandidateCall, EqualTo, UsageError
from clarify.simulator import (
    CANNOT_PROVIDE,
    COMPLETE,
    Request,
    Scenario,
    dump_suite,
    next_request,
    request_status,
    run_suite,
    score,
    scripted_answer,
    silent_responder,
    simulate,
)
from clarify.suite import build_suite
from clarify.trace import EpisodeTrace
from clarify.voi import ClarifyingQuestion

FMT = AspectId("convert", "format")
ZIP = AspectId("convert", "zip")
CONVERT = CandidateCall("convert", {"format": "png", "output_filename": "report_img", "zip": False}, "g1")


def scenario(requests, hidden=None, qtype="ambiguous", sid="t-01"):
    return Scenario(sid, "document", qtype, tuple(requests), hidden or {})


def q(*aspects):
    return ClarifyingQuestion("q1", "?", "c1", aspects)


def test_scripted_answer_cases():
    sc = scenario([Request("convert it", (CONVERT,))], {FMT: "png"})
    assert scripted_answer(sc, q(FMT)) == {FMT: EqualTo("png")}
    assert scripted_answer(sc, q(FMT, ZIP)) == {FMT: EqualTo("png"), ZIP: NO_INFO}
    page = AspectId("delete_page", "page_num")
    assert scripted_answer(scenario([Request("x", (CONVERT,))]), q(page)) == {page: NO_INFO}


def test_next_request_cases():
    reqs = [Request(f"r{i}", (CONVERT,)) for i in range(3)]
    sc = scenario(reqs)
    assert next_request(sc, 1) == "r1"
    assert next_request(sc, 3) == COMPLETE
    assert next_request(scenario(reqs[:1]), 0) == "r0"


def test_explicit_scenario_asks_nothing():
    sc = scenario([Request("convert", (CONVERT,), "fully specified")], qtype="explicit")
    traces = simulate(sc)
    assert [t.asked for t in traces] == [0]
    assert request_status(traces[0], sc.tau_max) == "executed"


def test_one_hidden_aspect_one_question():
    req = Request("convert, format unsaid", (CONVERT,), "hidden-finite:1", (FMT,))
    traces = simulate(scenario([req], {FMT: "png"}))
    assert traces[0].asked == 1
    assert traces[0].executed_calls()[0]["arguments"]["format"] == "png"


def test_unhelpful_user_marks_incomplete_and_moves_on():
    first = Request("convert, format unsaid", (CONVERT,), "partial", (FMT,))
    second = Request("delete page 3", (CandidateCall("delete_page", {"page_num": 3, "overwrite": True}, "g1"),))
    sc = scenario([first, second])
    traces = simulate(sc, responder=silent_responder, config=EngineConfig(lam=0.0, alpha=0.0))
    assert traces[0].asked == sc.tau_max
    assert request_status(traces[0], sc.tau_max) == "incomplete"
    assert len(traces) == 2 and traces[1].executed_calls()


def _executed(*calls, asks=0):
    t = EpisodeTrace()
    t.add("CandidateSet", query="q", candidates=[])
    for i in range(asks):
        t.add("Asked", round=i + 1, question={}, score={})
    for c in calls:
        t.add("Executed", call=c.to_obj(), result={"ok": True, "message": ""}, reason="threshold")
    t.add("Terminated", reason="threshold")
    return t


def test_score_perfect_run():
    sc = scenario([Request("x", (CONVERT,))])
    rep = score([[_executed(CONVERT)]], [sc])
    assert (rep.coverage, rep.tool_match_rate, rep.param_match_rate) == (1.0, 1.0, 1.0)


def test_score_partial_param_match():
    a = CandidateCall("pick", {"a": "x", "b": "p"}, "g1")
    b = CandidateCall("pick", {"a": "y", "b": "q"}, "g2")
    sc = scenario([Request("x", (a, b))])
    rep = score([[_executed(a, b.with_values(b="r"))]], [sc])
    assert rep.tool_match_rate == 1.0
    assert rep.param_match_rate == 0.75
    assert rep.coverage == 0.5


def test_score_average_questions():
    scs = [scenario([Request("x", (CONVERT,))], sid=f"t-{i}") for i in range(10)]
    asks = [2, 2, 2, 2, 1, 1, 1, 1, 1, 1]
    rep = score([[_executed(CONVERT, asks=n)] for n in asks], scs)
    assert rep.avg_questions == pytest.approx(1.4, abs=1e-12)


def test_numeric_tolerance():
    gold = CandidateCall("fill", {"amount": 0.1 + 0.2}, "g1")
    got = CandidateCall("fill", {"amount": 0.3}, "g1")
    rep = score([[_executed(got)]], [scenario([Request("x", (gold,))])])
    assert rep.coverage == 1.0


def test_score_misaligned_input():
    with pytest.raises(UsageError):
        score([], [scenario([Request("x", (CONVERT,))])])


def test_scenario_validation():
    with pytest.raises(UsageError):
        Scenario("x", "document", "vague", (Request("x", (CONVERT,)),))
    with pytest.raises(UsageError):
        Scenario("x", "document", "explicit", ())


def test_render_cannot_provide():
    from clarify.simulator import render_answer

    assert render_answer({FMT: NO_INFO}) == CANNOT_PROVIDE


def test_suite_shape():
    suite = build_suite()
    by_type = {}
    for sc in suite:
        by_type.setdefault(sc.query_type, set()).add(sc.domain)
    assert all(len(domains) == 5 for domains in by_type.values())
    assert sum(sc.query_type == "ambiguous" for sc in suite) >= 30
    assert len({sc.scenario_id for sc in suite}) == len(suite)


def test_coverage_never_exceeds_tool_match():
    suite = build_suite()[:40]
    _, rep = run_suite(suite)
    assert rep.coverage <= rep.tool_match_rate
    for m in rep.scenarios:
        assert m.full_matches <= m.tool_matches


def test_explicit_lambda_never_adds_questions():
    suite = [s for s in build_suite() if s.query_type == "explicit"]
    _, hi = run_suite(suite, EngineConfig(lam=0.5))
    _, lo = run_suite(suite, EngineConfig(lam=0.0))
    assert hi.avg_questions <= lo.avg_questions


def test_suite_dump_is_stable():
    assert dump_suite(build_suite()) == dump_suite(build_suite())
