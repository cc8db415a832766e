import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clarify.agent import (
    OracleSuite,
    default_error_questioner,
    json_interpreter,
    keyword_interpreter,
    run_episode,
    with_budget,
)
from clarify.belief import AspectId, EngineConfig
from clarify.envs import make_env
from clarify.schema import NO_INFO, UNKNOWN, CandidateCall, EqualTo, NotIn, Range, UsageError
from clarify.voi import ClarifyingQuestion

OVERWRITE = AspectId("delete_page", "overwrite")
PAGE = AspectId("delete_page", "page_num")


def delete(cid, page, overwrite):
    return CandidateCall("delete_page", {"page_num": page, "overwrite": overwrite}, cid)


def oracles(cands, questions=()):
    return OracleSuite(
        lambda query, obs, tk: list(cands),
        lambda query, cands, obs: list(questions),
        json_interpreter,
        default_error_questioner,
    )


def answer(mapping):
    """Responder that reveals values from ``mapping`` keyed by aspect string."""
    def respond(q):
        return json.dumps({str(a): mapping.get(str(a)) for a in q.aspects})
    return respond


def silent(q):
    return "I cannot provide that information."


def episode(cands, questions=(), responder=silent, config=None, env=None):
    env = env or make_env("document")
    return run_episode("delete a page", env.toolkit(), oracles(cands, questions), env, config or EngineConfig(), responder)


def test_specified_candidate_runs_at_once():
    trace = episode([delete("c1", 3, True)])
    assert trace.asked == 0
    assert trace.reason == "threshold"
    assert trace.executed_calls()[0]["arguments"] == {"page_num": 3, "overwrite": True}


def test_one_question_then_true_candidate():
    q = ClarifyingQuestion("q1", "Overwrite the file?", "c1", (OVERWRITE,))
    trace = episode(
        [delete("c1", 3, True), delete("c2", 3, False)],
        [q],
        answer({"delete_page.overwrite": False}),
    )
    assert trace.asked == 1
    assert trace.executed_calls()[0]["arguments"]["overwrite"] is False
    trace.check()


def test_rejected_call_recovers():
    # page 12 does not exist in a 10-page document; the user then says 4
    trace = episode([delete("c1", 12, True)], responder=answer({"delete_page.page_num": 4}))
    kinds = [e["type"] for e in trace]
    assert "ErrorRecovery" in kinds
    executed = trace.of_type("Executed")
    assert executed[0]["result"]["kind"] == "out-of-range"
    assert executed[1]["result"]["ok"] and executed[1]["call"]["arguments"]["page_num"] == 4


def test_retry_limit_aborts():
    trace = episode([delete("c1", 12, True)], responder=answer({"delete_page.page_num": 11}))
    assert trace.reason == "abort"
    assert len([e for e in trace.of_type("Executed") if not e["result"]["ok"]]) >= 1


def test_unresolved_required_becomes_recovery_question():
    trace = episode([delete("c1", UNKNOWN, True)], responder=answer({"delete_page.page_num": 2}))
    first = trace.of_type("Executed")[0]
    assert first["result"]["kind"] == "incomplete"
    assert trace.executed_calls()[0]["arguments"]["page_num"] == 2


def test_quitting_user_aborts():
    q = ClarifyingQuestion("q1", "Overwrite?", "c1", (OVERWRITE,))
    trace = episode([delete("c1", 3, True), delete("c2", 3, False)], [q], responder=lambda q: None)
    assert trace.reason == "abort"
    assert trace.executed_calls() == []


def test_contradiction_triggers_recovery():
    q = ClarifyingQuestion("q1", "Overwrite?", "c1", (OVERWRITE,))
    replies = iter([json.dumps({"delete_page.overwrite": "maybe"}), json.dumps({"delete_page.overwrite": True})])
    trace = episode([delete("c1", 3, True), delete("c2", 3, False)], [q], responder=lambda q: next(replies, None))
    assert trace.of_type("ErrorRecovery")[0]["error"]["kind"] == "contradiction"
    assert trace.executed_calls()[0]["arguments"]["overwrite"] is True


def test_no_candidates_aborts():
    assert episode([]).reason == "abort"


def test_empty_toolkit_is_usage_error():
    from clarify.schema import Toolkit

    with pytest.raises(UsageError):
        run_episode("x", Toolkit(()), oracles([]), make_env("document"), EngineConfig(), silent)


def test_with_budget():
    assert with_budget(EngineConfig(), 3).max_questions == 3
    assert with_budget(EngineConfig(max_questions=2), 5).max_questions == 2


def test_keyword_interpreter():
    a, b = AspectId("t", "fmt"), AspectId("t", "size")
    assert keyword_interpreter("png", [a]) == {a: EqualTo("png")}
    assert keyword_interpreter("fmt=png, size=3", [a, b]) == {a: EqualTo("png"), b: EqualTo(3)}
    assert keyword_interpreter("not doc|pptx", [a]) == {a: NotIn(("doc", "pptx"))}
    assert keyword_interpreter("2 to 5", [b]) == {b: Range(2.0, 5.0)}
    assert keyword_interpreter("skip", [a]) == {a: NO_INFO}
    assert keyword_interpreter("yes", [a]) == {a: EqualTo(True)}
    assert keyword_interpreter("whatever you like", [a, b]) == {a: NO_INFO, b: NO_INFO}


def test_json_interpreter_ignores_garbage():
    a = AspectId("t", "fmt")
    assert json_interpreter("not json", [a]) == {a: NO_INFO}
    assert json_interpreter('{"t.fmt": null}', [a]) == {a: NO_INFO}
    assert json_interpreter('{"t.fmt": "png"}', [a]) == {a: EqualTo("png")}


def _many_questions(n):
    return [ClarifyingQuestion(f"q{i}", "?", "c1", (OVERWRITE,) if i % 2 else (PAGE,)) for i in range(n)]


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(st.integers(1, 10), st.booleans()), min_size=1, max_size=5, unique=True),
    st.integers(1, 5),
    st.floats(0.0, 2.0),
)
def test_loop_laws(pairs, budget, lam):
    cands = [delete(f"c{i + 1}", p, o) for i, (p, o) in enumerate(pairs)]
    config = EngineConfig(lam=lam, max_questions=budget)
    trace = episode(cands, _many_questions(4), silent, config)
    trace.check()
    assert trace.asked <= budget
    # each asked question is the best recorded score of its round
    scored = {e["round"]: e["scores"] for e in trace.of_type("QuestionScored")}
    for ev in trace.of_type("Asked"):
        best = max(s["score"] for s in scored[ev["round"]])
        assert ev["score"]["score"] == best


def test_replay_is_byte_identical():
    cands = [delete("c1", 3, True), delete("c2", 4, False), delete("c3", 3, False)]
    run = lambda: episode(cands, _many_questions(3), answer({"delete_page.page_num": 3})).to_jsonl()
    assert run() == run()
