import pytest

from clarify.trace import EpisodeTrace, TraceError, join_traces


def finished():
    t = EpisodeTrace()
    t.add("CandidateSet", query="q", candidates=[])
    t.add("Executed", call={"tool": "ls", "arguments": {}}, result={"ok": True}, reason="threshold")
    t.add("Terminated", reason="threshold")
    return t


def test_jsonl_round_trip():
    t = finished()
    back = EpisodeTrace.from_jsonl(t.to_jsonl())
    assert back.events == t.events
    assert back.to_jsonl() == t.to_jsonl()
    back.check()


def test_keys_are_sorted():
    line = finished().to_jsonl().splitlines()[1]
    assert line.index('"call"') < line.index('"result"') < line.index('"seq"')


def test_bad_event_type():
    with pytest.raises(TraceError):
        EpisodeTrace().add("Danced")
    with pytest.raises(TraceError):
        EpisodeTrace.from_jsonl('{"seq": 0, "type": "Danced"}\n')
    with pytest.raises(TraceError):
        EpisodeTrace.from_jsonl("{oops\n")


def test_no_events_after_termination():
    t = finished()
    with pytest.raises(TraceError):
        t.add("Asked", round=1)


def test_bad_reason():
    with pytest.raises(TraceError):
        EpisodeTrace().add("Terminated", reason="bored")


def test_check_rules():
    t = EpisodeTrace()
    t.add("CandidateSet", query="q", candidates=[])
    with pytest.raises(TraceError):
        t.check()
    t.add("Terminated", reason="threshold")
    with pytest.raises(TraceError):
        t.check()
    aborted = EpisodeTrace()
    aborted.add("Terminated", reason="abort")
    aborted.check()


def test_listener_sees_every_event():
    seen = []
    t = EpisodeTrace(listener=seen.append)
    t.add("CandidateSet", query="q", candidates=[])
    t.add("Terminated", reason="abort")
    assert [e["type"] for e in seen] == ["CandidateSet", "Terminated"]
    assert t == EpisodeTrace(list(seen))


def test_join_traces():
    assert join_traces([finished(), finished()]) == finished().to_jsonl() * 2
