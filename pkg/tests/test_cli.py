import io
import json
from importlib import resources

from clarify.cli import EXIT_IO, EXIT_OK, build_parser, cmd_repl, cmd_score_rewards, cmd_simulate, main

FIXTURES = str(resources.files("clarify").joinpath("data", "rewards", "fixtures.jsonl"))


def run(cmd, argv, **kw):
    out = io.StringIO()
    code = cmd(build_parser().parse_args(argv), out=out, **kw)
    return code, out.getvalue()


def metrics(text):
    """The metrics table as {row: {column: value}}."""
    rows = text.split("== metrics ==\n")[1].split("== statuses ==")[0].splitlines()
    header = rows[0].split()
    table = {}
    for row in rows[1:]:
        cells = row.split()
        table[cells[0]] = dict(zip(header, map(float, cells[1:])))
    return table


def test_simulate_default_run():
    code, text = run(cmd_simulate, ["simulate"])
    assert code == EXIT_OK
    for section in ("== config ==", "== metrics ==", "== statuses =="):
        assert section in text
    assert metrics(text)["explicit"]["avg_q"] == 0.0


def test_simulate_lambda_reduces_questions():
    _, hi = run(cmd_simulate, ["simulate", "--types", "ambiguous", "--lambda", "0.5"])
    _, lo = run(cmd_simulate, ["simulate", "--types", "ambiguous", "--lambda", "0"])
    assert metrics(hi)["ambiguous"]["avg_q"] < metrics(lo)["ambiguous"]["avg_q"]


def test_simulate_missing_toolkit(capsys):
    assert main(["simulate", "--toolkit", "/nope/tk.json"]) == EXIT_IO
    assert "/nope/tk.json" in capsys.readouterr().err


def test_simulate_unknown_type(capsys):
    assert main(["simulate", "--types", "vague"]) == EXIT_IO


def test_simulate_out_writes_artifacts(tmp_path):
    code, text = run(cmd_simulate, ["simulate", "--types", "explicit", "--out", str(tmp_path)])
    assert code == EXIT_OK and "== artifacts ==" in text
    for name in ("report.json", "report.txt", "figures/metrics.png", "figures/questions.png"):
        assert (tmp_path / name).stat().st_size > 0
    assert (tmp_path / "figures/metrics.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(list((tmp_path / "traces").glob("*.jsonl"))) == 35


def test_score_rewards_fixtures():
    expected = [json.loads(line)["expected"] for line in open(FIXTURES)]
    for mode in ("baseline", "certainty"):
        code, text = run(cmd_score_rewards, ["score-rewards", FIXTURES, "--mode", mode])
        lines = [json.loads(line) for line in text.splitlines()]
        assert code == EXIT_OK
        assert [l["total"] for l in lines[:-1]] == [e[f"total_{mode}"] for e in expected]
        assert lines[-1]["summary"]["records"] == len(expected)


def test_score_rewards_empty_input(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    assert run(cmd_score_rewards, ["score-rewards", str(empty)]) == (EXIT_OK, "")


def test_score_rewards_malformed_scores_zero(tmp_path):
    f = tmp_path / "bad.jsonl"
    f.write_text('not json\n{"completion": "x"}\n')
    _, text = run(cmd_score_rewards, ["score-rewards", str(f)])
    rows = [json.loads(line) for line in text.splitlines()[:2]]
    assert all(r["total"] == 0 and r["diagnostics"] for r in rows)


def test_score_rewards_modes_differ_on_ask(tmp_path):
    from clarify.reward import ASK, format_completion
    from clarify.schema import UNKNOWN, CandidateCall

    call = CandidateCall("delete_page", {"page_num": 3, "overwrite": UNKNOWN})
    rec = {
        "completion": format_completion(ASK, [call], question="Should the original file be overwritten or kept as is?"),
        "gold_action": "Ask",
        "gold_call": None,
        "toolkit": "document",
    }
    f = tmp_path / "ask.jsonl"
    f.write_text(json.dumps(rec) + "\n")
    _, base = run(cmd_score_rewards, ["score-rewards", str(f)])
    _, cert = run(cmd_score_rewards, ["score-rewards", str(f), "--mode", "certainty"])
    assert json.loads(base.splitlines()[0])["r_cls_final"] == 2.0
    assert json.loads(cert.splitlines()[0])["r_cls_final"] == 1.0


def test_score_rewards_figure(tmp_path):
    run(cmd_score_rewards, ["score-rewards", FIXTURES, "--out", str(tmp_path)])
    assert (tmp_path / "rewards.png").stat().st_size > 0


def test_corrupt_all_agree():
    out = io.StringIO()
    from clarify.cli import cmd_corrupt

    assert cmd_corrupt(build_parser().parse_args(["corrupt", "--domain", "document", "--seeds", "3"]), out=out) == EXIT_OK
    rows = [json.loads(line) for line in out.getvalue().splitlines()]
    assert rows and all(r["agrees"] for r in rows if r["corruptible"])


def replies(*lines):
    it = iter(lines)
    return lambda: next(it)


def test_repl_answer_executes_after_one_question(tmp_path):
    trace = tmp_path / "t.jsonl"
    code, text = run(cmd_repl, ["repl", "--out", str(trace)], read=replies("folder=archive"))
    assert code == EXIT_OK
    assert text.count("[round") == 1
    assert 'executed cd(folder="archive") -> ok' in text
    assert trace.exists()


def test_repl_skip_accrues_cost(tmp_path):
    _, text = run(cmd_repl, ["repl", "--out", str(tmp_path / "t.jsonl")], read=replies("skip", "folder=archive"))
    assert "[round 1] evpi=3 cost=0\n" in text
    assert "[round 2] evpi=3 cost=0.5\n" in text


def test_repl_quit_aborts_and_writes_trace(tmp_path):
    trace = tmp_path / "t.jsonl"
    code, text = run(cmd_repl, ["repl", "--out", str(trace)], read=replies("quit"))
    assert code == 1
    assert "terminated: abort" in text
    events = [json.loads(line) for line in trace.read_text().splitlines()]
    assert events[-1]["type"] == "Terminated" and events[-1]["reason"] == "abort"


def test_repl_eof_aborts(tmp_path):
    def eof():
        raise EOFError

    code, _ = run(cmd_repl, ["repl", "--out", str(tmp_path / "t.jsonl")], read=eof)
    assert code == 1
