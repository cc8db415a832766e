"""Command line: ``clarify simulate | score-rewards | corrupt | repl``.

Exit codes: 0 success, 1 when a scenario aborted (or a corruption did not
round-trip), 2 for bad paths or malformed inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from .agent import keyword_interpreter
from .belief import STOP_BASES, EngineConfig
from .envs import ENVIRONMENTS, make_env
from .envs.corruption import NotCorruptible, corrupt_call
from .reward import MODES, parse_completion, total_reward, zero_breakdown
from .schema import CandidateCall, SchemaError, Toolkit, UsageError, load_toolkit
from .simulator import QUERY_TYPES, load_suite, scripted_oracles, silent_responder, simulate, score
from .trace import join_traces

EXIT_OK, EXIT_ABORTED, EXIT_IO = 0, 1, 2


class InputError(Exception):
    """A path is missing or a file cannot be read."""


def default_suite_path() -> Path:
    return Path(str(resources.files("clarify").joinpath("data", "scenarios", "suite.json")))


def _engine_flags(p: argparse.ArgumentParser) -> None:
    d = EngineConfig()
    p.add_argument("--lambda", dest="lam", type=float, default=d.lam, help="redundancy cost weight")
    p.add_argument("--alpha", type=float, default=d.alpha, help="low-score stop ratio")
    p.add_argument("--epsilon", type=float, default=d.epsilon, help="certainty floor for unbounded domains")
    p.add_argument("--tau-exec", type=float, default=d.tau_exec, help="execute when top belief reaches this")
    p.add_argument("--max-questions", type=int, default=d.max_questions, help="question budget per request")
    p.add_argument("--stop-basis", choices=STOP_BASES, default=d.stop_basis)
    p.add_argument("--seed", type=int, default=0)


def _config(args) -> EngineConfig:
    return EngineConfig(
        lam=args.lam,
        alpha=args.alpha,
        epsilon=args.epsilon,
        tau_exec=args.tau_exec,
        max_questions=args.max_questions,
        stop_basis=args.stop_basis,
    )


def _existing(path) -> Path:
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such file: {p}")
    return p


def _load_suite(path):
    p = _existing(path)
    try:
        return load_suite(p)
    except (OSError, ValueError) as exc:
        raise InputError(f"{p}: {exc}") from exc


def _load_toolkits(paths) -> list:
    out = []
    for path in paths or ():
        p = _existing(path)
        try:
            out.append(load_toolkit(p))
        except (OSError, SchemaError) as exc:
            raise InputError(f"{p}: {exc}") from exc
    return out


def _toolkit_for(scenario, toolkits) -> Toolkit | None:
    tools = {c.tool for r in scenario.requests for c in (*r.ground_truth, *r.stated)}
    for tk in toolkits:
        if all(t in tk for t in tools):
            return tk
    return None


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args, out=sys.stdout) -> int:
    from . import report

    scenarios = _load_suite(args.suite or default_suite_path())
    toolkits = _load_toolkits(args.toolkit)
    if args.types:
        wanted = set(args.types.split(","))
        bad = wanted - set(QUERY_TYPES)
        if bad:
            raise UsageError(f"unknown query types {sorted(bad)}")
        scenarios = [s for s in scenarios if s.query_type in wanted]
    config = _config(args)
    responder = silent_responder if args.responder == "silent" else None
    traces = []
    for sc in scenarios:
        tk = _toolkit_for(sc, toolkits)
        if tk is not None:
            sc.check(tk)
        traces.append(simulate(sc, toolkit=tk, config=config, responder=responder, seed=args.seed))
    overall = score(traces, scenarios)
    per_type = report.by_query_type(traces, scenarios)
    statuses = report.status_counts(overall)
    settings = {"config": config.to_obj(), "seed": args.seed, "responder": args.responder}

    text = "== config ==\n" + json.dumps(settings, sort_keys=True) + "\n"
    text += "== metrics ==\n" + report.summary_table(overall, per_type)
    text += "== statuses ==\n" + "".join(f"{k} {v}\n" for k, v in sorted(statuses.items()))
    if args.stamp:
        out.write(f"# run at {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    out.write(text)

    if args.out:
        root = Path(args.out)
        for sc, group in zip(scenarios, traces):
            _write(root / "traces" / f"{sc.scenario_id}.jsonl", join_traces(group))
        body = {
            **settings,
            "overall": overall.to_obj(),
            "by_query_type": {k: {kk: vv for kk, vv in r.to_obj().items() if kk != "scenarios"} for k, r in per_type.items()},
        }
        _write(root / "report.json", json.dumps(body, indent=1, sort_keys=True) + "\n")
        _write(root / "report.txt", text)
        report.metrics_figure(per_type, root / "figures" / "metrics.png")
        report.questions_figure(per_type, root / "figures" / "questions.png")
        out.write(f"== artifacts ==\n{root}\n")
    return EXIT_ABORTED if statuses.get("aborted") else EXIT_OK


# ---------------------------------------------------------------------------
# score-rewards
# ---------------------------------------------------------------------------

def _record_toolkit(ref, cache: dict) -> Toolkit:
    if not isinstance(ref, str) or not ref:
        raise ValueError("record needs a toolkit name or path")
    if ref not in cache:
        if ref in ENVIRONMENTS:
            cache[ref] = ENVIRONMENTS[ref].toolkit()
        else:
            cache[ref] = load_toolkit(_existing(ref))
    return cache[ref]


def score_record(line: str, mode: str, epsilon: float, cache: dict):
    """One breakdown for one input line; malformed records score zero."""
    try:
        rec = json.loads(line)
        if not isinstance(rec, dict):
            raise ValueError("record must be an object")
        toolkit = _record_toolkit(rec.get("toolkit", ""), cache)
        gold_call = rec.get("gold_call")
        gold_call = CandidateCall.from_obj(gold_call, "g1") if gold_call is not None else None
        parsed = parse_completion(rec["completion"])
        return total_reward(parsed, rec["gold_action"], gold_call, mode, toolkit, epsilon)
    except (ValueError, KeyError, TypeError, SchemaError, InputError) as exc:
        return zero_breakdown(mode, f"malformed record: {exc}")


def cmd_score_rewards(args, out=sys.stdout) -> int:
    from . import report

    if args.input == "-":
        lines = sys.stdin.read().splitlines()
    else:
        lines = _existing(args.input).read_text(encoding="utf-8").splitlines()
    cache: dict = {}
    results = []
    for line in lines:
        if not line.strip():
            continue
        b = score_record(line, args.mode, args.epsilon, cache)
        results.append(b)
        out.write(json.dumps(b.to_obj(), sort_keys=True) + "\n")
    if results:
        means = report.mean_by_action(results)
        out.write(json.dumps({"summary": {"mean_total_by_action": means, "records": len(results)}}, sort_keys=True) + "\n")
        if args.out:
            report.reward_figure(means, Path(args.out) / "rewards.png")
    return EXIT_OK


# ---------------------------------------------------------------------------
# corrupt
# ---------------------------------------------------------------------------

def corruption_rows(domains, seeds):
    for domain in domains:
        cls = ENVIRONMENTS[domain]
        for sample in cls.samples():
            for seed in seeds:
                row = {"domain": domain, "sample": sample.to_obj(), "seed": seed}
                try:
                    c = corrupt_call(sample, cls(), seed)
                except NotCorruptible:
                    yield {**row, "corruptible": False}
                    continue
                got = cls().execute(c.call)
                yield {**row, "corruptible": True, **c.to_obj(), "observed": got.kind, "agrees": got.kind == c.kind}


def cmd_corrupt(args, out=sys.stdout) -> int:
    domains = [args.domain] if args.domain else list(ENVIRONMENTS)
    seeds = range(args.seed, args.seed + args.seeds)
    bad = 0
    for row in corruption_rows(domains, seeds):
        bad += row.get("corruptible") and not row["agrees"]
        out.write(json.dumps(row, sort_keys=True) + "\n")
    return EXIT_ABORTED if bad else EXIT_OK


# ---------------------------------------------------------------------------
# repl
# ---------------------------------------------------------------------------

def _printer(out):
    def show(event):
        kind = event["type"]
        if kind == "CandidateSet":
            out.write(f"request: {event['query']}\ncandidates:\n")
            for c in event["candidates"]:
                out.write(f"  {c['id']}: {CandidateCall.from_obj(c).render()}\n")
        elif kind == "Asked":
            s = event["score"]
            out.write(f"[round {event['round']}] evpi={s['evpi']:.4g} cost={s['cost']:.4g}\n")
        elif kind == "Executed":
            res = event["result"]
            status = "ok" if res["ok"] else f"failed: {res.get('kind')}"
            out.write(f"executed {CandidateCall.from_obj(event['call']).render()} -> {status}\n")
        elif kind == "Terminated":
            out.write(f"terminated: {event['reason']} {event.get('detail', '')}".rstrip() + "\n")
    return show


def human_responder(read, out):
    def respond(question):
        out.write(f"{question.text}\n> ")
        out.flush()
        try:
            line = read()
        except EOFError:
            out.write("\n")
            return None
        if line is None or line.strip().lower() in ("quit", "exit"):
            return None
        return line.strip()
    return respond


def cmd_repl(args, out=sys.stdout, read=input) -> int:
    scenarios = _load_suite(args.suite or default_suite_path())
    by_id = {s.scenario_id: s for s in scenarios}
    sid = args.scenario or next(s.scenario_id for s in scenarios if s.query_type == "ambiguous")
    if sid not in by_id:
        raise UsageError(f"no scenario {sid!r} in the suite")
    sc = by_id[sid]

    def oracles(scenario, index, env, seed):
        return replace(scripted_oracles(scenario, index, env, seed), response_interpreter=keyword_interpreter)

    out.write(f"scenario {sid} ({sc.domain}); answer like 'param=value', 'skip' or 'quit'\n")
    traces = simulate(
        sc,
        oracles=oracles,
        env=make_env(sc.domain),
        config=_config(args),
        responder=human_responder(read, out),
        seed=args.seed,
        on_event=_printer(out),
        stop_on_abort=True,
    )
    path = Path(args.out or "repl_trace.jsonl")
    _write(path, join_traces(traces))
    out.write(f"trace written to {path}\n")
    return EXIT_ABORTED if any(t.reason == "abort" for t in traces) else EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clarify", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the scripted scenario suite")
    p.add_argument("--suite", help="scenario suite JSON (default: the shipped suite)")
    p.add_argument("--toolkit", action="append", help="toolkit JSON to use instead of the built-in one")
    p.add_argument("--types", help="comma-separated query types to keep")
    p.add_argument("--responder", choices=("scripted", "silent"), default="scripted")
    p.add_argument("--out", help="directory for traces, report and figures")
    p.add_argument("--stamp", action="store_true", help="print a timestamp header line")
    _engine_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("score-rewards", help="score a JSONL file of completions")
    p.add_argument("input", help="JSONL records, or - for stdin")
    p.add_argument("--mode", choices=MODES, default="baseline")
    p.add_argument("--epsilon", type=float, default=EngineConfig().epsilon)
    p.add_argument("--out", help="directory for the reward figure")
    p.set_defaults(func=cmd_score_rewards)

    p = sub.add_parser("corrupt", help="corrupt each sample call and check the error kind")
    p.add_argument("--domain", choices=sorted(ENVIRONMENTS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=10, help="number of consecutive seeds")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("repl", help="play the user for one scenario")
    p.add_argument("--suite")
    p.add_argument("--scenario", help="scenario id (default: first ambiguous one)")
    p.add_argument("--out", help="trace file (default: repl_trace.jsonl)")
    _engine_flags(p)
    p.set_defaults(func=cmd_repl)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"clarify: {exc}", file=sys.stderr)
        return EXIT_IO
    except UsageError as exc:
        print(f"clarify: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
