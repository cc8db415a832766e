"""Scripted user simulation over scenario suites, plus benchmark metrics.

A scenario is a short conversation: an ordered list of requests, each with
the calls that should come out of it. The scripted user knows a table of
hidden values and reveals exactly the ones a question targets.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .agent import OracleSuite, default_error_questioner, json_interpreter, run_episode, with_budget
from .belief import AspectId, EngineConfig
from .envs import make_env
from .envs.base import Environment
from .schema import (
    NO_INFO,
    UNKNOWN,
    CandidateCall,
    EqualTo,
    SchemaError,
    Toolkit,
    UsageError,
    domain_size,
    enumerate_values,
    validate_call,
    value_from_json,
    value_to_json,
)
from .trace import EpisodeTrace
from .voi import ClarifyingQuestion

QUERY_TYPES = ("explicit", "ambiguous", "infeasible")
COMPLETE = "CONVERSATION_COMPLETE"
CANNOT_PROVIDE = "I cannot provide that information."
# ambiguous aspects with at most this many values get one candidate per value
ENUMERATE_MAX = 6
NUM_REL_TOL = 1e-9


@dataclass(frozen=True)
class Request:
    query: str
    ground_truth: tuple  # fully specified CandidateCalls
    intent: str = ""
    # aspects the query leaves open; the agent starts with these unresolved
    ambiguous: tuple = ()
    # for infeasible requests: the call as the user literally asked for it
    stated: tuple = ()

    def to_obj(self) -> dict:
        obj = {
            "query": self.query,
            "intent": self.intent,
            "ground_truth": [c.to_obj() for c in self.ground_truth],
            "ambiguous": [str(a) for a in self.ambiguous],
        }
        if self.stated:
            obj["stated"] = [c.to_obj() for c in self.stated]
        return obj

    @classmethod
    def from_obj(cls, obj: Mapping) -> "Request":
        return cls(
            query=str(obj["query"]),
            intent=str(obj.get("intent", "")),
            ground_truth=tuple(CandidateCall.from_obj(c, f"g{i + 1}") for i, c in enumerate(obj["ground_truth"])),
            ambiguous=tuple(AspectId.parse(a) for a in obj.get("ambiguous", ())),
            stated=tuple(CandidateCall.from_obj(c, f"u{i + 1}") for i, c in enumerate(obj.get("stated", ()))),
        )


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    domain: str
    query_type: str
    requests: tuple
    hidden_values: Mapping = field(default_factory=dict)
    tau_max: int = 5

    def __post_init__(self):
        if self.query_type not in QUERY_TYPES:
            raise UsageError(f"query type must be one of {QUERY_TYPES}, got {self.query_type!r}")
        if not self.requests:
            raise UsageError(f"scenario {self.scenario_id} has no requests")
        if self.tau_max < 1:
            raise UsageError("tau_max must be a positive integer")
        object.__setattr__(self, "requests", tuple(self.requests))
        object.__setattr__(self, "hidden_values", dict(self.hidden_values))

    def check(self, toolkit: Toolkit) -> None:
        for req in self.requests:
            for call in req.ground_truth:
                report = validate_call(toolkit.tool(call.tool), call)
                if not report.ok or not call.fully_specified:
                    raise UsageError(f"{self.scenario_id}: ground truth {call.render()} is invalid")
        tools = {c.tool for r in self.requests for c in r.ground_truth + r.stated}
        for aspect in self.hidden_values:
            if aspect.tool not in tools or not toolkit.tool(aspect.tool).has_param(aspect.param):
                raise UsageError(f"{self.scenario_id}: hidden value for unrelated aspect {aspect}")

    def to_obj(self) -> dict:
        return {
            "id": self.scenario_id,
            "domain": self.domain,
            "query_type": self.query_type,
            "requests": [r.to_obj() for r in self.requests],
            "hidden_values": {str(a): value_to_json(v) for a, v in sorted(self.hidden_values.items())},
            "tau_max": self.tau_max,
        }

    @classmethod
    def from_obj(cls, obj: Mapping) -> "Scenario":
        return cls(
            scenario_id=str(obj["id"]),
            domain=str(obj["domain"]),
            query_type=str(obj["query_type"]),
            requests=tuple(Request.from_obj(r) for r in obj["requests"]),
            hidden_values={AspectId.parse(k): value_from_json(v) for k, v in obj.get("hidden_values", {}).items()},
            tau_max=int(obj.get("tau_max", 5)),
        )


def load_suite(path) -> list:
    """Scenarios from a JSON file holding ``{"scenarios": [...]}``."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    try:
        return [Scenario.from_obj(s) for s in obj["scenarios"]]
    except (KeyError, TypeError, SchemaError) as exc:
        raise UsageError(f"{path}: malformed scenario suite ({exc})") from exc


def dump_suite(scenarios: Iterable[Scenario]) -> str:
    return json.dumps({"scenarios": [s.to_obj() for s in scenarios]}, indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Scripted user
# ---------------------------------------------------------------------------

def scripted_answer(scenario: Scenario, question: ClarifyingQuestion) -> dict:
    """EqualTo for each targeted aspect the user knows, NoInformation otherwise."""
    out = {}
    for a in question.aspects:
        out[a] = EqualTo(scenario.hidden_values[a]) if a in scenario.hidden_values else NO_INFO
    return out


def render_answer(constraints: Mapping) -> str:
    revealed = {str(a): value_to_json(c.value) for a, c in constraints.items() if isinstance(c, EqualTo)}
    if not revealed:
        return CANNOT_PROVIDE
    full = {str(a): revealed.get(str(a)) for a in constraints}
    return json.dumps(full, sort_keys=True)


def scripted_responder(scenario: Scenario):
    def respond(question: ClarifyingQuestion) -> str:
        return render_answer(scripted_answer(scenario, question))

    return respond


def silent_responder(question: ClarifyingQuestion) -> str:
    """A user who never knows anything."""
    return CANNOT_PROVIDE


def next_request(scenario: Scenario, completed: int):
    if completed < len(scenario.requests):
        return scenario.requests[completed].query
    return COMPLETE


# ---------------------------------------------------------------------------
# Scripted oracles
# ---------------------------------------------------------------------------

def _question(qid, tool, params, target, text=None):
    text = text or f"Which {' and '.join(params)} should {tool} use?"
    return ClarifyingQuestion(qid, text, target, tuple(AspectId(tool, p) for p in params))


def scripted_oracles(scenario: Scenario, request_index: int, env: Environment, seed: int = 0) -> OracleSuite:
    """Table-driven oracles for one request of a scenario.

    Candidates start from the stated (or ground-truth) calls. Each open
    aspect with a small live domain is enumerated, the rest become Unknown.
    Questions cover each open aspect, one overlap of the first two and one
    distractor on a settled parameter.
    """
    req = scenario.requests[request_index]
    base = req.stated or req.ground_truth

    def propose_candidates(query, observations, toolkit):
        rng = random.Random(f"{seed}:{scenario.scenario_id}:{request_index}")
        out = []
        for call in base:
            open_params = [a.param for a in req.ambiguous if a.tool == call.tool]
            choices = []
            for p in open_params:
                dom = env.current_domain(call.tool, p)
                values = enumerate_values(dom) if domain_size(dom) <= ENUMERATE_MAX else None
                if values and len(values) >= 2:
                    values = list(values)
                    rng.shuffle(values)
                    choices.append(values)
                else:
                    choices.append([UNKNOWN])
            for combo in itertools.product(*choices):
                out.append(call.with_values(**dict(zip(open_params, combo))))
        return [c.with_id(f"c{i + 1}") for i, c in enumerate(out)]

    def propose_questions(query, candidates, observations):
        if not candidates:
            return []
        round_no = len(observations) + 1
        target = candidates[0].candidate_id
        qs = []
        for call in base:
            open_params = [a.param for a in req.ambiguous if a.tool == call.tool]
            if len(open_params) >= 2:
                qs.append((call.tool, open_params[:2]))
            qs.extend((call.tool, [p]) for p in open_params)
            settled = [p for p in call.assignments if p not in open_params]
            if open_params and settled:
                qs.append((call.tool, [settled[0]]))
        return [_question(f"t{round_no}q{i + 1}", tool, ps, target) for i, (tool, ps) in enumerate(qs)][:5]

    return OracleSuite(propose_candidates, propose_questions, json_interpreter, default_error_questioner)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

def simulate(
    scenario: Scenario,
    toolkit: Toolkit | None = None,
    oracles=None,
    env: Environment | None = None,
    config: EngineConfig | None = None,
    responder=None,
    seed: int = 0,
    on_event=None,
    stop_on_abort: bool = False,
) -> list:
    """Drive every request of ``scenario`` through the agent; one trace each.

    ``oracles`` may be an OracleSuite used for every request, a callable
    ``(scenario, index, env, seed) -> OracleSuite``, or None for the scripted
    ones. The per-request question budget is the smaller of the config's and
    the scenario's clarification limit.
    """
    env = env if env is not None else make_env(scenario.domain)
    toolkit = toolkit or env.toolkit()
    config = with_budget(config or EngineConfig(), scenario.tau_max)
    responder = responder or scripted_responder(scenario)
    traces = []
    history = ()
    completed = 0
    while (query := next_request(scenario, completed)) != COMPLETE:
        if oracles is None:
            suite = scripted_oracles(scenario, completed, env, seed)
        elif isinstance(oracles, OracleSuite):
            suite = oracles
        else:
            suite = oracles(scenario, completed, env, seed)
        trace = run_episode(query, toolkit, suite, env, config, responder, history, on_event)
        traces.append(trace)
        history = history + tuple(
            (e["question"], e["response"]) for e in trace.of_type("Answered")
        )
        completed += 1
        if stop_on_abort and trace.reason == "abort":
            break
    return traces


def request_status(trace: EpisodeTrace, tau_max: int) -> str:
    """``incomplete`` when the user could not help within the question limit."""
    answers = trace.of_type("Answered")
    unhelpful = all(c["type"] == "NoInformation" for e in answers for c in e["constraints"].values())
    if trace.asked >= tau_max and unhelpful:
        return "incomplete"
    if trace.executed_calls():
        return "executed"
    if trace.asked >= tau_max:
        return "incomplete"
    return "aborted"


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def _same_value(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return math.isclose(a, b, rel_tol=NUM_REL_TOL, abs_tol=0.0) or a == b
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(_same_value(x, y) for x, y in zip(a, b))
    return a == b


def param_matches(executed: Mapping, gold: CandidateCall) -> tuple:
    """(matching params, gold params) for one executed call object."""
    args = executed.get("arguments", {})
    names = list(gold.assignments)
    hits = sum(
        1 for p in names if p in args and _same_value(args[p], value_to_json(gold.assignments[p]))
    )
    return hits, len(names)


@dataclass
class ScenarioMetrics:
    scenario_id: str
    query_type: str
    gold_calls: int
    full_matches: int
    tool_matches: int
    param_fractions: list
    questions: int
    statuses: list

    def to_obj(self) -> dict:
        return {
            "id": self.scenario_id,
            "query_type": self.query_type,
            "gold_calls": self.gold_calls,
            "full_matches": self.full_matches,
            "tool_matches": self.tool_matches,
            "param_fractions": self.param_fractions,
            "questions": self.questions,
            "statuses": self.statuses,
        }


@dataclass
class MetricsReport:
    coverage: float
    tool_match_rate: float
    param_match_rate: float
    avg_questions: float
    scenarios: list

    def to_obj(self) -> dict:
        return {
            "coverage": self.coverage,
            "tool_match_rate": self.tool_match_rate,
            "param_match_rate": self.param_match_rate,
            "avg_questions": self.avg_questions,
            "scenarios": [s.to_obj() for s in self.scenarios],
        }

    def table(self) -> str:
        rows = [
            ("scenarios", f"{len(self.scenarios)}"),
            ("coverage", f"{self.coverage:.4f}"),
            ("tool match rate", f"{self.tool_match_rate:.4f}"),
            ("param match rate", f"{self.param_match_rate:.4f}"),
            ("avg questions", f"{self.avg_questions:.4f}"),
        ]
        width = max(len(k) for k, _ in rows)
        return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def score(traces: Sequence, scenarios: Sequence[Scenario]) -> MetricsReport:
    """Coverage, tool and parameter match rates and questions per scenario.

    ``traces[i]`` is the list of request traces for ``scenarios[i]``.
    Executed call j of a request is compared with ground-truth call j.
    """
    if len(traces) != len(scenarios):
        raise UsageError(f"{len(traces)} trace groups for {len(scenarios)} scenarios")
    per = []
    for group, sc in zip(traces, scenarios):
        if len(group) != len(sc.requests):
            raise UsageError(f"{sc.scenario_id}: {len(group)} traces for {len(sc.requests)} requests")
        m = ScenarioMetrics(sc.scenario_id, sc.query_type, 0, 0, 0, [], 0, [])
        for trace, req in zip(group, sc.requests):
            executed = trace.executed_calls()
            m.questions += trace.asked
            m.statuses.append(request_status(trace, sc.tau_max))
            for j, gold in enumerate(req.ground_truth):
                m.gold_calls += 1
                if j >= len(executed) or executed[j]["name"] != gold.tool:
                    continue
                m.tool_matches += 1
                hits, total = param_matches(executed[j], gold)
                frac = 1.0 if total == 0 else hits / total
                m.param_fractions.append(frac)
                if hits == total:
                    m.full_matches += 1
        per.append(m)
    gold = sum(m.gold_calls for m in per)
    fracs = [f for m in per for f in m.param_fractions]
    return MetricsReport(
        coverage=sum(m.full_matches for m in per) / gold if gold else 0.0,
        tool_match_rate=sum(m.tool_matches for m in per) / gold if gold else 0.0,
        param_match_rate=math.fsum(fracs) / len(fracs) if fracs else 0.0,
        avg_questions=sum(m.questions for m in per) / len(per) if per else 0.0,
        scenarios=per,
    )


def run_suite(scenarios: Sequence[Scenario], config: EngineConfig | None = None, seed: int = 0, responder=None):
    """Simulate every scenario on a fresh environment; (traces, report)."""
    traces = [simulate(sc, config=config, seed=seed, responder=responder) for sc in scenarios]
    return traces, score(traces, scenarios)


__all__ = [
    "CANNOT_PROVIDE",
    "COMPLETE",
    "MetricsReport",
    "QUERY_TYPES",
    "Request",
    "Scenario",
    "ScenarioMetrics",
    "dump_suite",
    "load_suite",
    "next_request",
    "param_matches",
    "render_answer",
    "request_status",
    "run_suite",
    "score",
    "scripted_answer",
    "scripted_oracles",
    "scripted_responder",
    "silent_responder",
    "simulate",
]
