"""The clarify-or-execute loop.

Each round either executes the most believable candidate or asks the
question with the best value-of-information score. A failed execution
reopens the offending parameters and forces one targeted recovery
question before normal scoring resumes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping

from .belief import (
    AspectId,
    BeliefState,
    ContradictoryResponse,
    EngineConfig,
    apply_response,
    constraint_to_obj,
    initial_belief,
)
from .envs.base import CONTRADICTION, INCOMPLETE, Environment, ExecutionResult
from .schema import (
    NO_INFO,
    UNKNOWN,
    CandidateCall,
    DomainTypeError,
    EqualTo,
    NotIn,
    Range,
    SchemaError,
    Toolkit,
    UsageError,
    value_from_json,
)
from .trace import EpisodeTrace
from .voi import ClarifyingQuestion, best_of, decide, score_questions


@dataclass(frozen=True)
class OracleSuite:
    # (query, observations, toolkit) -> list of CandidateCall
    candidate_proposer: Callable
    # (query, candidates, observations) -> list of ClarifyingQuestion
    question_proposer: Callable
    # (response text, targeted aspects) -> {AspectId: Constraint}
    response_interpreter: Callable
    # (ExecutionResult, CandidateCall) -> ClarifyingQuestion
    error_questioner: Callable


# ---------------------------------------------------------------------------
# Reference oracle pieces that do not depend on a scenario
# ---------------------------------------------------------------------------

def json_interpreter(response: str, aspects: Iterable[AspectId]) -> dict:
    """Read ``{"tool.param": value | null}``; anything else says nothing."""
    aspects = tuple(aspects)
    try:
        obj = json.loads(response)
    except (TypeError, ValueError):
        obj = None
    if not isinstance(obj, dict):
        return {a: NO_INFO for a in aspects}
    out = {}
    for a in aspects:
        raw = obj.get(str(a))
        try:
            out[a] = NO_INFO if raw is None else EqualTo(value_from_json(raw))
        except SchemaError:
            out[a] = NO_INFO
    return out


_SKIP = {"skip", "pass", "don't know", "dont know", "no idea", "whatever", "any", ""}
_RANGE_RE = re.compile(r"(?:between\s+)?(-?\d+(?:\.\d+)?)\s*(?:-|to|and|\.\.)\s*(-?\d+(?:\.\d+)?)$")
_NUM_RE = re.compile(r"-?\d+(?:\.\d+)?$")


def _literal(text: str):
    text = text.strip().strip("'\"")
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if _NUM_RE.match(text):
        return float(text) if "." in text else int(text)
    return text


def keyword_interpreter(response: str, aspects: Iterable[AspectId]) -> dict:
    """Regex reading of free text for the interactive loop.

    Per aspect: ``param=value`` or ``param: value``; otherwise when one aspect
    is targeted, the whole answer is the value. ``not X`` excludes, ``a to b``
    is a numeric range, and ``skip`` says nothing.
    """
    aspects = tuple(aspects)
    text = (response or "").strip()
    pieces = {}
    for part in re.split(r"[;,]\s*(?=\w+\s*[=:])", text):
        m = re.match(r"\s*([\w.]+)\s*[=:]\s*(.+)$", part)
        if m:
            pieces[m.group(1).split(".")[-1]] = m.group(2).strip()
    if not pieces and len(aspects) == 1:
        pieces[aspects[0].param] = text
    out = {}
    for a in aspects:
        raw = pieces.get(a.param)
        out[a] = NO_INFO if raw is None else _parse_constraint(raw)
    return out


def _parse_constraint(raw: str):
    low = raw.lower().strip()
    if low in _SKIP:
        return NO_INFO
    if low.startswith("not "):
        return NotIn(tuple(_literal(v) for v in raw[4:].split("|")))
    m = _RANGE_RE.match(low)
    if m:
        lo, hi = sorted((float(m.group(1)), float(m.group(2))))
        return Range(lo, hi)
    value = _literal(raw)
    if isinstance(value, str) and value.startswith("[") and value.endswith("]"):
        try:
            return EqualTo(value_from_json(json.loads(value)))
        except (ValueError, SchemaError):
            pass
    return EqualTo(value)


def default_error_questioner(result: ExecutionResult, candidate: CandidateCall) -> ClarifyingQuestion:
    """Ask about the parameters the error names, or the whole call if none."""
    params = [p for p in result.params if p in candidate.assignments] or list(candidate.assignments)
    if not params:
        params = list(result.params)
    what = " and ".join(params)
    text = f"{candidate.tool} failed ({result.kind}: {result.message}). What should {what} be?"
    return ClarifyingQuestion(
        f"err-{candidate.candidate_id}-{'-'.join(params)}",
        text,
        candidate.candidate_id,
        tuple(AspectId(candidate.tool, p) for p in params),
    )


# ---------------------------------------------------------------------------
# Episode loop
# ---------------------------------------------------------------------------

def _executable(candidate: CandidateCall, toolkit: Toolkit) -> tuple:
    """Drop unresolved optional params; report unresolved required ones."""
    schema = toolkit.tool(candidate.tool)
    args = {}
    unresolved = []
    for spec in schema.params:
        value = candidate.value(spec.name)
        if value is not UNKNOWN:
            args[spec.name] = value
        elif spec.required:
            unresolved.append(spec.name)
    return CandidateCall(candidate.tool, args, candidate.candidate_id), tuple(unresolved)


def _snapshot(trace: EpisodeTrace, state: BeliefState) -> None:
    trace.add("BeliefSnapshot", belief=state.to_obj())


def run_episode(
    query: str,
    toolkit: Toolkit,
    oracles: OracleSuite,
    env: Environment,
    config: EngineConfig,
    responder: Callable,
    history: Iterable = (),
    on_event: Callable | None = None,
) -> EpisodeTrace:
    """Run one request to completion and return its trace.

    ``responder(question)`` returns the user's text, or None to quit.
    ``history`` carries observations from earlier requests in a conversation.
    ``on_event`` sees each trace event as it happens.
    """
    if len(toolkit) == 0:
        raise UsageError("run_episode needs a non-empty toolkit")
    history = tuple(history)
    trace = EpisodeTrace(listener=on_event)
    candidates = list(oracles.candidate_proposer(query, history, toolkit))
    trace.add("CandidateSet", query=query, candidates=[c.to_obj() for c in candidates])
    if not candidates:
        trace.add("Terminated", reason="abort", detail="no candidate calls proposed")
        return trace
    state = initial_belief(candidates, toolkit, config.epsilon, env.current_domain)
    _snapshot(trace, state)

    retries = 0
    recovery = None
    rnd = 0
    while True:
        rnd += 1
        if recovery is not None:
            scores = score_questions([recovery], state, config)
            trace.add("QuestionScored", round=rnd, scores=[s.to_obj() for s in scores], recovery=True)
            if state.step >= config.max_questions:
                trace.add("Terminated", reason="abort", detail="question budget spent during error recovery")
                return trace
            best = scores[0]
            decision = None
            recovery = None
        elif state.max_normalized() >= config.tau_exec:
            decision = decide(state, None, config)
        else:
            live = state.live()
            questions = list(oracles.question_proposer(query, live, history + state.observations))
            questions = questions[: config.questions_per_round]
            scores = score_questions(questions, state, config)
            trace.add("QuestionScored", round=rnd, scores=[s.to_obj() for s in scores])
            best = best_of(scores)
            decision = decide(state, best, config)

        if decision is not None and decision.kind == "abort":
            trace.add("Terminated", reason="abort", detail="no live candidates")
            return trace

        if decision is not None and decision.kind == "execute":
            candidate = state.candidate(decision.candidate_id)
            call, unresolved = _executable(candidate, toolkit)
            if unresolved:
                result = ExecutionResult.error(
                    INCOMPLETE, f"unresolved required parameters {list(unresolved)}", unresolved
                )
            else:
                result = env.execute(call)
            trace.add("Executed", call=call.to_obj(), result=result.to_obj(), reason=decision.reason)
            if result.ok:
                trace.add("Terminated", reason=decision.reason)
                return trace
            retries += 1
            if retries > config.max_retries:
                trace.add("Terminated", reason="abort", detail="error recovery retry limit reached")
                return trace
            question = oracles.error_questioner(result, candidate)
            trace.add("ErrorRecovery", error=result.to_obj(), question=question.to_obj())
            schema = toolkit.tool(candidate.tool)
            reopened = [p for p in result.params if schema.has_param(p) and candidate.is_specified(p)]
            if reopened:
                state = state.reopen(candidate.candidate_id, reopened, env.current_domain)
                _snapshot(trace, state)
            recovery = question
            continue

        question = best.question
        trace.add("Asked", round=rnd, question=question.to_obj(), score=best.to_obj())
        response = responder(question)
        if response is None:
            trace.add("Terminated", reason="abort", detail="user ended the conversation")
            return trace
        constraints = oracles.response_interpreter(response, question.aspects)
        trace.add(
            "Answered",
            question=question.question_id,
            response=response,
            constraints={str(a): constraint_to_obj(c) for a, c in constraints.items()},
        )
        try:
            state = apply_response(state, question, constraints, response)
        except (ContradictoryResponse, DomainTypeError) as exc:
            state = state.record_unusable(question, response)
            retries += 1
            if retries > config.max_retries:
                trace.add("Terminated", reason="abort", detail="error recovery retry limit reached")
                return trace
            top = state.candidate(state.argmax())
            params = tuple(a.param for a in question.aspects if a.tool == top.tool)
            error = ExecutionResult.error(CONTRADICTION, str(exc), params)
            recovery = oracles.error_questioner(error, top)
            trace.add("ErrorRecovery", error=error.to_obj(), question=recovery.to_obj())
        _snapshot(trace, state)


def with_budget(config: EngineConfig, budget: int | None) -> EngineConfig:
    """Config whose question budget is also capped by ``budget``."""
    if budget is None or budget >= config.max_questions:
        return config
    return replace(config, max_questions=budget)


__all__ = [
    "OracleSuite",
    "default_error_questioner",
    "json_interpreter",
    "keyword_interpreter",
    "run_episode",
    "with_budget",
]
