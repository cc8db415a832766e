"""Rewards for tagged completions: format, tool accuracy and action choice.

Completions look like::

    <reasoning>
    ...
    </reasoning>
    <answer>
    <TOOLCALL>
    [{"name": "tool", "arguments": {"a": 1, "b": "<UNK>"}}]
    </TOOLCALL>
    </answer>

An ``<ASK>`` answer may hold a ``<TOOLCALL>`` candidate and a
``<question>`` block. In certainty mode the action reward is scaled by how
sure the candidate call is (for a call) or how unsure (for a question).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Mapping

from .belief import param_certainty
from .schema import UNKNOWN, CandidateCall, SchemaError, Toolkit, values_equal

TOOLCALL, ASK, REFUSE, DIRECTLY, UNPARSEABLE = "ToolCall", "Ask", "Refuse", "Directly", "Unparseable"
ACTIONS = (TOOLCALL, ASK, REFUSE, DIRECTLY, UNPARSEABLE)
TAGS = {TOOLCALL: "TOOLCALL", ASK: "ASK", REFUSE: "REFUSE", DIRECTLY: "DIRECTLY"}
MODES = ("baseline", "certainty")

FMT_PART = 0.5
XML_PER_BOUNDARY = 0.25
XML_TRAILING_PENALTY = 0.001
TOOL_EXACT, TOOL_ARGS_DIFFER, TOOL_NEITHER_OR_WRONG, TOOL_ONE_SIDED = 1.0, 0.75, 0.5, 0.0
CLS_FULL, CLS_SHORT, CLS_WRONG = 2.0, 1.5, 0.0
CLS_MIN_CHARS = 30
REFUSAL_WORDS = ("sorry", "unable", "impossible", "cannot", "can't", "not able")

_STRICT = re.compile(r"^<reasoning>\n.*?\n</reasoning>\n<answer>\n.*?\n</answer>\n$", re.DOTALL)
_SOFT = re.compile(r"<reasoning>.*?</reasoning>\s*<answer>.*?</answer>", re.DOTALL)
_BLOCK = r"<{0}>(.*?)</{0}>"
_LEADING = re.compile(r"^\s*<(TOOLCALL|ASK|REFUSE|DIRECTLY)>", re.IGNORECASE)


def normalize_action(name: str) -> str:
    """Accept ``ToolCall``, ``TOOLCALL``, ``<TOOLCALL>`` and friends."""
    key = str(name).strip().strip("<>").lower()
    for action in ACTIONS:
        if action.lower() == key:
            return action
    raise ValueError(f"unknown action {name!r}")


@dataclass(frozen=True)
class FormatFlags:
    xml_count: float = 0.0
    soft: bool = False
    strict: bool = False

    @property
    def reward(self) -> float:
        return self.xml_count + (FMT_PART if self.soft else 0.0) + (FMT_PART if self.strict else 0.0)


@dataclass(frozen=True)
class ParsedCompletion:
    action: str
    reasoning: str | None = None
    answer: str | None = None
    calls: tuple = ()
    question: str | None = None
    flags: FormatFlags = FormatFlags()
    leading_tag: str | None = None  # tag the answer opens with, if any
    content: str = ""  # text inside the leading tag block

    @property
    def predicted_call(self) -> CandidateCall | None:
        """The call that counts for accuracy: the first one, and only for tool calls."""
        return self.calls[0] if self.action == TOOLCALL and self.calls else None


def _block(tag: str, text: str) -> str | None:
    m = re.search(_BLOCK.format(tag), text, re.DOTALL)
    return m.group(1) if m else None


def xml_count(text: str) -> float:
    """0.25 per well-delimited block, minus 0.001 per trailing character."""
    score = 0.0
    if text.count("<reasoning>\n") == 1 and text.count("\n</reasoning>\n") == 1:
        score += XML_PER_BOUNDARY
    if text.count("<answer>\n") == 1 and text.count("\n</answer>") == 1:
        score += XML_PER_BOUNDARY
        tail = text.split("\n</answer>")[-1]
        tail = tail[1:] if tail.startswith("\n") else tail
        score -= XML_TRAILING_PENALTY * len(tail)
    return min(max(score, 0.0), 2 * XML_PER_BOUNDARY)


def parse_calls(payload: str) -> tuple:
    """Calls from a JSON list (or single object) of ``{"name", "arguments"}``."""
    obj = json.loads(payload)
    items = obj if isinstance(obj, list) else [obj]
    calls = []
    for i, item in enumerate(items):
        if not isinstance(item, Mapping) or "name" not in item:
            raise SchemaError("tool call entries need a name")
        calls.append(CandidateCall.from_obj(item, f"p{i + 1}"))
    return tuple(calls)


def parse_completion(text) -> ParsedCompletion:
    if not isinstance(text, str) or not text.strip():
        return ParsedCompletion(UNPARSEABLE)
    flags = FormatFlags(xml_count(text), bool(_SOFT.search(text)), bool(_STRICT.match(text)))
    reasoning = _block("reasoning", text)
    answer = _block("answer", text)
    body = answer if answer is not None else text
    m = _LEADING.match(body)
    if m:
        tag = m.group(1).upper()
        action = {v: k for k, v in TAGS.items()}[tag]
        inner = _block(m.group(1), body)
        content = (inner if inner is not None else body[m.end():]).strip()
        calls, question = (), None
        try:
            if action == TOOLCALL:
                calls = parse_calls(content)
            elif action == ASK:
                payload = _block("TOOLCALL", content)
                calls = parse_calls(payload) if payload is not None else ()
                q = _block("question", content)
                question = q.strip() if q is not None else content
        except (ValueError, SchemaError, KeyError, TypeError):
            if action == TOOLCALL or calls == ():
                return ParsedCompletion(UNPARSEABLE, reasoning, answer, flags=flags, leading_tag=tag, content=content)
        if action == TOOLCALL and not calls:
            return ParsedCompletion(UNPARSEABLE, reasoning, answer, flags=flags, leading_tag=tag, content=content)
        return ParsedCompletion(action, reasoning, answer, calls, question, flags, tag, content)
    # no leading tag: keyword heuristics over the answer text
    low = body.lower()
    calls = ()
    if "toolcall" in low:
        payload = _block("TOOLCALL", body)
        try:
            calls = parse_calls(payload) if payload is not None else ()
        except (ValueError, SchemaError, KeyError, TypeError):
            calls = ()
    if calls:
        action = TOOLCALL
    elif "?" in body:
        action = ASK
    elif any(w in low for w in REFUSAL_WORDS):
        action = REFUSE
    else:
        action = DIRECTLY
    return ParsedCompletion(action, reasoning, answer, calls, None, flags, None, body.strip())


def format_completion(action: str, calls=(), question: str | None = None, reasoning: str = "", text: str = "") -> str:
    """Render a completion in the exact template."""
    action = normalize_action(action)
    payload = json.dumps([{"name": c.tool, "arguments": c.to_obj()["arguments"]} for c in calls])
    if action == TOOLCALL:
        inner = f"<TOOLCALL>\n{payload}\n</TOOLCALL>"
    elif action == ASK:
        inner = "<ASK>\n"
        if calls:
            inner += f"<TOOLCALL>\n{payload}\n</TOOLCALL>\n"
        inner += f"<question>\n{question or text}\n</question>\n</ASK>"
    elif action in (REFUSE, DIRECTLY):
        inner = f"<{TAGS[action]}>\n{text}\n</{TAGS[action]}>"
    else:
        raise ValueError("cannot format an unparseable completion")
    reasoning = reasoning or "Checking each argument against what the user said."
    return f"<reasoning>\n{reasoning}\n</reasoning>\n<answer>\n{inner}\n</answer>\n"


# ---------------------------------------------------------------------------
# Components
# ---------------------------------------------------------------------------

def _same_call(a: CandidateCall, b: CandidateCall) -> bool:
    if a.tool != b.tool or set(a.assignments) != set(b.assignments):
        return False
    return all(values_equal(v, b.assignments[k]) for k, v in a.assignments.items())


def tool_reward(predicted: CandidateCall | None, gold: CandidateCall | None) -> float:
    if predicted is None and gold is None:
        return TOOL_NEITHER_OR_WRONG
    if predicted is None or gold is None:
        return TOOL_ONE_SIDED
    if predicted.tool != gold.tool:
        return TOOL_NEITHER_OR_WRONG
    return TOOL_EXACT if _same_call(predicted, gold) else TOOL_ARGS_DIFFER


def cls_reward(parsed: ParsedCompletion, gold_action: str) -> float:
    gold = normalize_action(gold_action)
    if gold == UNPARSEABLE or parsed.leading_tag != TAGS.get(gold):
        return CLS_WRONG
    return CLS_FULL if len(parsed.content) >= CLS_MIN_CHARS else CLS_SHORT


@dataclass(frozen=True)
class CertaintyResult:
    value: float
    diagnostics: tuple = ()


def call_certainty(call: CandidateCall, toolkit: Toolkit, epsilon: float = 1e-4) -> CertaintyResult:
    """Product over the call's arguments of 1, 1/|domain| or epsilon."""
    if call.tool not in toolkit:
        return CertaintyResult(1.0, (f"tool {call.tool!r} not in toolkit",))
    schema = toolkit.tool(call.tool)
    prod = 1.0
    notes = []
    for name, value in call.assignments.items():
        if not schema.has_param(name):
            notes.append(f"unknown argument {name!r} ignored")
            continue
        if value is UNKNOWN:
            prod *= param_certainty(call, name, schema.param(name).domain, epsilon, schema)
    return CertaintyResult(prod, tuple(notes))


def certainty_detail(parsed: ParsedCompletion, toolkit: Toolkit, epsilon: float = 1e-4) -> CertaintyResult:
    if parsed.action == TOOLCALL:
        return call_certainty(parsed.calls[0], toolkit, epsilon)
    if parsed.action == ASK:
        if not parsed.calls:
            return CertaintyResult(1.0, ("question carries no candidate call",))
        inner = call_certainty(parsed.calls[0], toolkit, epsilon)
        if inner.diagnostics and inner.value == 1.0 and parsed.calls[0].tool not in toolkit:
            return inner
        return CertaintyResult(1.0 - inner.value, inner.diagnostics)
    if parsed.action == UNPARSEABLE:
        return CertaintyResult(1.0, ("unparseable completion",))
    return CertaintyResult(1.0)


def certainty(parsed: ParsedCompletion, toolkit: Toolkit, epsilon: float = 1e-4) -> float:
    return certainty_detail(parsed, toolkit, epsilon).value


@dataclass(frozen=True)
class RewardBreakdown:
    action: str
    mode: str
    r_fmt: float
    r_tool: float
    r_cls_base: float
    cert: float
    r_cls_final: float
    total: float
    diagnostics: tuple = field(default=())

    def to_obj(self) -> dict:
        return {
            "action": self.action,
            "mode": self.mode,
            "r_fmt": self.r_fmt,
            "r_tool": self.r_tool,
            "r_cls_base": self.r_cls_base,
            "cert": self.cert,
            "r_cls_final": self.r_cls_final,
            "total": self.total,
            "diagnostics": list(self.diagnostics),
        }


def total_reward(
    parsed: ParsedCompletion,
    gold_action: str,
    gold_call: CandidateCall | None,
    mode: str,
    toolkit: Toolkit,
    epsilon: float = 1e-4,
) -> RewardBreakdown:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    r_fmt = parsed.flags.reward
    r_tool = tool_reward(parsed.predicted_call, gold_call)
    r_cls = cls_reward(parsed, gold_action)
    cert = certainty_detail(parsed, toolkit, epsilon)
    final = r_cls if mode == "baseline" else cert.value * r_cls
    return RewardBreakdown(
        parsed.action, mode, r_fmt, r_tool, r_cls, cert.value, final, math.fsum((r_fmt, r_tool, final)), cert.diagnostics
    )


def zero_breakdown(mode: str, note: str) -> RewardBreakdown:
    return RewardBreakdown(UNPARSEABLE, mode, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, (note,))


__all__ = [
    "ACTIONS",
    "ASK",
    "DIRECTLY",
    "FormatFlags",
    "MODES",
    "ParsedCompletion",
    "REFUSE",
    "RewardBreakdown",
    "TOOLCALL",
    "UNPARSEABLE",
    "call_certainty",
    "certainty",
    "cls_reward",
    "format_completion",
    "normalize_action",
    "parse_calls",
    "parse_completion",
    "tool_reward",
    "total_reward",
    "xml_count",
    "zero_breakdown",
]
