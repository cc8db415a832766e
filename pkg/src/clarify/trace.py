"""Episode traces: an ordered, line-delimited log of everything an episode did.

Each line is a JSON object with ``seq`` and ``type`` keys plus a payload.
Event types: CandidateSet, QuestionScored, Asked, Answered, BeliefSnapshot,
Executed, ErrorRecovery, Terminated. Keys are sorted so that identical
episodes serialize to identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

EVENT_TYPES = (
    "CandidateSet",
    "QuestionScored",
    "Asked",
    "Answered",
    "BeliefSnapshot",
    "Executed",
    "ErrorRecovery",
    "Terminated",
)
TERMINATION_REASONS = ("threshold", "low-score", "budget", "no-questions", "abort")


class TraceError(ValueError):
    pass


@dataclass
class EpisodeTrace:
    events: list = field(default_factory=list)
    # called with each event as it is added
    listener: Callable | None = field(default=None, compare=False, repr=False)

    def add(self, kind: str, **payload) -> dict:
        if kind not in EVENT_TYPES:
            raise TraceError(f"unknown event type {kind!r}")
        if self.terminated:
            raise TraceError("episode already terminated")
        if kind == "Terminated" and payload.get("reason") not in TERMINATION_REASONS:
            raise TraceError(f"bad termination reason {payload.get('reason')!r}")
        event = {"seq": len(self.events), "type": kind, **payload}
        self.events.append(event)
        if self.listener is not None:
            self.listener(event)
        return event

    def __iter__(self) -> Iterator[dict]:
        return iter(self.events)

    def of_type(self, kind: str) -> list:
        return [e for e in self.events if e["type"] == kind]

    @property
    def terminated(self) -> bool:
        return any(e["type"] == "Terminated" for e in self.events)

    @property
    def reason(self) -> str | None:
        term = self.of_type("Terminated")
        return term[0]["reason"] if term else None

    @property
    def asked(self) -> int:
        return len(self.of_type("Asked"))

    def executed_calls(self) -> list:
        """Calls the environment accepted, in order."""
        return [e["call"] for e in self.of_type("Executed") if e["result"]["ok"]]

    def check(self) -> None:
        term = [i for i, e in enumerate(self.events) if e["type"] == "Terminated"]
        if len(term) != 1 or term[0] != len(self.events) - 1:
            raise TraceError("a trace ends with exactly one Terminated event")
        if self.reason != "abort" and not any(e["type"] == "Executed" and e["result"]["ok"] for e in self.events):
            raise TraceError("non-abort termination without a successful execution")

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.events)

    @classmethod
    def from_jsonl(cls, text: str) -> "EpisodeTrace":
        events = []
        for i, line in enumerate(text.splitlines()):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceError(f"line {i + 1}: {exc.msg}") from exc
            if obj.get("type") not in EVENT_TYPES:
                raise TraceError(f"line {i + 1}: unknown event type {obj.get('type')!r}")
            events.append(obj)
        return cls(events)


def join_traces(traces: Iterable[EpisodeTrace]) -> str:
    return "".join(t.to_jsonl() for t in traces)
