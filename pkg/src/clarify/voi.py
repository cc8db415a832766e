"""Value-of-information scoring for clarifying questions.

A question targets a set of aspects. A perfect answer on those aspects
separates the live candidates into cells; the value of asking is the
expected best viability after learning the cell minus the best viability
now. Repeated questioning on the same aspects is penalized linearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .belief import AspectId, BeliefState, DegenerateBelief, EngineConfig, id_key
from .schema import UNKNOWN, Toolkit, UsageError, value_key


@dataclass(frozen=True)
class ClarifyingQuestion:
    question_id: str
    text: str
    target_candidate: str
    aspects: tuple

    def __post_init__(self):
        aspects = tuple(a if isinstance(a, AspectId) else AspectId(*a) for a in self.aspects)
        if not aspects:
            raise UsageError(f"question {self.question_id} targets no aspects")
        # keep first occurrence order, drop repeats
        object.__setattr__(self, "aspects", tuple(dict.fromkeys(aspects)))

    def check(self, toolkit: Toolkit) -> None:
        for a in self.aspects:
            toolkit.tool(a.tool).param(a.param)

    def to_obj(self) -> dict:
        return {
            "id": self.question_id,
            "text": self.text,
            "target": self.target_candidate,
            "aspects": [str(a) for a in self.aspects],
        }


@dataclass(frozen=True)
class Partition:
    cells: tuple

    def __post_init__(self):
        cells = tuple(tuple(c) for c in self.cells)
        seen = set()
        for cell in cells:
            if not cell:
                raise UsageError("partition cells must be non-empty")
            for cid in cell:
                if cid in seen:
                    raise UsageError(f"candidate {cid} appears in two cells")
                seen.add(cid)
        object.__setattr__(self, "cells", cells)

    def as_sets(self) -> set:
        return {frozenset(c) for c in self.cells}


def induce_partition(state: BeliefState, aspects: Iterable[AspectId]) -> Partition:
    """Group live candidates by what a perfect answer on ``aspects`` would reveal.

    Candidates with identical specified values share a cell, a candidate that
    is unresolved on any targeted aspect stands alone, and candidates whose
    tool carries none of the aspects are grouped by tool.
    """
    aspects = tuple(aspects)
    if not aspects:
        raise UsageError("cannot partition on an empty aspect set")
    live = state.live()
    if not live:
        raise DegenerateBelief("no live candidates to partition")
    groups: dict = {}
    for cand in live:
        schema = state.toolkit.tool(cand.tool)
        relevant = [a.param for a in aspects if a.tool == cand.tool and schema.has_param(a.param)]
        if not relevant:
            key = ("tool", cand.tool)
        else:
            values = [cand.value(p) for p in relevant]
            if any(v is UNKNOWN for v in values):
                key = ("solo", cand.candidate_id)
            else:
                key = ("values", cand.tool, tuple(value_key(v) for v in values))
        groups.setdefault(key, []).append(cand.candidate_id)
    return Partition(tuple(groups.values()))


def _total(values: Sequence):
    # fsum keeps float results monotone under refinement; exact types use sum
    if all(isinstance(v, float) for v in values):
        return math.fsum(values)
    return sum(values)


def evpi_from_partition(weights: Mapping, cells: Iterable[Iterable[str]]):
    """Sum of per-cell best viabilities minus the global best viability."""
    cells = [tuple(c) for c in cells]
    if not cells:
        return 0.0
    maxes = [max(weights[cid] for cid in cell) for cell in cells]
    return _total(maxes) - max(maxes)


def evpi(question: ClarifyingQuestion, state: BeliefState) -> float:
    partition = induce_partition(state, question.aspects)
    return evpi_from_partition(state.weights, partition.cells)


def cost(question: ClarifyingQuestion, state: BeliefState, lam: float) -> float:
    return lam * sum(state.count(a) for a in question.aspects)


@dataclass(frozen=True)
class QuestionScore:
    question: ClarifyingQuestion
    evpi: float
    cost: float

    @property
    def score(self) -> float:
        return self.evpi - self.cost

    def to_obj(self) -> dict:
        return {
            "question": self.question.question_id,
            "aspects": [str(a) for a in self.question.aspects],
            "evpi": self.evpi,
            "cost": self.cost,
            "score": self.score,
        }


def score_questions(questions: Iterable[ClarifyingQuestion], state: BeliefState, config: EngineConfig) -> list:
    return [QuestionScore(q, evpi(q, state), cost(q, state, config.lam)) for q in questions]


def best_of(scores: Sequence[QuestionScore]) -> QuestionScore | None:
    if not scores:
        return None
    return min(scores, key=lambda s: (-s.score, id_key(s.question.question_id)))


def select_question(questions: Iterable[ClarifyingQuestion], state: BeliefState, config: EngineConfig):
    """Highest-scoring question and its score, or None when there are none."""
    best = best_of(score_questions(questions, state, config))
    if best is None:
        return None
    return best.question, best.score


@dataclass(frozen=True)
class Decision:
    kind: str  # execute | ask | abort
    candidate_id: str | None = None
    question_id: str | None = None
    reason: str = ""


def stop_reference(state: BeliefState, config: EngineConfig) -> float:
    """Viability the low-score stop rule is compared against."""
    if config.stop_basis == "normalized":
        return state.max_normalized()
    return max((w for c, w in state.weights.items() if w > 0), default=0.0)


def decide(state: BeliefState, best, config: EngineConfig) -> Decision:
    """Execute, ask or abort given the best available question score.

    ``best`` may be None, a number, a ``(question, score)`` pair or a
    :class:`QuestionScore`.
    """
    question_id = None
    if isinstance(best, QuestionScore):
        question_id, score = best.question.question_id, best.score
    elif isinstance(best, tuple):
        question_id, score = best[0].question_id, best[1]
    else:
        score = best
    top = state.argmax()
    if top is None:
        return Decision("abort", reason="abort")
    if state.max_normalized() >= config.tau_exec:
        return Decision("execute", top, reason="threshold")
    if score is None:
        return Decision("execute", top, reason="no-questions")
    if score < config.alpha * stop_reference(state, config):
        return Decision("execute", top, reason="low-score")
    if state.step >= config.max_questions:
        return Decision("execute", top, reason="budget")
    return Decision("ask", top, question_id, reason="ask")
