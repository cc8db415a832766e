"""Belief states over candidate tool calls.

A belief state holds the candidate calls, a working domain for every
(candidate, parameter) pair, unnormalized viabilities, their normalization,
per-aspect question counts and the observation log. States are values:
every update returns a new state.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Any, Callable, Iterable, Mapping, NamedTuple

from .schema import (
    EMPTY,
    NO_INFO,
    CandidateCall,
    EmptyDomain,
    Finite,
    Toolkit,
    UNKNOWN,
    UsageError,
    contains,
    domain_size,
    domain_to_obj,
    enumerate_values,
    intersect_domain,
    satisfies,
    value_to_json,
)


class DegenerateBelief(ValueError):
    """No candidate carries positive weight."""


class ContradictoryResponse(ValueError):
    """A response eliminated every remaining candidate."""


class AspectId(NamedTuple):
    tool: str
    param: str

    def __str__(self) -> str:
        return f"{self.tool}.{self.param}"

    @classmethod
    def parse(cls, text: str) -> "AspectId":
        tool, sep, param = text.partition(".")
        if not sep or not tool or not param:
            raise UsageError(f"aspect must look like tool.param, got {text!r}")
        return cls(tool, param)


STOP_BASES = ("unnormalized", "normalized")


@dataclass(frozen=True)
class EngineConfig:
    lam: float = 0.5
    alpha: float = 0.1
    epsilon: float = 1e-4
    tau_exec: float = 0.95
    max_questions: int = 5
    # which viability the low-score stop compares against
    stop_basis: str = "unnormalized"
    max_retries: int = 2
    questions_per_round: int = 5

    def __post_init__(self):
        for name in ("lam", "alpha"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise UsageError(f"{name} must be finite and nonnegative, got {v}")
        if not 0 < self.epsilon < 1:
            raise UsageError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.tau_exec <= 1:
            raise UsageError(f"tau_exec must lie in (0, 1], got {self.tau_exec}")
        if int(self.max_questions) != self.max_questions or self.max_questions < 1:
            raise UsageError(f"max_questions must be a positive integer, got {self.max_questions}")
        if self.stop_basis not in STOP_BASES:
            raise UsageError(f"stop_basis must be one of {STOP_BASES}")
        if self.max_retries < 0 or self.questions_per_round < 1:
            raise UsageError("max_retries must be >= 0 and questions_per_round >= 1")

    def to_obj(self) -> dict:
        return {
            "lambda": self.lam,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "tau_exec": self.tau_exec,
            "max_questions": self.max_questions,
            "stop_basis": self.stop_basis,
            "max_retries": self.max_retries,
            "questions_per_round": self.questions_per_round,
        }


_ID_CHUNK = re.compile(r"(\d+)")


def id_key(identifier: str) -> tuple:
    """Natural sort key so that ``c2`` orders before ``c10``."""
    parts = _ID_CHUNK.split(identifier)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p)


@dataclass(frozen=True)
class Observation:
    question_id: str
    aspects: tuple
    constraints: tuple
    response: str = ""

    def to_obj(self) -> dict:
        return {
            "question_id": self.question_id,
            "aspects": [str(a) for a in self.aspects],
            "constraints": {str(a): constraint_to_obj(c) for a, c in self.constraints},
            "response": self.response,
        }


def constraint_to_obj(constraint) -> dict:
    name = type(constraint).__name__
    if hasattr(constraint, "value"):
        return {"type": name, "value": value_to_json(constraint.value)}
    if hasattr(constraint, "values"):
        return {"type": name, "values": [value_to_json(v) for v in constraint.values]}
    if hasattr(constraint, "lo"):
        return {"type": name, "lo": constraint.lo, "hi": constraint.hi}
    return {"type": name}


def _freeze(mapping: Mapping) -> Mapping:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class BeliefState:
    toolkit: Toolkit
    candidates: tuple
    domains: Mapping
    weights: Mapping
    normalized: Mapping
    aspect_counts: Mapping = field(default_factory=dict)
    observations: tuple = ()
    step: int = 0
    epsilon: float = 1e-4

    def __post_init__(self):
        for name in ("domains", "weights", "normalized", "aspect_counts"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "observations", tuple(self.observations))

    # -- lookups -----------------------------------------------------------

    def candidate(self, candidate_id: str) -> CandidateCall:
        for c in self.candidates:
            if c.candidate_id == candidate_id:
                return c
        raise UsageError(f"unknown candidate {candidate_id!r}")

    def domain(self, candidate_id: str, param: str):
        try:
            return self.domains[(candidate_id, param)]
        except KeyError:
            raise UsageError(f"no working domain for {candidate_id}.{param}") from None

    def live(self) -> tuple:
        return tuple(c for c in self.candidates if self.weights.get(c.candidate_id, 0.0) > 0)

    def count(self, aspect: AspectId) -> int:
        return self.aspect_counts.get(aspect, 0)

    def max_weight(self) -> float:
        return max(self.weights.values(), default=0.0)

    def max_normalized(self) -> float:
        return max(self.normalized.values(), default=0.0)

    def argmax(self) -> str | None:
        """Best live candidate by normalized belief, ties to the lowest id."""
        live = self.live()
        if not live:
            return None
        best = min(
            live,
            key=lambda c: (
                -self.normalized.get(c.candidate_id, 0.0),
                -self.weights[c.candidate_id],
                id_key(c.candidate_id),
            ),
        )
        return best.candidate_id

    # -- updates that are not responses -------------------------------------

    def reopen(self, candidate_id: str, params: Iterable[str], domain_fn: Callable | None = None) -> "BeliefState":
        """Forget the values of ``params`` on one candidate (after a failed execution)."""
        cand = self.candidate(candidate_id)
        schema = self.toolkit.tool(cand.tool)
        updates = {}
        domains = dict(self.domains)
        for p in params:
            spec = schema.param(p)
            dom = domain_fn(cand.tool, p) if domain_fn else spec.domain
            updates[p] = _only_value(dom)
            domains[(candidate_id, p)] = Finite((updates[p],)) if updates[p] is not UNKNOWN else dom
        new_cand = cand.with_values(**updates)
        cands = tuple(new_cand if c.candidate_id == candidate_id else c for c in self.candidates)
        state = replace(self, candidates=cands, domains=domains)
        weights = dict(state.weights)
        if weights.get(candidate_id, 0.0) > 0:
            weights[candidate_id] = _viability(new_cand, state, state.epsilon)
        return _normalized(replace(state, weights=weights))

    def record_unusable(self, question, response: str = "") -> "BeliefState":
        """Bookkeeping for an asked question whose answer could not be applied."""
        counts = dict(self.aspect_counts)
        for a in question.aspects:
            counts[a] = counts.get(a, 0) + 1
        obs = Observation(question.question_id, tuple(question.aspects), (), response)
        return replace(self, aspect_counts=counts, observations=self.observations + (obs,), step=self.step + 1)

    # -- serialization -------------------------------------------------------

    def to_obj(self) -> dict:
        return {
            "step": self.step,
            "candidates": [
                {
                    **c.to_obj(),
                    "weight": self.weights.get(c.candidate_id, 0.0),
                    "belief": self.normalized.get(c.candidate_id, 0.0),
                    "domains": {
                        p: domain_to_obj(self.domains[(c.candidate_id, p)])
                        for p in self.toolkit.tool(c.tool).param_names
                        if (c.candidate_id, p) in self.domains
                    },
                }
                for c in self.candidates
            ],
            "aspect_counts": {str(a): n for a, n in sorted(self.aspect_counts.items())},
        }


# ---------------------------------------------------------------------------
# Certainty and viability
# ---------------------------------------------------------------------------

def param_certainty(call: CandidateCall, param: str, working_domain, epsilon: float, schema=None) -> float:
    """1 for a specified value, 1/n over a finite working domain, epsilon if unbounded.

    Finite certainties are floored at epsilon so that narrowing an unbounded
    domain to a very large finite one never lowers certainty.
    """
    known = schema.has_param(param) if schema is not None else param in call.assignments
    if not known:
        raise UsageError(f"{call.tool} has no parameter {param!r}")
    if call.is_specified(param):
        return 1.0
    n = domain_size(working_domain)
    if n == 0:
        return 0.0
    if math.isinf(n):
        return epsilon
    return max(1.0 / n, epsilon)


def counted_params(call: CandidateCall, toolkit: Toolkit) -> tuple:
    """Parameters whose certainty enters the viability product.

    Optional parameters with a declared default fall back to that default
    while unresolved, so they only count once a value is assigned (factor 1).
    """
    schema = toolkit.tool(call.tool)
    return tuple(p.name for p in schema.params if p.required or not p.has_default)


def _viability(call: CandidateCall, state: BeliefState, epsilon: float) -> float:
    schema = state.toolkit.tool(call.tool)
    prod = 1.0
    for p in counted_params(call, state.toolkit):
        prod *= param_certainty(call, p, state.domains[(call.candidate_id, p)], epsilon, schema)
    return prod


def viability(call: CandidateCall, state: BeliefState, config: EngineConfig | None = None) -> float:
    epsilon = config.epsilon if config is not None else state.epsilon
    if call.candidate_id not in state.weights:
        raise UsageError(f"candidate {call.candidate_id!r} is not in the belief state")
    return _viability(call, state, epsilon)


def normalize(state: BeliefState) -> BeliefState:
    total = math.fsum(state.weights.values())
    if not state.weights or total <= 0:
        raise DegenerateBelief("all candidate weights are zero")
    return replace(state, normalized={k: w / total for k, w in state.weights.items()})


def _normalized(state: BeliefState) -> BeliefState:
    try:
        return normalize(state)
    except DegenerateBelief:
        return replace(state, normalized={k: 0.0 for k in state.weights})


def _only_value(domain):
    """The single admissible value of a one-element domain, else UNKNOWN."""
    if domain_size(domain) != 1:
        return UNKNOWN
    values = enumerate_values(domain)
    return values[0] if values else UNKNOWN


def initial_belief(
    candidates: Iterable[CandidateCall],
    toolkit: Toolkit,
    epsilon: float = 1e-4,
    domain_fn: Callable | None = None,
) -> BeliefState:
    """Build the starting belief; ``domain_fn(tool, param)`` supplies live domains."""
    cands = tuple(candidates)
    ids = [c.candidate_id for c in cands]
    if len(set(ids)) != len(ids):
        raise UsageError("candidate ids must be unique")
    domains = {}
    collapsed = []
    for c in cands:
        schema = toolkit.tool(c.tool)
        for name in c.assignments:
            schema.param(name)
        assigned = {}
        for spec in schema.params:
            base = domain_fn(c.tool, spec.name) if domain_fn else spec.domain
            value = c.value(spec.name)
            if value is UNKNOWN and (spec.name in c.assignments or not spec.has_default):
                value = assigned[spec.name] = _only_value(base)
            if value is not UNKNOWN and contains(base, value):
                base = Finite((value,))
            domains[(c.candidate_id, spec.name)] = base
        collapsed.append(c.with_values(**{k: v for k, v in assigned.items() if v is not UNKNOWN}))
    cands = tuple(collapsed)
    state = BeliefState(toolkit, cands, domains, {i: 0.0 for i in ids}, {i: 0.0 for i in ids}, epsilon=epsilon)
    weights = {c.candidate_id: _viability(c, state, epsilon) for c in cands}
    return normalize(replace(state, weights=weights))


def apply_response(state: BeliefState, question, constraints: Mapping, response: str = "") -> BeliefState:
    """Propagate a response's constraints through every live candidate."""
    targets = tuple(question.aspects)
    stray = [a for a in constraints if a not in targets]
    if stray:
        raise UsageError(f"constraints on untargeted aspects: {[str(a) for a in stray]}")
    domains = dict(state.domains)
    weights = dict(state.weights)
    cands = []
    for cand in state.candidates:
        cid = cand.candidate_id
        if weights.get(cid, 0.0) <= 0:
            cands.append(cand)
            continue
        schema = state.toolkit.tool(cand.tool)
        assigned = {}
        alive = True
        for aspect in targets:
            if aspect.tool != cand.tool or not schema.has_param(aspect.param):
                continue
            constraint = constraints.get(aspect, NO_INFO)
            key = (cid, aspect.param)
            narrowed = intersect_domain(domains[key], constraint)
            value = cand.value(aspect.param)
            if isinstance(narrowed, EmptyDomain) or not satisfies(value, constraint):
                alive = False
                break
            domains[key] = narrowed
            if value is UNKNOWN and isinstance(narrowed, Finite) and len(narrowed.values) == 1:
                assigned[aspect.param] = narrowed.values[0]
        if not alive:
            weights[cid] = 0.0
            cands.append(cand)
            continue
        cands.append(cand.with_values(**assigned) if assigned else cand)
    counts = dict(state.aspect_counts)
    for a in targets:
        counts[a] = counts.get(a, 0) + 1
    obs = Observation(
        question.question_id,
        targets,
        tuple((a, constraints.get(a, NO_INFO)) for a in targets),
        response,
    )
    new = replace(
        state,
        candidates=tuple(cands),
        domains=domains,
        aspect_counts=counts,
        observations=state.observations + (obs,),
        step=state.step + 1,
    )
    for cand in new.candidates:
        if weights.get(cand.candidate_id, 0.0) > 0:
            weights[cand.candidate_id] = _viability(cand, new, state.epsilon)
    new = replace(new, weights=weights)
    if not any(w > 0 for w in weights.values()):
        raise ContradictoryResponse(f"response to {question.question_id} eliminated every candidate")
    return normalize(new)


def belief_from_weights(weights: Mapping[str, float], toolkit: Toolkit | None = None) -> BeliefState:
    """Bare state carrying only weights, handy for scoring experiments.

    Candidates are argument-free placeholders, so lookups by id and argmax work.
    """
    toolkit = toolkit or Toolkit(())
    cands = tuple(CandidateCall("placeholder", {}, cid) for cid in weights)
    return _normalized(BeliefState(toolkit, cands, {}, dict(weights), {k: 0.0 for k in weights}))


__all__ = [
    "AspectId",
    "BeliefState",
    "ContradictoryResponse",
    "DegenerateBelief",
    "EMPTY",
    "EngineConfig",
    "Observation",
    "apply_response",
    "belief_from_weights",
    "constraint_to_obj",
    "counted_params",
    "id_key",
    "initial_belief",
    "normalize",
    "param_certainty",
    "viability",
]
