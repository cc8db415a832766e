"""Shared machinery for simulated tool environments.

An environment owns mutable state, a static toolkit and a list of domain
update rules. Parameters flagged data-dependent get their current domain
from a rule's ``recompute(state)``; results are cached and dropped whenever a
tool matching one of the rule's triggers succeeds.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Mapping

from ..belief import AspectId
from ..schema import (
    EMPTY,
    UNKNOWN,
    Boolean,
    CandidateCall,
    EmptyDomain,
    EstimatedFinite,
    Finite,
    NumericRange,
    ParamSpec,
    Toolkit,
    UsageError,
    contains,
    value_to_json,
)

ERROR_KINDS = ("out-of-range", "invalid-enum", "missing-entity", "duplicate", "financial", "path")
# Not environment errors: the agent refuses to send a call with unresolved
# required parameters, and reports answers that rule out every candidate.
INCOMPLETE = "incomplete"
CONTRADICTION = "contradiction"
AGENT_KINDS = (INCOMPLETE, CONTRADICTION)


@dataclass(frozen=True)
class ExecutionResult:
    ok: bool
    kind: str | None = None
    message: str = ""
    params: tuple = ()
    output: Any = None

    @classmethod
    def success(cls, message: str = "", output: Any = None) -> "ExecutionResult":
        return cls(True, None, message, (), output)

    @classmethod
    def error(cls, kind: str, message: str, params=()) -> "ExecutionResult":
        if kind not in ERROR_KINDS and kind not in AGENT_KINDS:
            raise UsageError(f"unknown error kind {kind!r}")
        return cls(False, kind, message, tuple(params))

    def to_obj(self) -> dict:
        obj = {"ok": self.ok, "message": self.message}
        if not self.ok:
            obj["kind"] = self.kind
            obj["params"] = list(self.params)
        if self.output is not None:
            obj["output"] = _jsonable(self.output)
        return obj


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    return value_to_json(obj)


class ExecutionError(Exception):
    def __init__(self, kind: str, message: str, *params: str):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.params = params


@dataclass(frozen=True)
class DomainUpdateRule:
    trigger: str  # regular expression over tool names
    affected: tuple
    recompute: Callable[[dict], Any]
    description: str = ""

    def fires_on(self, tool: str) -> bool:
        return re.fullmatch(self.trigger, tool) is not None


def finite_or_empty(values) -> Any:
    vals = list(dict.fromkeys(values))
    return Finite(tuple(vals)) if vals else EMPTY


def P(name, domain, required=True, dep=False, default=False) -> ParamSpec:
    """Compact parameter constructor for toolkit tables."""
    return ParamSpec(name, domain, required=required, data_dependent=dep, has_default=default)


def load_json_resource(*parts: str):
    path = resources.files("clarify").joinpath("data", *parts)
    return json.loads(path.read_text(encoding="utf-8"))


class Environment:
    name = ""
    # (tool, param) pairs whose values name entities in state
    entity_params: frozenset = frozenset()
    # default values used for omitted optional parameters
    defaults: Mapping = {}
    # (tool, arguments) rows that succeed on the fixture state
    sample_table: tuple = ()

    def __init__(self, state: Mapping | None = None):
        self.state = copy.deepcopy(dict(state)) if state is not None else self.default_state()
        self._cache: dict = {}
        self.rules = tuple(self.build_rules())
        self._rule_for = {}
        for rule in self.rules:
            for aspect in rule.affected:
                self._rule_for[AspectId(*aspect)] = rule

    # -- to be provided by each domain ---------------------------------------

    @classmethod
    def toolkit(cls) -> Toolkit:
        raise NotImplementedError

    def build_rules(self) -> list:
        return []

    @classmethod
    def fixture(cls) -> dict:
        return load_json_resource("fixtures", f"{cls.name}.json")

    @classmethod
    def default_state(cls) -> dict:
        return copy.deepcopy(cls.fixture())

    @classmethod
    def samples(cls) -> list:
        return [CandidateCall(tool, args, f"s{i + 1}") for i, (tool, args) in enumerate(cls.sample_table)]

    def precheck(self, tool: str, args: dict) -> None:
        """Checks that run before domain validation (e.g. path syntax)."""

    # -- public API -----------------------------------------------------------

    def clone(self) -> "Environment":
        return type(self)(self.state)

    def current_domain(self, tool: str, param: str):
        spec = self.toolkit().tool(tool).param(param)
        if not spec.data_dependent:
            return spec.domain
        aspect = AspectId(tool, param)
        rule = self._rule_for.get(aspect)
        if rule is None:
            return spec.domain
        if aspect not in self._cache:
            self._cache[aspect] = rule.recompute(self.state)
        return self._cache[aspect]

    def execute(self, call: CandidateCall) -> ExecutionResult:
        schema = self.toolkit().tool(call.tool)
        for name, value in call.assignments.items():
            schema.param(name)
            if value is UNKNOWN:
                raise UsageError(f"{call.tool}.{name} is unresolved; execute needs a full call")
        args = dict(call.assignments)
        missing = [p.name for p in schema.params if p.required and p.name not in args]
        if missing:
            raise UsageError(f"{call.tool} is missing required parameters {missing}")
        snapshot = copy.deepcopy(self.state)
        try:
            self.precheck(call.tool, args)
            for name, value in args.items():
                dom = self.current_domain(call.tool, name)
                if not contains(dom, value):
                    kind = self._violation_kind(call.tool, name, dom)
                    raise ExecutionError(kind, f"{call.tool}.{name}={value!r} is not allowed ({kind})", name)
            defaults = {k: v for k, v in self.defaults.get(call.tool, {}).items() if schema.has_param(k)}
            full = {**defaults, **args}
            handler = getattr(self, "do_" + call.tool)
            output = handler(**full)
        except ExecutionError as exc:
            self.state = snapshot
            return ExecutionResult.error(exc.kind, exc.message, exc.params)
        for rule in self.rules:
            if rule.fires_on(call.tool):
                for aspect in rule.affected:
                    self._cache.pop(AspectId(*aspect), None)
        return ExecutionResult.success(f"{call.tool} succeeded", output)

    def _violation_kind(self, tool: str, param: str, dom) -> str:
        if (tool, param) in self.entity_params:
            return "missing-entity"
        if isinstance(dom, NumericRange):
            return "out-of-range"
        if isinstance(dom, EmptyDomain):
            return "missing-entity"
        if isinstance(dom, (Finite, Boolean, EstimatedFinite)):
            return "invalid-enum"
        return "invalid-enum"

    def snapshot(self) -> dict:
        return copy.deepcopy(self.state)
