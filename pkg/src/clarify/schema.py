"""Toolkit schemas, parameter domains, constraints and partial tool calls.

Values are plain Python objects: ``str`` for text, ``int``/``float`` for
numbers, ``bool`` for booleans and ``tuple`` for lists. ``UNKNOWN`` marks a
parameter whose value has not been determined yet (rendered as ``<UNK>``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping, Union

UNK_TOKEN = "<UNK>"

# NotIn over an integer range enumerates the survivors when the range is at
# most this wide; wider ranges only get their endpoints trimmed.
ENUMERATE_LIMIT = 256


class SchemaError(ValueError):
    """A toolkit or domain violates a structural invariant."""


class ToolkitParseError(SchemaError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UsageError(ValueError):
    """An operation was called with arguments outside its contract."""


class DomainTypeError(TypeError):
    """A constraint cannot be applied to a domain of this variant."""


class _Unknown:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return UNK_TOKEN

    def __reduce__(self):
        return (_Unknown, ())


UNKNOWN = _Unknown()


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------

def value_kind(value: Any) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "text"
    if isinstance(value, (tuple, list)):
        return "list"
    raise SchemaError(f"unsupported value {value!r}")


def normalize_value(value: Any) -> Any:
    """Convert lists to tuples and check list homogeneity."""
    if value is UNKNOWN:
        return value
    kind = value_kind(value)
    if kind == "number" and isinstance(value, float) and not math.isfinite(value):
        raise SchemaError(f"non-finite number {value!r}")
    if kind != "list":
        return value
    items = tuple(normalize_value(v) for v in value)
    kinds = {value_kind(v) for v in items}
    if len(kinds) > 1:
        raise SchemaError(f"list elements mix variants: {sorted(kinds)}")
    return items


def value_key(value: Any) -> tuple:
    """Hashable identity that keeps booleans apart from numbers."""
    kind = value_kind(value)
    if kind == "list":
        return ("list", tuple(value_key(v) for v in value))
    if kind == "number":
        return ("number", float(value))
    return (kind, value)


def values_equal(a: Any, b: Any) -> bool:
    if a is UNKNOWN or b is UNKNOWN:
        return a is b
    return value_key(a) == value_key(b)


def value_to_json(value: Any) -> Any:
    if value is UNKNOWN:
        return UNK_TOKEN
    if isinstance(value, tuple):
        return [value_to_json(v) for v in value]
    return value


def value_from_json(obj: Any) -> Any:
    if obj == UNK_TOKEN:
        return UNKNOWN
    if obj is None:
        raise SchemaError("null is not a value")
    return normalize_value(obj)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _dedup(values: Iterable[Any]) -> tuple:
    seen = set()
    out = []
    for v in values:
        k = value_key(v)
        if k not in seen:
            seen.add(k)
            out.append(v)
    return tuple(out)


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Finite:
    values: tuple

    def __post_init__(self):
        vals = tuple(normalize_value(v) for v in self.values)
        if not vals:
            raise SchemaError("finite domain needs at least one value")
        if len(_dedup(vals)) != len(vals):
            raise SchemaError("finite domain has duplicate values")
        object.__setattr__(self, "values", vals)

    def _keys(self) -> frozenset:
        return frozenset(value_key(v) for v in self.values)

    def __eq__(self, other):
        return isinstance(other, Finite) and self._keys() == other._keys()

    def __hash__(self):
        return hash(("finite", self._keys()))


@dataclass(frozen=True, eq=False)
class EstimatedFinite:
    examples: tuple
    estimated_size: int

    def __post_init__(self):
        exs = tuple(normalize_value(v) for v in self.examples)
        if len(_dedup(exs)) != len(exs):
            raise SchemaError("estimated domain has duplicate examples")
        if isinstance(self.estimated_size, bool) or not isinstance(self.estimated_size, int):
            raise SchemaError("estimated_size must be an integer")
        if self.estimated_size < 1 or self.estimated_size < len(exs):
            raise SchemaError("estimated_size must be positive and cover the examples")
        object.__setattr__(self, "examples", exs)

    def __eq__(self, other):
        return (
            isinstance(other, EstimatedFinite)
            and self.estimated_size == other.estimated_size
            and frozenset(map(value_key, self.examples)) == frozenset(map(value_key, other.examples))
        )

    def __hash__(self):
        return hash(("estimated", self.estimated_size, frozenset(map(value_key, self.examples))))


@dataclass(frozen=True)
class NumericRange:
    lo: float
    hi: float
    integer: bool = False

    def __post_init__(self):
        if not (_is_number(self.lo) and _is_number(self.hi)):
            raise SchemaError("range bounds must be numbers")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise SchemaError("range bounds must be finite")
        if self.lo > self.hi:
            raise SchemaError(f"range has lo > hi ({self.lo} > {self.hi})")
        if self.integer:
            if float(self.lo) != int(self.lo) or float(self.hi) != int(self.hi):
                raise SchemaError("integer range needs integral bounds")
            object.__setattr__(self, "lo", int(self.lo))
            object.__setattr__(self, "hi", int(self.hi))


@dataclass(frozen=True)
class Boolean:
    pass


@dataclass(frozen=True)
class Text:
    pass


@dataclass(frozen=True)
class ListOf:
    element: "ParamDomain"


@dataclass(frozen=True)
class EmptyDomain:
    """Outcome of an intersection that leaves no admissible value."""


EMPTY = EmptyDomain()

ParamDomain = Union[Finite, EstimatedFinite, NumericRange, Boolean, Text, ListOf]
_DOMAIN_TYPES = (Finite, EstimatedFinite, NumericRange, Boolean, Text, ListOf)


def is_domain(obj: Any) -> bool:
    return isinstance(obj, _DOMAIN_TYPES)


def contains(domain, value: Any) -> bool:
    """Membership of a concrete value in a domain."""
    if value is UNKNOWN or isinstance(domain, EmptyDomain):
        return False
    try:
        value = normalize_value(value)
    except SchemaError:
        return False
    if isinstance(domain, Finite):
        return value_key(value) in domain._keys()
    if isinstance(domain, EstimatedFinite):
        # The examples only sample the domain; accept anything of their variant.
        if domain.examples:
            return value_kind(value) == value_kind(domain.examples[0])
        return isinstance(value, str)
    if isinstance(domain, NumericRange):
        if not _is_number(value) or not (domain.lo <= value <= domain.hi):
            return False
        return not domain.integer or float(value).is_integer()
    if isinstance(domain, Boolean):
        return isinstance(value, bool)
    if isinstance(domain, Text):
        return isinstance(value, str)
    if isinstance(domain, ListOf):
        return isinstance(value, tuple) and all(contains(domain.element, v) for v in value)
    raise UsageError(f"not a domain: {domain!r}")


def domain_size(domain) -> float:
    """Number of admissible values; ``math.inf`` for unbounded domains."""
    if isinstance(domain, EmptyDomain):
        return 0
    if isinstance(domain, Finite):
        return len(domain.values)
    if isinstance(domain, EstimatedFinite):
        return domain.estimated_size
    if isinstance(domain, NumericRange):
        if domain.integer:
            return domain.hi - domain.lo + 1
        return 1 if domain.lo == domain.hi else math.inf
    if isinstance(domain, Boolean):
        return 2
    if isinstance(domain, (Text, ListOf)):
        return math.inf
    raise UsageError(f"not a domain: {domain!r}")


def enumerate_values(domain, limit: int = ENUMERATE_LIMIT) -> tuple | None:
    """All values of a small finite domain in canonical order, else None."""
    if isinstance(domain, Finite):
        return domain.values
    if isinstance(domain, Boolean):
        return (True, False)
    if isinstance(domain, NumericRange) and domain_size(domain) <= limit:
        if domain.integer:
            return tuple(range(domain.lo, domain.hi + 1))
        if domain.lo == domain.hi:
            return (domain.lo,)
    return None


# ---------------------------------------------------------------------------
# Constraints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EqualTo:
    value: Any

    def __post_init__(self):
        object.__setattr__(self, "value", normalize_value(self.value))


@dataclass(frozen=True)
class OneOf:
    values: tuple

    def __post_init__(self):
        vals = _dedup(normalize_value(v) for v in self.values)
        if not vals:
            raise SchemaError("OneOf needs at least one value")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class NotIn:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", _dedup(normalize_value(v) for v in self.values))


@dataclass(frozen=True)
class Range:
    lo: float
    hi: float

    def __post_init__(self):
        if not (_is_number(self.lo) and _is_number(self.hi)):
            raise SchemaError("range bounds must be numbers")
        if self.lo > self.hi:
            raise SchemaError(f"range has lo > hi ({self.lo} > {self.hi})")


@dataclass(frozen=True)
class NoInformation:
    pass


NO_INFO = NoInformation()

Constraint = Union[EqualTo, OneOf, NotIn, Range, NoInformation]


def satisfies(value: Any, constraint: Constraint) -> bool:
    """Whether a concrete value is consistent with a constraint."""
    if isinstance(constraint, NoInformation):
        return True
    if value is UNKNOWN:
        return True
    if isinstance(constraint, EqualTo):
        return values_equal(value, constraint.value)
    if isinstance(constraint, OneOf):
        return any(values_equal(value, v) for v in constraint.values)
    if isinstance(constraint, NotIn):
        return not any(values_equal(value, v) for v in constraint.values)
    if isinstance(constraint, Range):
        return _is_number(value) and constraint.lo <= value <= constraint.hi
    raise UsageError(f"not a constraint: {constraint!r}")


def _finite_or_empty(values: Iterable[Any]):
    vals = _dedup(values)
    return Finite(vals) if vals else EMPTY


def _is_numeric_domain(domain) -> bool:
    if isinstance(domain, NumericRange):
        return True
    if isinstance(domain, Finite):
        return all(_is_number(v) for v in domain.values)
    if isinstance(domain, EstimatedFinite):
        return bool(domain.examples) and all(_is_number(v) for v in domain.examples)
    return False


def intersect_domain(domain, constraint: Constraint):
    """Narrow ``domain`` by ``constraint``; returns ``EMPTY`` when nothing is left.

    Exclusions that a variant cannot represent (a point removed from a real
    interval, a string removed from free text) leave the domain unchanged.
    """
    if isinstance(domain, EmptyDomain):
        return EMPTY
    if not is_domain(domain):
        raise UsageError(f"not a domain: {domain!r}")
    if isinstance(constraint, NoInformation):
        return domain
    if isinstance(constraint, EqualTo):
        return Finite((constraint.value,)) if contains(domain, constraint.value) else EMPTY
    if isinstance(constraint, OneOf):
        if isinstance(domain, Finite):
            allowed = {value_key(v) for v in constraint.values}
            return _finite_or_empty(v for v in domain.values if value_key(v) in allowed)
        return _finite_or_empty(v for v in constraint.values if contains(domain, v))
    if isinstance(constraint, NotIn):
        return _exclude(domain, constraint.values)
    if isinstance(constraint, Range):
        if not _is_numeric_domain(domain):
            raise DomainTypeError(f"Range constraint on non-numeric domain {type(domain).__name__}")
        if isinstance(domain, Finite):
            return _finite_or_empty(v for v in domain.values if constraint.lo <= v <= constraint.hi)
        if isinstance(domain, EstimatedFinite):
            raise DomainTypeError("Range constraint on an estimated domain")
        lo = max(domain.lo, constraint.lo)
        hi = min(domain.hi, constraint.hi)
        if domain.integer:
            lo, hi = math.ceil(lo), math.floor(hi)
        if lo > hi:
            return EMPTY
        if lo == hi:
            return Finite((lo,))
        return NumericRange(lo, hi, domain.integer)
    raise UsageError(f"not a constraint: {constraint!r}")


def _exclude(domain, excluded: tuple):
    keys = {value_key(v) for v in excluded}
    if isinstance(domain, Finite):
        return _finite_or_empty(v for v in domain.values if value_key(v) not in keys)
    if isinstance(domain, Boolean):
        return _finite_or_empty(v for v in (True, False) if value_key(v) not in keys)
    if isinstance(domain, EstimatedFinite):
        kept = tuple(v for v in domain.examples if value_key(v) not in keys)
        size = domain.estimated_size - (len(domain.examples) - len(kept))
        if size <= 0:
            return EMPTY
        return EstimatedFinite(kept, max(size, len(kept)))
    if isinstance(domain, NumericRange) and domain.integer:
        lo, hi = domain.lo, domain.hi
        while lo <= hi and value_key(lo) in keys:
            lo += 1
        while hi >= lo and value_key(hi) in keys:
            hi -= 1
        if lo > hi:
            return EMPTY
        if hi - lo + 1 <= ENUMERATE_LIMIT:
            survivors = [v for v in range(lo, hi + 1) if value_key(v) not in keys]
            if len(survivors) < hi - lo + 1 or lo == hi:
                return _finite_or_empty(survivors)
        return NumericRange(lo, hi, True)
    if isinstance(domain, NumericRange) and domain.lo == domain.hi:
        return EMPTY if value_key(domain.lo) in keys else domain
    return domain


# ---------------------------------------------------------------------------
# Tool schemas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParamSpec:
    name: str
    domain: ParamDomain
    required: bool = True
    data_dependent: bool = False
    has_default: bool = False

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise SchemaError("parameter name must be a non-empty string")
        if not is_domain(self.domain):
            raise SchemaError(f"parameter {self.name}: invalid domain {self.domain!r}")


@dataclass(frozen=True)
class ToolSchema:
    name: str
    params: tuple = ()

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise SchemaError("tool name must be a non-empty string")
        params = tuple(self.params)
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise SchemaError(f"tool {self.name}: duplicate parameter names")
        object.__setattr__(self, "params", params)

    def param(self, name: str) -> ParamSpec:
        for p in self.params:
            if p.name == name:
                return p
        raise UsageError(f"tool {self.name} has no parameter {name!r}")

    def has_param(self, name: str) -> bool:
        return any(p.name == name for p in self.params)

    @property
    def param_names(self) -> tuple:
        return tuple(p.name for p in self.params)


@dataclass(frozen=True)
class Toolkit:
    tools: tuple = ()
    _index: Mapping = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        tools = tuple(self.tools)
        index = {}
        for t in tools:
            if t.name in index:
                raise SchemaError(f"duplicate tool name {t.name!r}")
            index[t.name] = t
        object.__setattr__(self, "tools", tools)
        object.__setattr__(self, "_index", MappingProxyType(index))

    def __iter__(self) -> Iterator[ToolSchema]:
        return iter(self.tools)

    def __len__(self) -> int:
        return len(self.tools)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def tool(self, name: str) -> ToolSchema:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"unknown tool {name!r}") from None

    def merge(self, other: "Toolkit") -> "Toolkit":
        return Toolkit(self.tools + other.tools)


# ---------------------------------------------------------------------------
# Candidate calls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CandidateCall:
    tool: str
    assignments: Mapping = field(default_factory=dict)
    candidate_id: str = "c0"

    def __post_init__(self):
        args = {str(k): normalize_value(v) for k, v in dict(self.assignments).items()}
        object.__setattr__(self, "assignments", MappingProxyType(args))

    def __eq__(self, other):
        if not isinstance(other, CandidateCall):
            return NotImplemented
        return (
            self.tool == other.tool
            and self.candidate_id == other.candidate_id
            and self.assignments.keys() == other.assignments.keys()
            and all(values_equal(v, other.assignments[k]) for k, v in self.assignments.items())
        )

    def __hash__(self):
        return hash((self.tool, self.candidate_id, tuple(sorted(self.assignments))))

    def value(self, param: str) -> Any:
        return self.assignments.get(param, UNKNOWN)

    def is_specified(self, param: str) -> bool:
        return self.assignments.get(param, UNKNOWN) is not UNKNOWN

    def unknown_params(self) -> tuple:
        return tuple(k for k, v in self.assignments.items() if v is UNKNOWN)

    @property
    def fully_specified(self) -> bool:
        return not self.unknown_params()

    def with_values(self, **updates) -> "CandidateCall":
        args = dict(self.assignments)
        args.update(updates)
        return CandidateCall(self.tool, args, self.candidate_id)

    def with_id(self, candidate_id: str) -> "CandidateCall":
        return CandidateCall(self.tool, self.assignments, candidate_id)

    def to_obj(self) -> dict:
        return {
            "id": self.candidate_id,
            "name": self.tool,
            "arguments": {k: value_to_json(v) for k, v in self.assignments.items()},
        }

    @classmethod
    def from_obj(cls, obj: Mapping, candidate_id: str | None = None) -> "CandidateCall":
        args = obj.get("arguments", {}) or {}
        if not isinstance(args, Mapping):
            raise SchemaError("call arguments must be an object")
        return cls(
            str(obj["name"]),
            {k: value_from_json(v) for k, v in args.items()},
            candidate_id or str(obj.get("id", "c0")),
        )

    def render(self) -> str:
        parts = ", ".join(f"{k}={_render_value(v)}" for k, v in self.assignments.items())
        return f"{self.tool}({parts})"


def _render_value(value: Any) -> str:
    if value is UNKNOWN:
        return UNK_TOKEN
    return json.dumps(value_to_json(value))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    param: str
    kind: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> tuple:
        return tuple(v.kind for v in self.violations)


def domain_violation_kind(domain) -> str:
    if isinstance(domain, NumericRange):
        return "out of range"
    if isinstance(domain, (Finite, Boolean)):
        return "invalid enum"
    return "invalid value"


def validate_call(schema: ToolSchema, call: CandidateCall, domains: Mapping | None = None) -> ValidationReport:
    """Check a call against its schema, optionally against overriding domains."""
    if call.tool != schema.name:
        raise UsageError(f"call targets {call.tool!r}, schema is {schema.name!r}")
    domains = domains or {}
    out = []
    for name, value in call.assignments.items():
        if not schema.has_param(name):
            out.append(Violation(name, "unknown parameter", f"{schema.name} has no parameter {name}"))
            continue
        if value is UNKNOWN:
            continue
        dom = domains.get(name, schema.param(name).domain)
        if not contains(dom, value):
            kind = domain_violation_kind(dom)
            out.append(Violation(name, kind, f"{name}={_render_value(value)} is {kind}"))
    for p in schema.params:
        if p.required and p.name not in call.assignments:
            out.append(Violation(p.name, "missing required", f"required parameter {p.name} is missing"))
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# Toolkit documents
# ---------------------------------------------------------------------------

_DOMAIN_FIELDS = {"type", "values", "lo", "hi", "integer", "estimated_size", "element"}
_PARAM_FIELDS = {"name", "required", "data_dependent", "has_default", "domain"}


def domain_to_obj(domain) -> dict:
    if isinstance(domain, EmptyDomain):
        return {"type": "empty"}
    if isinstance(domain, Finite):
        return {"type": "finite", "values": [value_to_json(v) for v in domain.values]}
    if isinstance(domain, EstimatedFinite):
        return {
            "type": "estimated_finite",
            "values": [value_to_json(v) for v in domain.examples],
            "estimated_size": domain.estimated_size,
        }
    if isinstance(domain, NumericRange):
        return {"type": "numeric_range", "lo": domain.lo, "hi": domain.hi, "integer": domain.integer}
    if isinstance(domain, Boolean):
        return {"type": "boolean"}
    if isinstance(domain, Text):
        return {"type": "string"}
    if isinstance(domain, ListOf):
        return {"type": "list", "element": domain_to_obj(domain.element)}
    raise UsageError(f"not a domain: {domain!r}")


def _expect(obj, typ, path: str, what: str):
    if not isinstance(obj, typ):
        raise ToolkitParseError(path, f"expected {what}")
    return obj


def domain_from_obj(obj: Any, path: str = "domain"):
    _expect(obj, dict, path, "an object")
    extra = set(obj) - _DOMAIN_FIELDS
    if extra:
        raise ToolkitParseError(path, f"unexpected fields {sorted(extra)}")
    kind = obj.get("type")
    try:
        if kind == "finite":
            vals = _expect(obj.get("values"), list, f"{path}.values", "a list")
            return Finite(tuple(value_from_json(v) for v in vals))
        if kind == "estimated_finite":
            vals = obj.get("values", [])
            _expect(vals, list, f"{path}.values", "a list")
            size = obj.get("estimated_size")
            if isinstance(size, bool) or not isinstance(size, int):
                raise ToolkitParseError(f"{path}.estimated_size", "expected an integer")
            return EstimatedFinite(tuple(value_from_json(v) for v in vals), size)
        if kind == "numeric_range":
            for key in ("lo", "hi"):
                v = obj.get(key)
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ToolkitParseError(f"{path}.{key}", "expected a number")
            integer = obj.get("integer", False)
            _expect(integer, bool, f"{path}.integer", "a boolean")
            return NumericRange(obj["lo"], obj["hi"], integer)
        if kind == "boolean":
            return Boolean()
        if kind == "string":
            return Text()
        if kind == "list":
            if "element" not in obj:
                raise ToolkitParseError(f"{path}.element", "missing element domain")
            return ListOf(domain_from_obj(obj["element"], f"{path}.element"))
    except ToolkitParseError:
        raise
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    raise ToolkitParseError(f"{path}.type", f"unknown domain type {kind!r}")


def toolkit_to_obj(toolkit: Toolkit) -> dict:
    return {
        "tools": [
            {
                "name": t.name,
                "params": [
                    {
                        "name": p.name,
                        "required": p.required,
                        "data_dependent": p.data_dependent,
                        "has_default": p.has_default,
                        "domain": domain_to_obj(p.domain),
                    }
                    for p in t.params
                ],
            }
            for t in toolkit
        ]
    }


def serialize_toolkit(toolkit: Toolkit) -> str:
    return json.dumps(toolkit_to_obj(toolkit), indent=2) + "\n"


def toolkit_from_obj(obj: Any) -> Toolkit:
    if isinstance(obj, dict):
        if set(obj) - {"tools"}:
            raise ToolkitParseError("$", f"unexpected fields {sorted(set(obj) - {'tools'})}")
        obj = obj.get("tools", [])
    _expect(obj, list, "tools", "a list of tools")
    tools = []
    for i, t in enumerate(obj):
        tpath = f"tools[{i}]"
        _expect(t, dict, tpath, "an object")
        extra = set(t) - {"name", "params"}
        if extra:
            raise ToolkitParseError(tpath, f"unexpected fields {sorted(extra)}")
        name = t.get("name")
        if not isinstance(name, str) or not name:
            raise ToolkitParseError(f"{tpath}.name", "expected a non-empty string")
        params_obj = t.get("params", [])
        _expect(params_obj, list, f"{tpath}.params", "a list")
        params = []
        for j, p in enumerate(params_obj):
            ppath = f"{tpath}.params[{j}]"
            _expect(p, dict, ppath, "an object")
            extra = set(p) - _PARAM_FIELDS
            if extra:
                raise ToolkitParseError(ppath, f"unexpected fields {sorted(extra)}")
            pname = p.get("name")
            if not isinstance(pname, str) or not pname:
                raise ToolkitParseError(f"{ppath}.name", "expected a non-empty string")
            flags = {}
            for flag, default in (("required", True), ("data_dependent", False), ("has_default", False)):
                flags[flag] = _expect(p.get(flag, default), bool, f"{ppath}.{flag}", "a boolean")
            if "domain" not in p:
                raise ToolkitParseError(f"{ppath}.domain", "missing domain")
            params.append(ParamSpec(pname, domain_from_obj(p["domain"], f"{ppath}.domain"), **flags))
        tools.append(ToolSchema(name, tuple(params)))
    return Toolkit(tuple(tools))


def parse_toolkit(document: str | bytes | Any) -> Toolkit:
    """Parse a toolkit document (JSON text or an already-decoded object)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ToolkitParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    return toolkit_from_obj(document)


def load_toolkit(path) -> Toolkit:
    with open(path, encoding="utf-8") as fh:
        return parse_toolkit(fh.read())
