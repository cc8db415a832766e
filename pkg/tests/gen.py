"""Seeded generators of random toolkits, candidate sets and responses."""

import random

from clarify.belief import AspectId
from clarify.schema import (
    NO_INFO,
    UNKNOWN,
    Boolean,
    CandidateCall,
    EqualTo,
    Finite,
    NotIn,
    NumericRange,
    OneOf,
    ParamSpec,
    Range,
    Text,
    Toolkit,
    ToolSchema,
    enumerate_values,
)
from clarify.reward import ASK, DIRECTLY, REFUSE, TOOLCALL, format_completion
from clarify.voi import ClarifyingQuestion

WORDS = ("red", "green", "blue", "cyan", "grey", "pink")


def random_domain(rng: random.Random):
    kind = rng.choice(("finite", "range", "bool", "text"))
    if kind == "finite":
        return Finite(tuple(rng.sample(WORDS, rng.randint(1, 5))))
    if kind == "range":
        lo = rng.randint(-3, 5)
        return NumericRange(lo, lo + rng.randint(0, 8), integer=True)
    if kind == "bool":
        return Boolean()
    return Text()


def random_toolkit(rng: random.Random) -> Toolkit:
    tools = []
    for t in range(rng.randint(1, 2)):
        params = []
        for p in range(rng.randint(1, 3)):
            required = rng.random() < 0.8
            params.append(
                ParamSpec(f"p{p}", random_domain(rng), required=required, has_default=not required and rng.random() < 0.5)
            )
        tools.append(ToolSchema(f"tool{t}", tuple(params)))
    return Toolkit(tuple(tools))


def sample_value(rng: random.Random, domain):
    values = enumerate_values(domain)
    if values:
        return rng.choice(values)
    return rng.choice(WORDS)


def random_candidates(rng: random.Random, toolkit: Toolkit, n: int | None = None) -> list:
    n = n or rng.randint(1, 5)
    out = []
    for i in range(n):
        schema = rng.choice(toolkit.tools)
        args = {}
        for spec in schema.params:
            if not spec.required and rng.random() < 0.3:
                continue
            args[spec.name] = UNKNOWN if rng.random() < 0.5 else sample_value(rng, spec.domain)
        out.append(CandidateCall(schema.name, args, f"c{i + 1}"))
    return out


def random_constraint(rng: random.Random, domain):
    r = rng.random()
    if r < 0.2:
        return NO_INFO
    values = enumerate_values(domain)
    if isinstance(domain, NumericRange) and r < 0.45:
        lo = rng.randint(domain.lo - 2, domain.hi)
        return Range(lo, lo + rng.randint(0, 5))
    if values is None:
        return EqualTo(rng.choice(WORDS)) if r < 0.6 else OneOf(tuple(rng.sample(WORDS, 2)))
    if r < 0.55:
        return EqualTo(rng.choice(values))
    if r < 0.8:
        return NotIn(tuple(rng.sample(values, rng.randint(1, len(values)))))
    return OneOf(tuple(rng.sample(values, rng.randint(1, len(values)))))


def random_question(rng: random.Random, toolkit: Toolkit, qid: str, target: str) -> ClarifyingQuestion:
    aspects = [AspectId(t.name, p.name) for t in toolkit for p in t.params]
    picked = rng.sample(aspects, rng.randint(1, min(3, len(aspects))))
    return ClarifyingQuestion(qid, "?", target, tuple(picked))


def random_response(rng: random.Random, toolkit: Toolkit, question: ClarifyingQuestion) -> dict:
    return {a: random_constraint(rng, toolkit.tool(a.tool).param(a.param).domain) for a in question.aspects}


def belief_case_violations(seed: int, steps: int = 6) -> list:
    """Run random responses through one random belief; report any law broken."""
    from clarify.belief import ContradictoryResponse, apply_response, counted_params, initial_belief

    rng = random.Random(seed)
    toolkit = random_toolkit(rng)
    state = initial_belief(random_candidates(rng, toolkit), toolkit)
    problems = []

    def audit(st):
        for c in st.candidates:
            w = st.weights[c.candidate_id]
            if not 0.0 <= w <= 1.0:
                problems.append(f"seed {seed}: weight {w} out of bounds")
            if w > 0:
                complete = all(c.is_specified(p) for p in counted_params(c, toolkit))
                if (w == 1.0) != complete:
                    problems.append(f"seed {seed}: {c.render()} weight {w}, complete={complete}")

    audit(state)
    for step in range(steps):
        q = random_question(rng, toolkit, f"q{step}", state.candidates[0].candidate_id)
        before = dict(state.weights)
        counts = {a: state.count(a) for a in q.aspects}
        try:
            new = apply_response(state, q, random_response(rng, toolkit, q))
        except ContradictoryResponse:
            continue
        for cid, w in new.weights.items():
            if w > 0 and w < before[cid]:
                problems.append(f"seed {seed}: {cid} fell from {before[cid]} to {w}")
        for a in q.aspects:
            if new.count(a) != counts[a] + 1:
                problems.append(f"seed {seed}: count for {a} did not rise by one")
        audit(new)
        state = new
    return problems


def set_partitions(items):
    """Every partition of ``items`` into non-empty cells."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def one_step_splits(partition):
    """Partitions obtained by splitting exactly one cell in two."""
    for i, cell in enumerate(partition):
        if len(cell) < 2:
            continue
        for sub in set_partitions(cell):
            if len(sub) == 2:
                yield partition[:i] + sub + partition[i + 1:]


def brute_force_evpi(weights, partition):
    """Best payoff when told the cell, minus best payoff told nothing.

    Enumerates every way of choosing one candidate per cell instead of
    taking per-cell maxima directly.
    """
    import itertools

    informed = max(sum(weights[c] for c in choice) for choice in itertools.product(*partition))
    blind = max(weights[c] for cell in partition for c in cell)
    return informed - blind


def random_call(rng: random.Random, toolkit):
    """A call on a document-env tool with some arguments left Unknown."""
    schema = rng.choice([t for t in toolkit if t.params])
    args = {}
    for spec in schema.params:
        if rng.random() < 0.4:
            args[spec.name] = UNKNOWN
        elif spec.name in ("page_num", "start", "end", "font_size"):
            args[spec.name] = rng.randint(1, 10)
        elif spec.name in ("overwrite", "zip"):
            args[spec.name] = rng.random() < 0.5
        elif spec.name == "transparency":
            args[spec.name] = round(rng.random(), 2)
        elif spec.name == "format":
            args[spec.name] = "png"
        elif spec.name in ("coordinates", "object_name") and spec.domain.__class__.__name__ == "ListOf":
            args[spec.name] = ("a",)
        else:
            args[spec.name] = "x" * rng.randint(1, 5)
    return CandidateCall(schema.name, args)


def random_completion(rng: random.Random, toolkit):
    """(action, calls, text) for a well-formed completion of a random action."""
    action = rng.choice((TOOLCALL, ASK, REFUSE, DIRECTLY))
    call = random_call(rng, toolkit)
    if action == TOOLCALL:
        return action, [call], format_completion(action, [call])
    if action == ASK:
        return action, [call], format_completion(action, [call], question="Which one" + "?" * rng.randint(1, 30))
    return action, [], format_completion(action, text="t" * rng.randint(1, 60))
