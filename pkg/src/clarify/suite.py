"""Build the synthetic scenario suite from each environment's sample calls.

Every scenario is checked by replaying its ground truth on a fresh
environment, so follow-up requests are valid in the state the earlier
requests leave behind. Ambiguous scenarios carry a machine-readable intent:
``hidden-finite:<k>`` (k small-domain aspects, all known to the user),
``partial`` (two small-domain aspects, only the first known) and
``hidden-open`` (a large or unbounded aspect the user knows).
"""

from __future__ import annotations

from .belief import AspectId
from .envs import ENVIRONMENTS
from .envs.corruption import NotCorruptible, corrupt_call
from .schema import CandidateCall, domain_size, enumerate_values, value_to_json
from .simulator import ENUMERATE_MAX, Request, Scenario

PER_TYPE_PER_DOMAIN = 7


def _describe(call: CandidateCall, open_params=()) -> str:
    parts = [f"{p} {value_to_json(v)}" for p, v in call.assignments.items() if p not in open_params]
    text = f"Please run {call.tool}" + (" with " + ", ".join(parts) if parts else "")
    if open_params:
        text += f"; I have not said which {' or '.join(open_params)}"
    return text + "."


def _replays(domain: str, calls) -> bool:
    env = ENVIRONMENTS[domain]()
    return all(env.execute(c).ok for c in calls)


def _follow_up(domain: str, first: CandidateCall, pool) -> CandidateCall | None:
    for cand in pool:
        if cand.tool != first.tool and _replays(domain, (first, cand)):
            return cand
    return None


def _param_classes(domain: str, call: CandidateCall):
    """(small finite params, other required params) for one call."""
    cls = ENVIRONMENTS[domain]
    env = cls()
    schema = cls.toolkit().tool(call.tool)
    small, other = [], []
    for spec in schema.params:
        if spec.name not in call.assignments or spec.has_default:
            continue
        dom = env.current_domain(call.tool, spec.name)
        n = domain_size(dom)
        if 2 <= n <= ENUMERATE_MAX and enumerate_values(dom):
            small.append(spec.name)
        elif spec.required:
            other.append(spec.name)
    return small, other


def _ambiguous_variants(domain: str, call: CandidateCall):
    small, other = _param_classes(domain, call)
    out = []
    for k in (1, 2, 3):
        if len(small) >= k:
            out.append((f"hidden-finite:{k}", small[:k], small[:k]))
    if len(small) >= 2:
        out.append(("partial", small[:2], small[:1]))
    if other:
        amb = other[:1] + small[:1]
        out.append(("hidden-open", amb, amb))
    return out


def _scenario(sid, domain, qtype, requests, call=None, hidden=()):
    hidden_values = {AspectId(call.tool, p): call.value(p) for p in hidden} if call is not None else {}
    return Scenario(sid, domain, qtype, tuple(requests), hidden_values, 5)


def build_suite(seed: int = 0) -> list:
    scenarios = []
    for domain, cls in ENVIRONMENTS.items():
        samples = cls.samples()
        gold = [c.with_id("g1") for c in samples]

        # explicit: everything stated; every other one has a follow-up request
        for i, call in enumerate(gold[:PER_TYPE_PER_DOMAIN]):
            reqs = [Request(_describe(call), (call,), "fully specified")]
            nxt = _follow_up(domain, call, gold[i + 1:]) if i % 2 else None
            if nxt is not None:
                reqs.append(Request(_describe(nxt), (nxt,), "fully specified follow-up"))
            scenarios.append(_scenario(f"{domain}-explicit-{i + 1:02d}", domain, "explicit", reqs))

        # ambiguous: round-robin over variant kinds so each kind is represented
        by_kind = {}
        for call in gold:
            for intent, amb, hidden in _ambiguous_variants(domain, call):
                by_kind.setdefault(intent, []).append((call, intent, amb, hidden))
        order = []
        while any(by_kind.values()) and len(order) < PER_TYPE_PER_DOMAIN + 1:
            for key in sorted(by_kind):
                if by_kind[key] and len(order) < PER_TYPE_PER_DOMAIN + 1:
                    order.append(by_kind[key].pop(0))
        for i, (call, intent, amb, hidden) in enumerate(order):
            reqs = [Request(_describe(call, amb), (call,), intent, tuple(AspectId(call.tool, p) for p in amb))]
            if intent != "partial" and i % 3 == 0:
                nxt = _follow_up(domain, call, gold)
                if nxt is not None:
                    reqs.append(Request(_describe(nxt), (nxt,), "fully specified follow-up"))
            scenarios.append(_scenario(f"{domain}-ambiguous-{i + 1:02d}", domain, "ambiguous", reqs, call, hidden))

        # infeasible: the stated call is a corrupted copy of the ground truth
        made = 0
        for i, call in enumerate(gold):
            if made == PER_TYPE_PER_DOMAIN:
                break
            try:
                bad = corrupt_call(call, cls(), seed + i)
            except NotCorruptible:
                continue
            failure = cls().execute(bad.call)
            blamed = [p for p in dict.fromkeys(failure.params + (bad.param,)) if p in call.assignments]
            stated = bad.call.with_id("u1")
            reqs = [Request(_describe(stated), (call,), f"infeasible:{bad.kind}", (), (stated,))]
            made += 1
            scenarios.append(
                _scenario(f"{domain}-infeasible-{made:02d}", domain, "infeasible", reqs, call, blamed)
            )
    for sc in scenarios:
        sc.check(ENVIRONMENTS[sc.domain].toolkit())
        calls = [c for r in sc.requests for c in r.ground_truth]
        if not _replays(sc.domain, calls):
            raise AssertionError(f"{sc.scenario_id}: ground truth does not replay")
    return scenarios


def write_data(root) -> list:
    """Regenerate the shipped toolkit and suite JSON under ``root``."""
    from pathlib import Path

    from .schema import serialize_toolkit
    from .simulator import dump_suite

    root = Path(root)
    written = []
    for domain, cls in ENVIRONMENTS.items():
        path = root / "toolkits" / f"{domain}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize_toolkit(cls.toolkit()), encoding="utf-8")
        written.append(path)
    path = root / "scenarios" / "suite.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_suite(build_suite()), encoding="utf-8")
    written.append(path)
    return written


if __name__ == "__main__":
    from pathlib import Path

    for p in write_data(Path(__file__).parent / "data"):
        print(p)
