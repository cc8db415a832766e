"""Turn a working tool call into one the environment rejects.

Each domain has a few strategies that propose (param, value, kind) edits.
Proposals are shuffled with a seeded generator and tried in order on a
clone of the environment; the first one that fails with its declared error
kind wins. Generic numeric and enum edits are tried after the domain's own.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass

from ..schema import CandidateCall, Finite, ListOf, NumericRange, UsageError, contains
from .base import Environment
from .filesystem import FORBIDDEN

PAGE_PARAMS = ("page_num", "start", "end")
FS_NAME_PARAMS = {
    ("mkdir", "dir_name"), ("rmdir", "dir_name"), ("touch", "file_name"), ("echo", "file_name"),
    ("cat", "file_name"), ("wc", "file_name"), ("sort", "file_name"), ("grep", "file_name"),
    ("tail", "file_name"), ("rm", "file_name"), ("diff", "file_name1"), ("diff", "file_name2"),
}
FS_PATH_PARAMS = {
    ("cd", "folder"), ("mv", "source"), ("mv", "destination"), ("cp", "source"), ("cp", "destination"),
    ("find", "path"),
}


class NotCorruptible(Exception):
    """No strategy produces a call that fails the way it claims to."""


@dataclass(frozen=True)
class Corruption:
    call: CandidateCall
    kind: str
    param: str
    strategy: str

    def to_obj(self) -> dict:
        return {"call": self.call.to_obj(), "kind": self.kind, "param": self.param, "strategy": self.strategy}


def _token(rng: random.Random, n: int = 4) -> str:
    return "".join(rng.choice(string.ascii_lowercase + string.digits) for _ in range(n))


def _fresh(cur, make, rng, tries: int = 20):
    for _ in range(tries):
        value = make(rng)
        if not contains(cur, value):
            return value
    return None


# -- strategies: each yields (param, value, kind) ------------------------------

def _forbidden_chars(call, env, rng):
    for name, value in call.assignments.items():
        if (call.tool, name) in FS_NAME_PARAMS and isinstance(value, str):
            at = rng.randint(0, len(value))
            yield name, value[:at] + rng.choice(FORBIDDEN) + value[at:], "path"


def _traversal(call, env, rng):
    for name, value in call.assignments.items():
        if (call.tool, name) in FS_PATH_PARAMS and isinstance(value, str):
            yield name, rng.choice(("../", "/root/")) + value.strip("/"), "path"


def _nonexistent(call, env, rng):
    for name, value in call.assignments.items():
        if (call.tool, name) not in env.entity_params:
            continue
        cur = env.current_domain(call.tool, name)
        if isinstance(value, str):
            stem = value.replace(".", "_") or "item"
            bad = _fresh(cur, lambda r: f"{stem}_{_token(r)}", rng)
        elif isinstance(value, int) and not isinstance(value, bool):
            bad = _fresh(cur, lambda r: value + r.randint(1, 5000), rng)
        else:
            bad = None
        if bad is not None:
            yield name, bad, "missing-entity"


def _duplicate(call, env, rng):
    existing = env.items() if hasattr(env, "items") else []
    for name in ("dir_name", "file_name"):
        if call.tool in ("mkdir", "touch") and name in call.assignments and existing:
            yield name, rng.choice(existing), "duplicate"
    if call.tool in ("mv", "cp") and hasattr(env, "files"):
        others = [f for f in env.files() if f != call.value("source")]
        if others:
            yield "destination", rng.choice(others), "duplicate"


def _existing_output(call, env, rng):
    taken = [env.state["filename"], *env.state["outputs"]]
    for name in ("output_filename", "output_pathname"):
        if name in call.assignments and call.tool not in ("rename", "convert"):
            yield name, rng.choice(taken), "duplicate"


def _page_range(call, env, rng):
    for name in PAGE_PARAMS:
        if name not in call.assignments:
            continue
        cur = env.current_domain(call.tool, name)
        if isinstance(cur, NumericRange):
            yield name, rng.choice((0, -rng.randint(1, 5), cur.hi + rng.randint(1, 5))), "out-of-range"


def _out_of_range(call, env, rng):
    for name in call.assignments:
        if (call.tool, name) in env.entity_params:
            continue
        cur = env.current_domain(call.tool, name)
        if not isinstance(cur, NumericRange):
            continue
        width = max(cur.hi - cur.lo, 1)
        step = rng.randint(1, 10) if cur.integer else round(rng.uniform(0.1, 1.0) * width, 3)
        yield name, rng.choice((cur.lo - step, cur.hi + step)), "out-of-range"


def _enum_variants(value, rng):
    if isinstance(value, str):
        return [value.lower(), value.upper(), value.capitalize(), value[:-1], "invalid_" + value]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [value + rng.randint(1, 4)]
    return []


def _enum(call, env, rng):
    for name, value in call.assignments.items():
        if (call.tool, name) in env.entity_params:
            continue
        cur = env.current_domain(call.tool, name)
        if isinstance(cur, Finite):
            bad = [v for v in _enum_variants(value, rng) if v != "" and not contains(cur, v)]
            if bad:
                yield name, rng.choice(bad), "invalid-enum"
        elif isinstance(cur, ListOf) and isinstance(cur.element, Finite) and value:
            i = rng.randrange(len(value))
            bad = [v for v in _enum_variants(value[i], rng) if v != "" and not contains(cur.element, v)]
            if bad:
                yield name, value[:i] + (rng.choice(bad),) + value[i + 1:], "invalid-enum"


def _financial(call, env, rng):
    s = env.state
    bump = rng.randint(1, 50)
    if env.name == "travel":
        card = s["cards"].get(call.value("card_id"))
        if card is None:
            return
        if call.tool == "book_flight":
            yield "travel_cost", round(card["balance"] + bump, 2), "financial"
        elif call.tool == "purchase_insurance":
            yield "insurance_cost", round(card["balance"] + bump, 2), "financial"
    elif env.name == "trading":
        balance = s["account"]["balance"]
        if call.tool == "place_order":
            if call.value("order_type") == "Buy":
                yield "amount", int(balance // call.value("price")) + bump, "financial"
            else:
                yield "amount", s["holdings"].get(call.value("symbol"), 0) + bump, "financial"
        elif call.tool == "make_transaction" and call.value("xact_type") == "withdrawal":
            yield "amount", round(balance + bump, 2), "financial"


def _invalid_route(call, env, rng):
    if "travel_from" not in call.assignments:
        return
    if rng.random() < 0.5:
        yield "travel_to", call.value("travel_from"), "missing-entity"
    name = rng.choice(("travel_from", "travel_to"))
    cur = env.current_domain(call.tool, name)
    code = _fresh(cur, lambda r: "".join(r.choice(string.ascii_uppercase) for _ in range(3)), rng)
    if code is not None:
        yield name, code, "missing-entity"


def _invalid_symbol(call, env, rng):
    for name in ("symbol", "stock"):
        value = call.value(name)
        if not isinstance(value, str) or (call.tool, name) not in env.entity_params:
            continue
        cur = env.current_domain(call.tool, name)
        malformed = [v for v in (value.lower(), value + "." + _token(rng, 2).upper()) if not contains(cur, v)]
        unknown = _fresh(cur, lambda r: "".join(r.choice(string.ascii_uppercase) for _ in range(4)), rng)
        choices = malformed + ([unknown] if unknown else [])
        if choices:
            yield name, rng.choice(choices), "missing-entity"


def _bad_lookup(call, env, rng):
    if call.tool == "update_market_status":
        yield "current_time_str", rng.choice(("25:00 AM", "10:30", "ten thirty")), "invalid-enum"
    elif call.tool == "get_symbol_by_name":
        yield "name", f"{call.value('name')} {_token(rng).upper()}", "missing-entity"


def _order_state(call, env, rng):
    if call.tool != "cancel_order":
        return
    closed = [o["id"] for o in env.state["orders"] if o["status"] not in ("Open", "Pending")]
    if closed:
        yield "order_id", rng.choice(closed), "missing-entity"


STRATEGIES = {
    "filesystem": (_forbidden_chars, _traversal, _nonexistent, _duplicate),
    "document": (_page_range, _enum, _out_of_range, _existing_output),
    "vehicle": (_out_of_range, _enum),
    "travel": (_financial, _invalid_route, _nonexistent),
    "trading": (_invalid_symbol, _financial, _order_state, _nonexistent, _bad_lookup),
}
FALLBACK = (_out_of_range, _enum, _nonexistent)


def _proposals(call, env, rng, strategies):
    out = []
    for strategy in strategies:
        for param, value, kind in strategy(call, env, rng):
            out.append((strategy.__name__.lstrip("_"), param, value, kind))
    rng.shuffle(out)
    return out


def corrupt_call(call: CandidateCall, env: Environment, seed: int = 0) -> Corruption:
    """A seeded edit of ``call`` that ``env`` rejects with the declared kind."""
    base = env.clone().execute(call)
    if not base.ok:
        raise UsageError(f"{call.render()} already fails ({base.kind}); corrupt a working call")
    rng = random.Random(f"{seed}:{env.name}:{call.render()}")
    tiers = (STRATEGIES.get(env.name, ()), FALLBACK)
    for strategies in tiers:
        for strategy, param, value, kind in _proposals(call, env, rng, strategies):
            bad = call.with_values(**{param: value})
            result = env.clone().execute(bad)
            if not result.ok and result.kind == kind:
                return Corruption(bad, kind, param, strategy)
    raise NotCorruptible(f"no corruption applies to {call.render()}")
