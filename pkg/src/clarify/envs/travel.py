"""Flight booking with a card registry, bookings, insurance and a budget.

Route costs in state are economy fares; other classes apply a multiplier.
"""

from __future__ import annotations

from functools import lru_cache

from ..schema import Finite, NumericRange, Text, ToolSchema, Toolkit
from .base import DomainUpdateRule, Environment, ExecutionError, P, finite_or_empty

CLASSES = ("economy", "business", "first")
CLASS_FACTOR = {"economy": 1.0, "business": 2.5, "first": 4.0}
CURRENCIES = ("USD", "RMB", "EUR", "JPY", "GBP", "CAD", "AUD", "INR", "RUB", "BRL", "MXN")
USD_RATE = {
    "USD": 1.0, "RMB": 7.1, "EUR": 0.92, "JPY": 148.0, "GBP": 0.79, "CAD": 1.36,
    "AUD": 1.52, "INR": 83.0, "RUB": 91.0, "BRL": 4.95, "MXN": 17.1,
}
CITIES = ("Rivermist", "Stonebrook", "Maplecrest", "Silverpine", "Shadowridge", "Crescent Hollow")
INSURANCE = ("basic", "premium", "deluxe")
NEW_CARD_BALANCE = 2000.0


@lru_cache(maxsize=None)
def toolkit() -> Toolkit:
    code = Text()
    card = P("card_id", Text(), dep=True)
    booking = P("booking_id", Text(), dep=True)
    return Toolkit((
        ToolSchema("get_budget_fiscal_year", (
            P("lastModifiedAfter", Text(), required=False, default=True),
            P("includeRemoved", Text(), required=False, default=True),
        )),
        ToolSchema("register_credit_card", (
            P("card_number", Text()),
            P("expiration_date", Text()),
            P("cardholder_name", Text()),
            P("card_verification_number", NumericRange(100, 999, True)),
        )),
        ToolSchema("get_flight_cost", (
            P("travel_from", code, dep=True),
            P("travel_to", code, dep=True),
            P("travel_date", Text()),
            P("travel_class", Finite(CLASSES)),
        )),
        ToolSchema("get_credit_card_balance", (card,)),
        ToolSchema("book_flight", (
            card,
            P("travel_date", Text()),
            P("travel_from", code, dep=True),
            P("travel_to", code, dep=True),
            P("travel_class", Finite(CLASSES)),
            P("travel_cost", NumericRange(0, 10000)),
        )),
        ToolSchema("retrieve_invoice", (
            P("booking_id", Text(), required=False, dep=True, default=True),
            P("insurance_id", Text(), required=False, dep=True, default=True),
        )),
        ToolSchema("list_all_airports", ()),
        ToolSchema("cancel_booking", (booking,)),
        ToolSchema("compute_exchange_rate", (
            P("base_currency", Finite(CURRENCIES)),
            P("target_currency", Finite(CURRENCIES)),
            P("value", NumericRange(0, 1000000)),
        )),
        ToolSchema("verify_traveler_information", (
            P("first_name", Text()),
            P("last_name", Text()),
            P("date_of_birth", Text()),
            P("passport_number", Text()),
        )),
        ToolSchema("set_budget_limit", (P("budget_limit", NumericRange(0, 10000)),)),
        ToolSchema("get_nearest_airport_by_city", (P("location", Finite(CITIES)),)),
        ToolSchema("purchase_insurance", (
            P("insurance_type", Finite(INSURANCE)),
            booking,
            P("insurance_cost", NumericRange(0, 1000)),
            card,
        )),
        ToolSchema("contact_customer_support", (booking, P("message", Text()))),
        ToolSchema("get_all_credit_cards", ()),
    ))


# Calls that succeed on the fixture state, one fresh environment each.
SAMPLES = (
    ("book_flight", {"card_id": "card_3456", "travel_date": "2024-12-01", "travel_from": "RMS",
                     "travel_to": "SBK", "travel_class": "economy", "travel_cost": 320.0}),
    ("get_flight_cost", {"travel_from": "JFK", "travel_to": "SFO", "travel_date": "2024-12-01",
                         "travel_class": "business"}),
    ("get_credit_card_balance", {"card_id": "card_7812"}),
    ("cancel_booking", {"booking_id": "booking_1002"}),
    ("retrieve_invoice", {"booking_id": "booking_1001"}),
    ("purchase_insurance", {"insurance_type": "premium", "booking_id": "booking_1002", "insurance_cost": 80.0,
                            "card_id": "card_3456"}),
    ("compute_exchange_rate", {"base_currency": "USD", "target_currency": "EUR", "value": 100.0}),
    ("set_budget_limit", {"budget_limit": 2000.0}),
    ("get_nearest_airport_by_city", {"location": "Stonebrook"}),
    ("register_credit_card", {"card_number": "4111111111111111", "expiration_date": "01/2028",
                              "cardholder_name": "Alex Morgan", "card_verification_number": 123}),
    ("contact_customer_support", {"booking_id": "booking_1001", "message": "Need a window seat"}),
    ("verify_traveler_information", {"first_name": "Alex", "last_name": "Morgan", "date_of_birth": "1990-02-14",
                                     "passport_number": "P1234567"}),
)


class TravelEnv(Environment):
    sample_table = SAMPLES
    name = "travel"
    entity_params = frozenset({
        ("book_flight", "card_id"), ("get_credit_card_balance", "card_id"), ("purchase_insurance", "card_id"),
        ("cancel_booking", "booking_id"), ("retrieve_invoice", "booking_id"),
        ("contact_customer_support", "booking_id"), ("purchase_insurance", "booking_id"),
        ("retrieve_invoice", "insurance_id"),
        ("get_flight_cost", "travel_from"), ("get_flight_cost", "travel_to"),
        ("book_flight", "travel_from"), ("book_flight", "travel_to"),
    })
    defaults = {
        "get_budget_fiscal_year": {"lastModifiedAfter": None, "includeRemoved": None},
        "retrieve_invoice": {"booking_id": None, "insurance_id": None},
    }

    @classmethod
    def toolkit(cls) -> Toolkit:
        return toolkit()

    def build_rules(self) -> list:
        return [
            DomainUpdateRule(
                "register_credit_card",
                (("book_flight", "card_id"), ("get_credit_card_balance", "card_id"), ("purchase_insurance", "card_id")),
                lambda s: finite_or_empty(sorted(s["cards"])),
                "card ids -> available payment methods",
            ),
            DomainUpdateRule(
                "book_flight|cancel_booking",
                (("cancel_booking", "booking_id"), ("retrieve_invoice", "booking_id"),
                 ("contact_customer_support", "booking_id"), ("purchase_insurance", "booking_id")),
                lambda s: finite_or_empty(sorted(s["bookings"])),
                "booking ids -> cancellable and retrievable bookings",
            ),
            DomainUpdateRule(
                "purchase_insurance|cancel_booking",
                (("retrieve_invoice", "insurance_id"),),
                lambda s: finite_or_empty(sorted(s["insurances"])),
                "insurance ids -> retrievable invoices",
            ),
            DomainUpdateRule(
                "list_all_airports",
                (("get_flight_cost", "travel_from"), ("get_flight_cost", "travel_to"),
                 ("book_flight", "travel_from"), ("book_flight", "travel_to")),
                lambda s: finite_or_empty(s["airports"]),
                "airport codes -> valid travel routes",
            ),
        ]

    # -- helpers --------------------------------------------------------------

    def _fare(self, travel_from, travel_to, travel_class) -> float:
        key = f"{travel_from}-{travel_to}"
        if travel_from == travel_to or key not in self.state["routes"]:
            raise ExecutionError("missing-entity", f"no route {key}", "travel_from", "travel_to")
        return round(self.state["routes"][key] * CLASS_FACTOR[travel_class], 2)

    def _charge(self, card_id, amount, param):
        card = self.state["cards"][card_id]
        if amount > card["balance"]:
            raise ExecutionError("financial", f"card {card_id} balance {card['balance']} below {amount}", param)
        card["balance"] = round(card["balance"] - amount, 2)

    def _next_id(self, prefix):
        self.state["counter"] += 1
        return f"{prefix}_{self.state['counter']}"

    # -- tools ----------------------------------------------------------------

    def do_get_budget_fiscal_year(self, lastModifiedAfter=None, includeRemoved=None):
        return {"fiscal_year": "2024", "budget_limit": self.state["budget_limit"]}

    def do_register_credit_card(self, card_number, expiration_date, cardholder_name, card_verification_number):
        if any(c["card_number"] == card_number for c in self.state["cards"].values()):
            raise ExecutionError("duplicate", "card already registered", "card_number")
        card_id = self._next_id("card")
        self.state["cards"][card_id] = {
            "card_number": card_number,
            "expiration_date": expiration_date,
            "cardholder_name": cardholder_name,
            "balance": NEW_CARD_BALANCE,
        }
        return card_id

    def do_get_flight_cost(self, travel_from, travel_to, travel_date, travel_class):
        return self._fare(travel_from, travel_to, travel_class)

    def do_get_credit_card_balance(self, card_id):
        return self.state["cards"][card_id]["balance"]

    def do_book_flight(self, card_id, travel_date, travel_from, travel_to, travel_class, travel_cost):
        self._fare(travel_from, travel_to, travel_class)
        limit = self.state["budget_limit"]
        if limit is not None and travel_cost > limit:
            raise ExecutionError("financial", f"cost {travel_cost} exceeds budget {limit}", "travel_cost")
        self._charge(card_id, travel_cost, "travel_cost")
        booking_id = self._next_id("booking")
        self.state["bookings"][booking_id] = {
            "card_id": card_id, "travel_date": travel_date, "travel_from": travel_from,
            "travel_to": travel_to, "travel_class": travel_class, "travel_cost": travel_cost,
        }
        return booking_id

    def do_retrieve_invoice(self, booking_id=None, insurance_id=None):
        invoice = {}
        if booking_id is not None:
            invoice["booking"] = self.state["bookings"][booking_id]
        if insurance_id is not None:
            invoice["insurance"] = self.state["insurances"][insurance_id]
        return invoice

    def do_list_all_airports(self):
        return list(self.state["airports"])

    def do_cancel_booking(self, booking_id):
        booking = self.state["bookings"].pop(booking_id)
        card = self.state["cards"].get(booking["card_id"])
        if card is not None:
            card["balance"] = round(card["balance"] + booking["travel_cost"], 2)
        for ins_id in [k for k, v in self.state["insurances"].items() if v["booking_id"] == booking_id]:
            del self.state["insurances"][ins_id]
        return True

    def do_compute_exchange_rate(self, base_currency, target_currency, value):
        return round(value / USD_RATE[base_currency] * USD_RATE[target_currency], 4)

    def do_verify_traveler_information(self, first_name, last_name, date_of_birth, passport_number):
        return {"verified": bool(first_name and last_name and passport_number)}

    def do_set_budget_limit(self, budget_limit):
        self.state["budget_limit"] = budget_limit

    def do_get_nearest_airport_by_city(self, location):
        return self.state["city_airports"][location]

    def do_purchase_insurance(self, insurance_type, booking_id, insurance_cost, card_id):
        self._charge(card_id, insurance_cost, "insurance_cost")
        ins_id = self._next_id("insurance")
        self.state["insurances"][ins_id] = {
            "insurance_type": insurance_type, "booking_id": booking_id, "insurance_cost": insurance_cost,
        }
        return ins_id

    def do_contact_customer_support(self, booking_id, message):
        self.state["support_log"].append({"booking_id": booking_id, "message": message})

    def do_get_all_credit_cards(self):
        return sorted(self.state["cards"])
