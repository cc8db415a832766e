"""Brokerage account with stocks, orders, holdings and a watchlist."""

from __future__ import annotations

import re
from functools import lru_cache

from ..schema import Finite, ListOf, NumericRange, Text, ToolSchema, Toolkit
from .base import DomainUpdateRule, Environment, ExecutionError, P, finite_or_empty

SECTORS = ("Technology", "Automobile", "Healthcare", "Finance", "Energy")
_TIME_RE = re.compile(r"(\d{1,2}):(\d{2}) (AM|PM)")
OPEN_STATES = ("Open", "Pending")


@lru_cache(maxsize=None)
def toolkit() -> Toolkit:
    symbol = Text()
    price = NumericRange(0.01, 10000.0)
    order_id = NumericRange(1, 99999, True)
    return Toolkit((
        ToolSchema("get_current_time", ()),
        ToolSchema("update_market_status", (P("current_time_str", Text()),)),
        ToolSchema("get_symbol_by_name", (P("name", Text()),)),
        ToolSchema("get_stock_info", (P("symbol", symbol, dep=True),)),
        ToolSchema("get_order_details", (P("order_id", order_id, dep=True),)),
        ToolSchema("cancel_order", (P("order_id", order_id, dep=True),)),
        ToolSchema("place_order", (
            P("order_type", Finite(("Buy", "Sell"))),
            P("symbol", symbol, dep=True),
            P("price", price),
            P("amount", NumericRange(1, 10000, True)),
        )),
        ToolSchema("make_transaction", (
            P("xact_type", Finite(("deposit", "withdrawal"))),
            P("amount", NumericRange(0.01, 1000000.0)),
        )),
        ToolSchema("get_account_info", ()),
        ToolSchema("fund_account", (P("amount", NumericRange(0.01, 1000000.0)),)),
        ToolSchema("remove_stock_from_watchlist", (P("symbol", symbol, dep=True),)),
        ToolSchema("get_watchlist", ()),
        ToolSchema("get_order_history", ()),
        ToolSchema("get_transaction_history", (
            P("start_date", Text(), required=False, default=True),
            P("end_date", Text(), required=False, default=True),
        )),
        ToolSchema("update_stock_price", (P("symbol", symbol, dep=True), P("new_price", price))),
        ToolSchema("get_available_stocks", (P("sector", Finite(SECTORS)),)),
        ToolSchema("filter_stocks_by_price", (
            P("stocks", ListOf(Text())),
            P("min_price", price),
            P("max_price", price),
        )),
        ToolSchema("add_to_watchlist", (P("stock", symbol, dep=True),)),
        ToolSchema("notify_price_change", (P("stocks", ListOf(Text())), P("threshold", NumericRange(0.01, 100.0)))),
    ))


# Calls that succeed on the fixture state, one fresh environment each.
SAMPLES = (
    ("place_order", {"order_type": "Buy", "symbol": "AAPL", "price": 227.16, "amount": 10}),
    ("place_order", {"order_type": "Sell", "symbol": "TSLA", "price": 667.92, "amount": 5}),
    ("cancel_order", {"order_id": 12447}),
    ("get_order_details", {"order_id": 12345}),
    ("get_stock_info", {"symbol": "NVDA"}),
    ("add_to_watchlist", {"stock": "TSLA"}),
    ("remove_stock_from_watchlist", {"symbol": "NVDA"}),
    ("make_transaction", {"xact_type": "withdrawal", "amount": 500.0}),
    ("fund_account", {"amount": 1000.0}),
    ("update_stock_price", {"symbol": "MSFT", "new_price": 320.5}),
    ("get_available_stocks", {"sector": "Healthcare"}),
    ("filter_stocks_by_price", {"stocks": ["AAPL", "FORD", "JPM"], "min_price": 10.0, "max_price": 250.0}),
    ("update_market_status", {"current_time_str": "10:30 AM"}),
    ("get_symbol_by_name", {"name": "Tesla Inc"}),
    ("notify_price_change", {"stocks": ["AAPL", "TSLA"], "threshold": 1.0}),
)


class TradingEnv(Environment):
    sample_table = SAMPLES
    name = "trading"
    entity_params = frozenset({
        ("get_stock_info", "symbol"), ("place_order", "symbol"), ("update_stock_price", "symbol"),
        ("add_to_watchlist", "stock"), ("remove_stock_from_watchlist", "symbol"),
        ("get_order_details", "order_id"), ("cancel_order", "order_id"),
    })
    defaults = {"get_transaction_history": {"start_date": None, "end_date": None}}

    @classmethod
    def toolkit(cls) -> Toolkit:
        return toolkit()

    def build_rules(self) -> list:
        return [
            DomainUpdateRule(
                "place_order|cancel_order",
                (("get_order_details", "order_id"),),
                lambda s: finite_or_empty(o["id"] for o in s["orders"]),
                "order ids -> inspectable orders",
            ),
            DomainUpdateRule(
                "place_order|cancel_order",
                (("cancel_order", "order_id"),),
                lambda s: finite_or_empty(o["id"] for o in s["orders"] if o["status"] in OPEN_STATES),
                "order ids -> manageable orders",
            ),
            DomainUpdateRule(
                "update_stock_price",
                (("place_order", "symbol"), ("get_stock_info", "symbol"), ("update_stock_price", "symbol"),
                 ("add_to_watchlist", "stock")),
                lambda s: finite_or_empty(sorted(s["stocks"])),
                "available stocks -> tradeable symbols",
            ),
            DomainUpdateRule(
                "add_to_watchlist|remove_stock_from_watchlist",
                (("remove_stock_from_watchlist", "symbol"),),
                lambda s: finite_or_empty(s["watchlist"]),
                "watchlist -> removable stocks",
            ),
        ]

    def _order(self, order_id):
        for o in self.state["orders"]:
            if o["id"] == order_id:
                return o
        raise ExecutionError("missing-entity", f"no order {order_id}", "order_id")

    def _record(self, kind, amount):
        self.state["transactions"].append({"type": kind, "amount": amount, "date": self.state["date"]})

    # -- tools ----------------------------------------------------------------

    def do_get_current_time(self):
        return self.state["time"]

    def do_update_market_status(self, current_time_str):
        m = _TIME_RE.fullmatch(current_time_str)
        if not m or not (1 <= int(m.group(1)) <= 12) or int(m.group(2)) > 59:
            raise ExecutionError("invalid-enum", f"time {current_time_str!r} is not HH:MM AM/PM", "current_time_str")
        hour = int(m.group(1)) % 12 + (12 if m.group(3) == "PM" else 0)
        minutes = hour * 60 + int(m.group(2))
        self.state["market_status"] = "Open" if 9 * 60 + 30 <= minutes < 16 * 60 else "Closed"
        return self.state["market_status"]

    def do_get_symbol_by_name(self, name):
        for sym, info in sorted(self.state["stocks"].items()):
            if info["name"] == name:
                return sym
        raise ExecutionError("missing-entity", f"no company named {name!r}", "name")

    def do_get_stock_info(self, symbol):
        return dict(self.state["stocks"][symbol])

    def do_get_order_details(self, order_id):
        return dict(self._order(order_id))

    def do_cancel_order(self, order_id):
        order = self._order(order_id)
        order["status"] = "Cancelled"
        if order["order_type"] == "Buy":
            self.state["account"]["balance"] = round(
                self.state["account"]["balance"] + order["price"] * order["amount"], 2
            )
        return order_id

    def do_place_order(self, order_type, symbol, price, amount):
        account = self.state["account"]
        if order_type == "Buy":
            total = round(price * amount, 2)
            if total > account["balance"]:
                raise ExecutionError("financial", f"order total {total} exceeds balance {account['balance']}",
                                     "amount")
            account["balance"] = round(account["balance"] - total, 2)
        else:
            held = self.state["holdings"].get(symbol, 0)
            if amount > held:
                raise ExecutionError("financial", f"cannot sell {amount} shares of {symbol}, holding {held}",
                                     "amount")
            self.state["holdings"][symbol] = held - amount
        order_id = self.state["next_order_id"]
        self.state["next_order_id"] += 1
        self.state["orders"].append({
            "id": order_id, "order_type": order_type, "symbol": symbol,
            "price": price, "amount": amount, "status": "Open",
        })
        return order_id

    def do_make_transaction(self, xact_type, amount):
        account = self.state["account"]
        if xact_type == "withdrawal":
            if amount > account["balance"]:
                raise ExecutionError("financial", f"withdrawal {amount} exceeds balance {account['balance']}",
                                     "amount")
            account["balance"] = round(account["balance"] - amount, 2)
        else:
            account["balance"] = round(account["balance"] + amount, 2)
        self._record(xact_type, amount)
        return account["balance"]

    def do_get_account_info(self):
        return dict(self.state["account"])

    def do_fund_account(self, amount):
        return self.do_make_transaction("deposit", amount)

    def do_remove_stock_from_watchlist(self, symbol):
        self.state["watchlist"].remove(symbol)

    def do_get_watchlist(self):
        return list(self.state["watchlist"])

    def do_get_order_history(self):
        return [o["id"] for o in self.state["orders"]]

    def do_get_transaction_history(self, start_date=None, end_date=None):
        return [
            t for t in self.state["transactions"]
            if (start_date is None or t["date"] >= start_date) and (end_date is None or t["date"] <= end_date)
        ]

    def do_update_stock_price(self, symbol, new_price):
        stock = self.state["stocks"][symbol]
        old = stock["price"]
        stock["percent_change"] = round((new_price - old) / old * 100, 4)
        stock["price"] = new_price
        return dict(stock)

    def do_get_available_stocks(self, sector):
        return sorted(s for s, info in self.state["stocks"].items() if info["sector"] == sector)

    def do_filter_stocks_by_price(self, stocks, min_price, max_price):
        if min_price > max_price:
            raise ExecutionError("out-of-range", f"min_price {min_price} above max_price {max_price}",
                                 "min_price", "max_price")
        known = self.state["stocks"]
        return [s for s in stocks if s in known and min_price <= known[s]["price"] <= max_price]

    def do_add_to_watchlist(self, stock):
        if stock in self.state["watchlist"]:
            raise ExecutionError("duplicate", f"{stock} is already on the watchlist", "stock")
        self.state["watchlist"].append(stock)
        return list(self.state["watchlist"])

    def do_notify_price_change(self, stocks, threshold):
        known = self.state["stocks"]
        moved = [s for s in stocks if s in known and abs(known[s]["percent_change"]) >= threshold]
        return moved
