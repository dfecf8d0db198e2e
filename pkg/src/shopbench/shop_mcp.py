"""Per-shop MCP servers.

The four shops expose the same capabilities (search, product detail, session,
add-to-cart, checkout) under different tool names, parameter names, price
units and result shapes.  Full schemas are documented in
``docs/shop_schemas.md``.

Price units per shop:

* shop1 -- ``price_usd``: decimal dollars as a JSON number
* shop2 -- ``cost_cents``: integer cents plus ``currency``
* shop3 -- ``price``: decimal string such as ``"199.00"``
* shop4 -- ``price``: ``{"amount": 199.0, "currency": "USD"}``
"""

from __future__ import annotations

from typing import Any, Callable

from .backend import Backend
from .catalog import Offer
from .commerce import CartView, CommerceError, Order, Payment, Shipping
from .jsonrpc import MCPServer, Tool, ToolError, object_schema

STR = {"type": "string"}
LIMIT = {"type": "integer", "minimum": 0, "maximum": 100}
QTY = {"type": "integer", "minimum": 1}


def _dollars(cents: int) -> float:
    return round(cents / 100, 2)


def _decimal(cents: int) -> str:
    return f"{cents // 100}.{cents % 100:02d}"


class _ShopTools:
    """Shared plumbing; the per-shop builders below map it into each vocabulary."""

    def __init__(self, backend: Backend, shop_id: str):
        self.backend = backend
        self.catalog = backend.catalog
        self.shop_id = shop_id

    def search(self, query: str, k: int) -> list[Offer]:
        hits = self.backend.offer_index.search(query, k, shop_filter=self.shop_id)
        return [self.catalog.get(h.doc.offer_id) for h in hits]

    def offer(self, offer_id: str) -> Offer:
        o = self.catalog.get(offer_id)
        if o is None or o.shop_id != self.shop_id:
            raise ToolError(f"unknown product: {offer_id}")
        return o

    def session(self) -> str:
        return self.backend.store.create_session()

    def add(self, sid: str, offer_id: str, qty: int) -> CartView:
        try:
            return self.backend.store.add_to_cart(sid, self.shop_id, offer_id, qty)
        except CommerceError as exc:
            raise ToolError(str(exc)) from None

    def checkout(self, sid: str, shipping: dict, card_number: Any) -> Order:
        try:
            ship = Shipping.from_mapping(shipping)
            pay = Payment.from_card(card_number if isinstance(card_number, str) else "", ship.name)
            return self.backend.store.checkout(sid, self.shop_id, ship, pay)
        except CommerceError as exc:
            raise ToolError(str(exc)) from None

    def title(self, offer_id: str) -> str:
        return self.catalog.get(offer_id).title


# --- shop1 ----------------------------------------------------------------------


def _shop1(t: _ShopTools) -> list[Tool]:
    def item(o: Offer) -> dict:
        return {"product_id": o.offer_id, "name": o.title, "price_usd": _dollars(o.price_cents), "url": o.url}

    def lines(items) -> list[dict]:
        return [{"product_id": li.offer_id, "name": t.title(li.offer_id), "qty": li.quantity,
                 "price_usd": _dollars(li.unit_price_cents), "subtotal_usd": _dollars(li.subtotal_cents)}
                for li in items]

    def get_product(a):
        o = t.offer(a["product_id"])
        return {**item(o), "description": o.description, "category": list(o.category_path),
                "attributes": dict(o.attributes)}

    def checkout(a):
        s = a["shipping"]
        order = t.checkout(a["session"], {"name": s.get("name"), "street": s.get("street"), "city": s.get("city"),
                                          "postal_code": s.get("zip"), "country": s.get("country")},
                           a["card"].get("number"))
        return {"order_id": order.order_id, "status": "confirmed", "items": lines(order.items),
                "total_usd": _dollars(order.total_cents)}

    def add_item(a):
        cart = t.add(a["session"], a["product_id"], a.get("qty", 1))
        return {"session": cart.session_id, "items": lines(cart.lines), "total_usd": _dollars(cart.total_cents)}

    return [
        Tool("search_products", "Search the VoltMart catalog. Returns up to max_results products (prices in USD).",
             object_schema({"query": STR, "max_results": LIMIT}, ["query"]),
             lambda a: {"items": [item(o) for o in t.search(a["query"], a.get("max_results", 10))]}),
        Tool("get_product", "Full details of one product by product_id.",
             object_schema({"product_id": STR}, ["product_id"]),
             get_product),
        Tool("create_session", "Start a shopping session. Returns a session id for add_item and checkout.",
             object_schema({}), lambda a: {"session": t.session()}),
        Tool("add_item", "Add qty units of product_id to the session's cart. Returns the cart.",
             object_schema({"session": STR, "product_id": STR, "qty": QTY}, ["session", "product_id"]), add_item),
        Tool("checkout", "Place the order for everything in the cart.",
             object_schema({
                 "session": STR,
                 "shipping": object_schema({"name": STR, "street": STR, "city": STR, "zip": STR, "country": STR},
                                           ["name", "street", "city", "zip", "country"]),
                 "card": object_schema({"number": STR, "expiry": STR, "cvc": STR}, ["number"]),
             }, ["session", "shipping", "card"]), checkout),
    ]


# --- shop2 ----------------------------------------------------------------------


def _shop2(t: _ShopTools) -> list[Tool]:
    def result(o: Offer) -> dict:
        return {"id": o.offer_id, "title": o.title, "cost_cents": o.price_cents, "currency": o.currency, "link": o.url}

    def cart_lines(items) -> list[dict]:
        return [{"id": li.offer_id, "title": t.title(li.offer_id), "count": li.quantity,
                 "cost_cents": li.unit_price_cents} for li in items]

    def currency(items) -> str:
        return t.catalog.get(items[0].offer_id).currency if items else "USD"

    def offer_details(a):
        o = t.offer(a["id"])
        return {**result(o), "text": o.description, "categories": list(o.category_path), "specs": dict(o.attributes)}

    def put_in_cart(a):
        cart = t.add(a["cart"], a["id"], a.get("count", 1))
        return {"cart": cart.session_id, "lines": cart_lines(cart.lines), "total_cents": cart.total_cents,
                "currency": currency(cart.lines)}

    def purchase(a):
        s = a["ship_to"]
        order = t.checkout(a["cart"], {"name": s.get("recipient"), "street": s.get("address_line"),
                                       "city": s.get("city"), "postal_code": s.get("postal_code"),
                                       "country": s.get("country")}, a["payment"].get("card_number"))
        return {"purchase_id": order.order_id, "lines": cart_lines(order.items), "total_cents": order.total_cents,
                "currency": currency(order.items)}

    return [
        Tool("find_offers", "Find offers at ByteBazaar matching q. Prices are integer cents.",
             object_schema({"q": STR, "top_k": LIMIT}, ["q"]),
             lambda a: {"results": [result(o) for o in t.search(a["q"], a.get("top_k", 10))]}),
        Tool("offer_details", "Detailed record for one offer id.",
             object_schema({"id": STR}, ["id"]),
             offer_details),
        Tool("new_cart", "Open a new cart. Returns the cart id used by put_in_cart and purchase.",
             object_schema({}), lambda a: {"cart": t.session()}),
        Tool("put_in_cart", "Put count units of offer id into the cart.",
             object_schema({"cart": STR, "id": STR, "count": QTY}, ["cart", "id"]), put_in_cart),
        Tool("purchase", "Buy the contents of the cart.",
             object_schema({
                 "cart": STR,
                 "ship_to": object_schema({"recipient": STR, "address_line": STR, "city": STR, "postal_code": STR,
                                           "country": STR},
                                          ["recipient", "address_line", "city", "postal_code", "country"]),
                 "payment": object_schema({"card_number": STR, "exp_month": {"type": "integer"},
                                           "exp_year": {"type": "integer"}}, ["card_number"]),
             }, ["cart", "ship_to", "payment"]), purchase),
    ]


# --- shop3 ----------------------------------------------------------------------


def _shop3(t: _ShopTools) -> list[Tool]:
    def hit(o: Offer) -> dict:
        return {"sku": o.offer_id, "label": o.title, "price": _decimal(o.price_cents), "page": o.url}

    def basket(items) -> list[dict]:
        return [{"sku": li.offer_id, "label": t.title(li.offer_id), "n": li.quantity,
                 "price": _decimal(li.unit_price_cents)} for li in items]

    def lookup(a):
        o = t.offer(a["sku"])
        return {**hit(o), "summary": o.description, "section": " / ".join(o.category_path),
                "properties": dict(o.attributes)}

    def cart_add(a):
        cart = t.add(a["sid"], a["sku"], a.get("n", 1))
        return {"sid": cart.session_id, "basket": basket(cart.lines), "sum": _decimal(cart.total_cents)}

    def finalize(a):
        ad = a["address"]
        order = t.checkout(a["sid"], {"name": ad.get("full_name"), "street": ad.get("line1"), "city": ad.get("town"),
                                      "postal_code": ad.get("postcode"), "country": ad.get("country")},
                           a["card_no"])
        return {"confirmation": order.order_id, "basket": basket(order.items), "sum": _decimal(order.total_cents)}

    return [
        Tool("product_search", "Search CircuitCorner products by free text. Prices are decimal strings.",
             object_schema({"text": STR, "limit": LIMIT}, ["text"]),
             lambda a: {"hits": [hit(o) for o in t.search(a["text"], a.get("limit", 10))]}),
        Tool("lookup", "Look up a product by sku.",
             object_schema({"sku": STR}, ["sku"]),
             lookup),
        Tool("open_session", "Open a session; returns sid.", object_schema({}), lambda a: {"sid": t.session()}),
        Tool("cart_add", "Add n units of sku to the basket of session sid.",
             object_schema({"sid": STR, "sku": STR, "n": QTY}, ["sid", "sku"]), cart_add),
        Tool("finalize", "Finalize the purchase of the basket.",
             object_schema({
                 "sid": STR,
                 "address": object_schema({"full_name": STR, "line1": STR, "town": STR, "postcode": STR,
                                           "country": STR}, ["full_name", "line1", "town", "postcode", "country"]),
                 "card_no": STR,
             }, ["sid", "address", "card_no"]), finalize),
    ]


# --- shop4 ----------------------------------------------------------------------


def _shop4(t: _ShopTools) -> list[Tool]:
    def money(cents: int, currency: str) -> dict:
        return {"amount": _dollars(cents), "currency": currency}

    def match(o: Offer) -> dict:
        return {"ref": o.offer_id, "title": o.title, "price": money(o.price_cents, o.currency), "href": o.url}

    def contents(items) -> list[dict]:
        return [{"ref": li.offer_id, "title": t.title(li.offer_id), "qty": li.quantity,
                 "price": money(li.unit_price_cents, t.catalog.get(li.offer_id).currency)} for li in items]

    def total(items, cents) -> dict:
        return money(cents, t.catalog.get(items[0].offer_id).currency if items else "USD")

    def describe(a):
        o = t.offer(a["ref"])
        return {**match(o), "details": o.description, "breadcrumb": list(o.category_path),
                "features": dict(o.attributes)}

    def add(a):
        cart = t.add(a["token"], a["ref"], a.get("qty", 1))
        return {"token": cart.session_id, "contents": contents(cart.lines),
                "grand_total": total(cart.lines, cart.total_cents)}

    def complete_order(a):
        d = a["delivery"]
        order = t.checkout(a["token"], {"name": d.get("addressee"), "street": d.get("address"), "city": d.get("town"),
                                        "postal_code": d.get("zip_code"), "country": d.get("country")},
                           a["pay"].get("pan"))
        return {"order": {"number": order.order_id, "contents": contents(order.items),
                          "grand_total": total(order.items, order.total_cents)}}

    return [
        Tool("query_catalog", "Query the PixelPoint catalog with keywords; returns n matches with price objects.",
             object_schema({"keywords": STR, "n": LIMIT}, ["keywords"]),
             lambda a: {"matches": [match(o) for o in t.search(a["keywords"], a.get("n", 10))]}),
        Tool("describe", "Describe the product with the given ref.",
             object_schema({"ref": STR}, ["ref"]),
             describe),
        Tool("begin", "Begin a shopping session; returns a token.", object_schema({}),
             lambda a: {"token": t.session()}),
        Tool("add", "Add qty of ref to the cart identified by token.",
             object_schema({"ref": STR, "qty": QTY, "token": STR}, ["ref", "token"]), add),
        Tool("complete_order", "Complete the order for the token's cart.",
             object_schema({
                 "token": STR,
                 "delivery": object_schema({"addressee": STR, "address": STR, "town": STR, "zip_code": STR,
                                            "country": STR}, ["addressee", "address", "town", "zip_code", "country"]),
                 "pay": object_schema({"pan": STR, "expiry": STR}, ["pan"]),
             }, ["token", "delivery", "pay"]), complete_order),
    ]


_BUILDERS: dict[str, Callable[[_ShopTools], list[Tool]]] = {
    "shop1": _shop1, "shop2": _shop2, "shop3": _shop3, "shop4": _shop4,
}

# Name of each shop's search tool and the argument names for query and limit,
# plus the field holding the offer id in a search result list.
SEARCH_TOOLS = {
    "shop1": ("search_products", "query", "max_results", "items", "product_id"),
    "shop2": ("find_offers", "q", "top_k", "results", "id"),
    "shop3": ("product_search", "text", "limit", "hits", "sku"),
    "shop4": ("query_catalog", "keywords", "n", "matches", "ref"),
}


def build_mcp_server(backend: Backend, shop_id: str) -> MCPServer:
    if shop_id not in _BUILDERS:
        raise ValueError(f"no MCP schema defined for shop {shop_id!r}")
    return MCPServer(f"{shop_id}-mcp", _BUILDERS[shop_id](_ShopTools(backend, shop_id)))


def search_args(shop_id: str, query: str, k: int) -> tuple[str, dict]:
    """Tool name and arguments for a search on ``shop_id``'s MCP server."""
    name, q, lim, _, _ = SEARCH_TOOLS[shop_id]
    return name, {q: query, lim: k}


def search_result_ids(shop_id: str, structured: dict) -> list[str]:
    _, _, _, key, id_field = SEARCH_TOOLS[shop_id]
    return [r[id_field] for r in structured[key]]
