"""NLWeb endpoints: a natural-language ``ask`` tool with schema.org results.

All four shops expose byte-identical tool lists.  ``ask`` runs the same
shop-restricted embedding search as the MCP search tools, and the cart tools
take product URLs instead of shop-internal ids.
"""

from __future__ import annotations

from .backend import Backend
from .catalog import Offer
from .commerce import CommerceError, Payment, Shipping
from .jsonrpc import MCPServer, Tool, ToolError, object_schema

STR = {"type": "string"}

SHIPPING_SCHEMA = object_schema(
    {"name": STR, "street": STR, "city": STR, "postal_code": STR, "country": STR},
    ["name", "street", "city", "postal_code", "country"])
PAYMENT_SCHEMA = object_schema({"card_number": STR, "expiry": STR, "holder": STR}, ["card_number"])


def _decimal(cents: int) -> str:
    return f"{cents // 100}.{cents % 100:02d}"


def schema_org_item(offer: Offer) -> dict:
    return {
        "@type": "Product",
        "name": offer.title,
        "description": offer.description,
        "url": offer.url,
        "offers": {"@type": "Offer", "price": _decimal(offer.price_cents), "priceCurrency": offer.currency},
    }


def validate_schema_org_item(item: object) -> bool:
    """True when ``item`` has exactly the Product/Offer shape returned by ``ask``."""
    if not isinstance(item, dict) or set(item) != {"@type", "name", "description", "url", "offers"}:
        return False
    if item["@type"] != "Product" or not all(isinstance(item[k], str) for k in ("name", "description", "url")):
        return False
    off = item["offers"]
    return (isinstance(off, dict) and set(off) == {"@type", "price", "priceCurrency"}
            and off["@type"] == "Offer" and isinstance(off["price"], str) and isinstance(off["priceCurrency"], str))


def build_nlweb_server(backend: Backend, shop_id: str) -> MCPServer:
    catalog = backend.catalog
    store = backend.store

    def commerce(fn):
        try:
            return fn()
        except CommerceError as exc:
            raise ToolError(str(exc)) from None

    def line(li) -> dict:
        o = catalog.get(li.offer_id)
        return {"@type": "OrderItem", "orderedItem": {"@type": "Product", "name": o.title, "url": o.url},
                "orderQuantity": li.quantity, "price": _decimal(li.unit_price_cents), "priceCurrency": o.currency}

    def currency(items) -> str:
        return catalog.get(items[0].offer_id).currency if items else "USD"

    def cart_view(cart) -> dict:
        return {"session": cart.session_id, "items": [line(li) for li in cart.lines],
                "total": {"@type": "PriceSpecification", "price": _decimal(cart.total_cents),
                          "priceCurrency": currency(cart.lines)}}

    def ask(a):
        hits = backend.offer_index.search(a["query"], a.get("limit", 10), shop_filter=shop_id)
        return {"results": [schema_org_item(catalog.get(h.doc.offer_id)) for h in hits]}

    def add_to_cart(a):
        offer = catalog.offer_by_url(a["url"])
        if offer is None:
            raise ToolError(f"unknown product: {a['url']}")
        if offer.shop_id != shop_id:
            raise ToolError(f"unknown product: {a['url']} is not sold by this shop")
        return cart_view(commerce(lambda: store.add_to_cart(a["session"], shop_id, offer.offer_id,
                                                           a.get("quantity", 1))))

    def view_cart(a):
        return cart_view(commerce(lambda: store.view_cart(a["session"], shop_id)))

    def checkout(a):
        def run():
            ship = Shipping.from_mapping(a["shipping"])
            pay = Payment.from_card(a["payment"]["card_number"], a["payment"].get("holder") or ship.name)
            return store.checkout(a["session"], shop_id, ship, pay)
        order = commerce(run)
        return {"@type": "Order", "orderNumber": order.order_id, "orderStatus": "OrderProcessing",
                "orderedItem": [line(li) for li in order.items],
                "totalPaymentDue": {"@type": "PriceSpecification", "price": _decimal(order.total_cents),
                                    "priceCurrency": currency(order.items)}}

    tools = [
        Tool("ask", "Ask the shop a natural-language question about its products. "
                    "Returns up to limit schema.org Product records.",
             object_schema({"query": STR, "limit": {"type": "integer", "minimum": 0, "maximum": 100}}, ["query"]),
             ask),
        Tool("create_session", "Start a shopping session and return its id.", object_schema({}),
             lambda a: {"session": store.create_session()}),
        Tool("add_to_cart", "Add the product with the given URL to the session's cart.",
             object_schema({"session": STR, "url": STR, "quantity": {"type": "integer", "minimum": 1}},
                           ["session", "url"]), add_to_cart),
        Tool("view_cart", "Show the session's cart.", object_schema({"session": STR}, ["session"]), view_cart),
        Tool("checkout", "Check out the session's cart with shipping address and payment card.",
             object_schema({"session": STR, "shipping": SHIPPING_SCHEMA, "payment": PAYMENT_SCHEMA},
                           ["session", "shipping", "payment"]), checkout),
    ]
    return MCPServer("nlweb", tools)
