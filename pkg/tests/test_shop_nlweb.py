import pytest

from shopbench.jsonrpc import INVALID_PARAMS
from shopbench.shop_nlweb import build_nlweb_server, schema_org_item, validate_schema_org_item

from .test_shop_mcp import call, ok


@pytest.fixture
def servers(backend):
    return {s: build_nlweb_server(backend, s) for s in backend.catalog.shop_ids}


def test_tool_lists_identical(servers):
    lists = [srv.list_tools() for srv in servers.values()]
    assert all(x == lists[0] for x in lists)
    assert [t["name"] for t in lists[0]] == ["ask", "create_session", "add_to_cart", "view_cart", "checkout"]


def test_schema_org_item(catalog):
    item = schema_org_item(catalog.get("D-038"))
    assert item == {"@type": "Product", "name": catalog.get("D-038").title,
                    "description": catalog.get("D-038").description, "url": "http://shop3.local/product/D-038",
                    "offers": {"@type": "Offer", "price": "98.90", "priceCurrency": "USD"}}
    assert validate_schema_org_item(item)
    assert not validate_schema_org_item({**item, "extra": 1})
    assert not validate_schema_org_item({**item, "offers": {**item["offers"], "price": 98.9}})


def test_ask_returns_schema_org(servers):
    data = ok(call(servers["shop4"], "ask", {"query": "Sony noise cancelling headphones", "limit": 3}))
    assert len(data["results"]) == 3
    assert all(validate_schema_org_item(i) for i in data["results"])
    assert data["results"][0]["url"] == "http://shop4.local/product/D-051"
    assert ok(call(servers["shop4"], "ask", {"query": "x", "limit": 0})) == {"results": []}


def test_cart_by_url_and_checkout(servers, backend):
    srv = servers["shop1"]
    sid = ok(call(srv, "create_session", {}))["session"]
    cart = ok(call(srv, "add_to_cart", {"session": sid, "url": "http://SHOP1.local/product/D-006/", "quantity": 2}))
    assert cart["items"][0]["orderQuantity"] == 2
    assert cart["total"]["@type"] == "PriceSpecification"
    assert ok(call(srv, "view_cart", {"session": sid}))["items"][0]["orderedItem"]["url"] == \
        "http://shop1.local/product/D-006"
    order = ok(call(srv, "checkout", {"session": sid, "payment": {"card_number": "4111111111111111"}, "shipping": {
        "name": "A", "street": "B", "city": "C", "postal_code": "D", "country": "E"}}))
    assert order["@type"] == "Order" and order["orderNumber"].startswith(sid)
    assert backend.store.snapshot_state(sid).orders == {"shop1": [{"D-006": 2}]}


def test_foreign_or_unknown_url(servers, backend):
    sid = backend.store.create_session()
    for url in ("http://shop4.local/product/D-051", "http://shop1.local/product/NOPE", "nonsense"):
        r = call(servers["shop1"], "add_to_cart", {"session": sid, "url": url})
        assert r["result"]["isError"] is True


def test_schema_violations(servers):
    assert call(servers["shop1"], "ask", {"q": "x"})["error"]["code"] == INVALID_PARAMS
    assert call(servers["shop1"], "checkout", {"session": "s", "shipping": {}, "payment": {}})["error"]["code"] \
        == INVALID_PARAMS
