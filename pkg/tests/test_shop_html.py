import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shopbench.shop_html import (SESSION_COOKIE, extract_page_model, format_price, render_product_page,
                                 search_offers, slugify)
from shopbench.search_index import clean_html


def test_format_price():
    assert format_price(123456, "USD") == "$1,234.56"
    assert format_price(5, "EUR") == "€0.05"
    assert format_price(100, "CHF") == "1.00 CHF"


def test_slugify():
    assert slugify("Keyboards & Mice") == "keyboards-mice"
    assert slugify("***") == "x"


def test_product_page_contents(catalog):
    o = catalog.get("D-017")
    html = render_product_page(catalog, o)
    page = extract_page_model(html, o.url)
    assert o.title in page.headings
    assert "$189.99" in page.main_text
    form = next(f for f in page.forms if f.action.endswith("/cart/add"))
    assert form.method == "POST"
    assert {f.name: f.value for f in form.fields}["offer_id"] == "D-017"
    assert o.description in clean_html(html)


def test_search_is_token_and(catalog):
    hits = search_offers(catalog, "shop2", "990 pro")
    assert [o.offer_id for o in hits] == ["D-017"]
    assert search_offers(catalog, "shop2", "") == []
    assert search_offers(catalog, "shop2", "990 unicorn") == []


def test_routes(client, catalog):
    r = client.get("http://shop1.local/")
    assert r.status_code == 200 and "VoltMart" in r.text
    o = catalog.offers_in("shop1")[0]
    assert client.get(o.url).status_code == 200
    assert client.get("http://shop1.local/product/D-017").status_code == 404  # other shop's offer
    assert client.get("http://shop1.local/nope").status_code == 404
    assert client.get("http://shop1.local/category/does-not-exist").status_code == 404
    assert client.get("http://shop2.local/search", params={"q": "ryzen"}).status_code == 200


def test_category_pages_reach_every_offer(client, catalog):
    seen = set()
    home = extract_page_model(client.get("http://shop3.local/").text, "http://shop3.local/")
    for link in home.content_links():
        page = extract_page_model(client.get(link.href).text, link.href)
        seen.update(l.href for l in page.content_links() if "/product/" in l.href)
    assert seen == {o.url for o in catalog.offers_in("shop3")}


def test_cart_and_checkout_by_form(client):
    r = client.post("http://shop1.local/cart/add", data={"offer_id": "D-003", "quantity": "2"})
    assert r.status_code == 303
    assert SESSION_COOKIE in r.cookies
    cart = client.get("http://shop1.local/cart")
    assert "Samsung" in cart.text and "$398.00" in cart.text
    page = extract_page_model(cart.text, "http://shop1.local/cart")
    checkout = next(f for f in page.forms if f.action.endswith("/checkout"))
    assert {f.name for f in checkout.fields} >= {"name", "street", "card_number"}
    r = client.post("http://shop1.local/checkout", data={
        "name": "A B", "street": "1 St", "city": "C", "postal_code": "1", "country": "US",
        "card_number": "4111111111111111"}, follow_redirects=True)
    assert r.status_code == 200 and "confirmed" in r.text
    assert "Your cart is empty" in client.get("http://shop1.local/cart").text


@pytest.mark.parametrize("data", [{"offer_id": "D-003", "quantity": "0"}, {"offer_id": "NOPE"},
                                  {"offer_id": "D-003", "quantity": "x"}])
def test_bad_add_is_400(client, data):
    assert client.post("http://shop1.local/cart/add", data=data).status_code == 400


def test_checkout_with_bad_card_is_400(client):
    client.post("http://shop1.local/cart/add", data={"offer_id": "D-003"})
    r = client.post("http://shop1.local/checkout", data={
        "name": "A", "street": "1", "city": "C", "postal_code": "1", "country": "US", "card_number": "1"})
    assert r.status_code == 400 and "invalid card number" in r.text


def test_page_model_regions_and_digest():
    html = ('<html><head><title>T</title></head><body><header><a href="/">Home</a></header>'
            '<main><h1>Hi</h1><a href="p/1">One</a><form action="/go" method="post">'
            '<input name="q" required><select name="s"><option value="a">A</option>'
            '<option value="b" selected>B</option></select><textarea name="t"></textarea>'
            '<button>Go</button></form></main></body></html>')
    page = extract_page_model(html, "http://x.local/dir/")
    assert [(l.href, l.region) for l in page.links] == [("http://x.local/", "nav"),
                                                         ("http://x.local/dir/p/1", "main")]
    f = page.forms[0]
    assert f.action == "http://x.local/go" and f.method == "POST"
    assert [(x.name, x.type, x.value, x.required) for x in f.fields] == [
        ("q", "text", "", True), ("s", "select", "b", False), ("t", "textarea", "", False)]
    d = page.digest()
    assert "[1] One -> http://x.local/dir/p/1" in d and "Headings: Hi" in d


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["shop1", "shop2", "shop3", "shop4"]),
       st.lists(st.sampled_from(["amd", "ryzen", "ssd", "2tb", "sony", "keyboard", "xbox", "ddr5", "pro", "zz"]),
                max_size=3))
def test_search_results_belong_to_the_shop(catalog, shop_id, words):
    hits = search_offers(catalog, shop_id, " ".join(words))
    assert all(o.shop_id == shop_id for o in hits)
    assert len({o.offer_id for o in hits}) == len(hits)
    for o in hits:
        text = (o.title + " " + o.description).lower()
        assert all(w in text for w in words)
