import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shopbench.catalog import (DEFAULT_SHOPS, Catalog, CatalogError, Offer, UrlError, catalog_stats, is_under,
                               load_catalog, lower_median, normalize_url, parse_offer_id_from_path, product_url)


def write_catalog(tmp_path, records):
    p = tmp_path / "cat.jsonl"
    p.write_text("".join((r if isinstance(r, str) else json.dumps(r)) + "\n" for r in records), encoding="utf-8")
    return p


def rec(offer_id="X-1", shop_id="shop1", **kw):
    r = {"offer_id": offer_id, "shop_id": shop_id, "name": "Thing", "description": "d", "category": ["A", "B"],
         "price": "12.50", "priceCurrency": "USD", "attributes": {"ram_gb": 16}}
    r.update(kw)
    return r


def test_demo_catalog_shape(catalog):
    assert len(catalog) == 60
    assert catalog.shop_ids == ["shop1", "shop2", "shop3", "shop4"]
    stats = catalog_stats(catalog)
    assert stats.offers_per_shop == {"shop1": 15, "shop2": 15, "shop3": 15, "shop4": 15}
    assert stats.total_offers == 60
    for o in catalog.offers:
        assert o.url == f"{catalog.shop(o.shop_id).base_url}/product/{o.offer_id}"


def test_load_minimal_record(tmp_path):
    cat = load_catalog(write_catalog(tmp_path, [rec()]))
    o = cat.get("X-1")
    assert o.price_cents == 1250
    assert o.price_decimal == "12.50"
    assert o.category_path == ("A", "B")
    assert o.attributes == {"ram_gb": "16"}
    assert o.url == "http://shop1.local/product/X-1"
    assert cat.offer_by_url("HTTP://SHOP1.local/product/X-1/") is o


def test_unknown_fields_are_kept_but_ignored(tmp_path):
    cat = load_catalog(write_catalog(tmp_path, [rec(sku="abc")]))
    assert cat.get("X-1").extra == {"sku": "abc"}


@pytest.mark.parametrize("bad, fragment", [
    (rec(price="-1"), "bad price"),
    (rec(price="1.234"), "two decimals"),
    (rec(shop_id="shop9"), "unknown shop_id"),
    (rec(url="http://shop2.local/product/X-1"), "not under"),
    (rec(name=""), "non-empty"),
    ({"offer_id": "X"}, "missing field"),
    ("{not json", "malformed JSON"),
])
def test_invalid_records_report_line(tmp_path, bad, fragment):
    with pytest.raises(CatalogError) as ei:
        load_catalog(write_catalog(tmp_path, [rec("OK-1"), bad]))
    assert ei.value.line == 2
    assert fragment in str(ei.value)


def test_duplicate_offer_id_rejected(tmp_path):
    with pytest.raises(CatalogError, match="duplicate offer_id"):
        load_catalog(write_catalog(tmp_path, [rec(), rec()]))


def test_empty_catalog_is_valid(tmp_path):
    cat = load_catalog(write_catalog(tmp_path, []))
    assert len(cat) == 0
    assert catalog_stats(cat).median_title_length is None


def test_overlapping_shop_bases_rejected():
    from shopbench.catalog import Shop
    with pytest.raises(CatalogError, match="overlapping"):
        Catalog([Shop("a", "A", "http://x.local"), Shop("b", "B", "http://x.local/b")])


def test_shop_for_url(catalog):
    assert catalog.shop_for_url("http://shop3.local/search?q=x").shop_id == "shop3"
    assert catalog.shop_for_url("http://elsewhere.example/") is None
    assert catalog.shop_for_url("not a url") is None


@pytest.mark.parametrize("raw, canon", [
    ("HTTP://Shop1.LOCAL:80/product/A-1/", "http://shop1.local/product/A-1"),
    ("http://shop1.local", "http://shop1.local/"),
    ("http://shop1.local/a%2Db#frag", "http://shop1.local/a-b"),
    ("https://shop1.local:443/x?q=1", "https://shop1.local/x?q=1"),
    ("http://shop1.local:8080/x", "http://shop1.local:8080/x"),
    ("http://shop1.local/a%2fb", "http://shop1.local/a%2Fb"),
])
def test_normalize_url(raw, canon):
    assert normalize_url(raw) == canon


@pytest.mark.parametrize("bad", ["", "shop1.local/x", "http://", "http://a b/", "http://x:99999/"])
def test_normalize_url_rejects(bad):
    with pytest.raises(UrlError):
        normalize_url(bad)


URLS = st.builds(
    lambda host, path, q: f"http://{host}/{path}" + (f"?{q}" if q else ""),
    st.sampled_from(["shop1.local", "SHOP2.local", "shop3.local:8080", "example.com"]),
    st.text(alphabet="abcXYZ019-_~/%2D", max_size=20),
    st.text(alphabet="abc=&", max_size=8),
)


@given(URLS)
def test_normalize_url_idempotent(u):
    try:
        n = normalize_url(u)
    except UrlError:
        return
    assert normalize_url(n) == n


def test_is_under():
    assert is_under("http://shop1.local/product/x", "http://shop1.local")
    assert not is_under("http://shop1.localhost/x", "http://shop1.local")


def test_product_url_quotes_ids():
    assert product_url(DEFAULT_SHOPS[0], "a/b c") == "http://shop1.local/product/a%2Fb%20c"
    assert parse_offer_id_from_path("/product/a%2Fb%20c") == "a/b c"
    assert parse_offer_id_from_path("/category/x") is None


def test_lower_median():
    assert lower_median([]) is None
    assert lower_median([5]) == 5
    assert lower_median([4, 1, 3, 2]) == 2
    assert lower_median([3, 1, 2]) == 2


def test_offer_equality_ignores_extra():
    a = Offer("1", "shop1", "t", "d", (), 1, "USD", "http://shop1.local/product/1", {}, {"x": 1})
    b = Offer("1", "shop1", "t", "d", (), 1, "USD", "http://shop1.local/product/1", {}, {})
    assert a == b


def test_offer_by_url_round_trip(catalog):
    from shopbench.catalog import offer_by_url
    for o in catalog.offers:
        assert offer_by_url(catalog, o.url) == o
        assert offer_by_url(catalog, o.url.replace("http://shop", "http://SHOP") + "/") == o
