import socket

import httpx
import pytest

from shopbench.server import network_client, serve

from .conftest import ADMIN

AUTH = {"Authorization": f"Bearer {ADMIN}"}


def test_health_and_unknown_host(client):
    assert client.get("http://shop2.local/health").json() == {"status": "ok", "shop": "shop2"}
    assert client.get("http://other.local/health").status_code == 404


def test_admin_requires_token(client):
    assert client.post("http://shop1.local/admin/session").status_code == 401
    assert client.post("http://shop1.local/admin/session", headers={"Authorization": "Bearer x"}).status_code == 401
    sid = client.post("http://shop1.local/admin/session", headers=AUTH).json()["session"]
    snap = client.get(f"http://shop1.local/admin/session/{sid}/snapshot", headers=AUTH).json()
    assert snap == {"carts": {}, "orders": {}}
    assert client.get("http://shop1.local/admin/session/nope/snapshot", headers=AUTH).status_code == 404


def test_json_api(client):
    sid = client.post("http://shop1.local/admin/session", headers=AUTH).json()["session"]
    r = client.post("http://shop4.local/api/cart/add",
                    json={"session": sid, "url": "http://shop4.local/product/D-051", "quantity": 2})
    assert r.status_code == 200 and r.json()["total_cents"] == 61800
    r = client.post("http://shop1.local/api/cart/add", json={"session": sid, "url": "http://shop4.local/product/D-051"})
    assert r.status_code == 400
    assert client.get("http://shop4.local/api/cart", params={"session": sid}).json()["items"][0]["quantity"] == 2
    r = client.post("http://shop4.local/api/checkout", json={
        "session": sid, "payment": {"card_number": "4111111111111111"},
        "shipping": {"name": "A", "street": "B", "city": "C", "postal_code": "D", "country": "E"}})
    assert r.status_code == 200
    assert r.json()["items"] == [{"url": "http://shop4.local/product/D-051", "quantity": 2}]
    assert client.post("http://shop4.local/api/checkout", content=b"{").status_code == 400
    assert client.get("http://shop4.local/api/nope").status_code == 404


def test_rpc_endpoints(client):
    body = {"jsonrpc": "2.0", "id": 1, "method": "tools/list"}
    assert client.post("http://shop1.local/mcp", json=body).json()["result"]["tools"]
    assert client.post("http://shop1.local/nlweb", json=body).json()["result"]["tools"]
    assert client.get("http://shop1.local/mcp").status_code == 405
    note = {"jsonrpc": "2.0", "method": "notifications/initialized"}
    assert client.post("http://shop1.local/mcp", json=note).status_code == 204


def free_port_block(n=4):
    for base in range(20000, 60000, 37):
        socks = []
        try:
            for i in range(n):
                s = socket.socket()
                s.bind(("127.0.0.1", base + i))
                socks.append(s)
            return base
        except OSError:
            continue
        finally:
            for s in socks:
                s.close()
    raise RuntimeError("no free ports")


def test_network_serving(backend):
    base = free_port_block()
    handle = serve(backend, base)
    try:
        with network_client(backend.catalog.shops, base, timeout=5) as c:
            for i, shop in enumerate(backend.catalog.shops):
                r = c.get(shop.base_url + "/health")
                assert r.json()["shop"] == shop.shop_id
                assert str(r.url) == shop.base_url + "/health"  # canonical URL preserved
            r = c.post("http://shop1.local/cart/add", data={"offer_id": "D-003"}, follow_redirects=True)
            assert str(r.url) == "http://shop1.local/cart"
        with pytest.raises(OSError):
            serve(backend, base)
    finally:
        handle.stop()
    with network_client(backend.catalog.shops, base, timeout=1) as c, pytest.raises(httpx.ConnectError):
        c.get("http://shop1.local/health")
