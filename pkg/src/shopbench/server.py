"""HTTP hosting for the four shops.

One WSGI application serves every interface of a shop: the HTML storefront,
``POST /mcp``, ``POST /nlweb``, a small JSON cart API used by the RAG agent's
direct functions, ``GET /health`` and token-protected admin routes for the
evaluator.  The same application can be mounted in-process (requests are
routed by ``Host`` header) or bound to one TCP port per shop.
"""

from __future__ import annotations

import hmac
import json
import threading
from dataclasses import dataclass, field
from socketserver import ThreadingMixIn
from typing import Callable
from urllib.parse import urlsplit
from wsgiref.simple_server import WSGIRequestHandler, WSGIServer, make_server

import httpx

from .backend import Backend
from .catalog import Shop
from .commerce import CommerceError, Payment, Shipping
from .jsonrpc import MCPServer
from .shop_html import HtmlStorefront
from .shop_mcp import build_mcp_server
from .shop_nlweb import build_nlweb_server
from .web import Request, Response, wsgi_app


class ShopApp:
    """Request handler for all shops over one backend.

    With ``fixed_shop`` set, every request goes to that shop regardless of the
    ``Host`` header (used when each shop listens on its own port).
    """

    def __init__(self, backend: Backend, fixed_shop: str | None = None):
        self.backend = backend
        self.fixed_shop = fixed_shop
        self.html = HtmlStorefront(backend)
        self.mcp: dict[str, MCPServer] = {s: build_mcp_server(backend, s) for s in backend.catalog.shop_ids}
        self.nlweb: dict[str, MCPServer] = {s: build_nlweb_server(backend, s) for s in backend.catalog.shop_ids}
        self._hosts = {urlsplit(s.base_url).netloc: s for s in backend.catalog.shops}

    def resolve_shop(self, req: Request) -> Shop | None:
        if self.fixed_shop:
            return self.backend.catalog.shop(self.fixed_shop)
        return self._hosts.get(req.host)

    def __call__(self, req: Request) -> Response:
        shop = self.resolve_shop(req)
        if req.path.startswith("/admin/"):
            return self._admin(req)
        if shop is None:
            return Response.json({"error": f"unknown host {req.host!r}"}, 404)
        if req.path == "/health":
            return Response.json({"status": "ok", "shop": shop.shop_id})
        if req.path in ("/mcp", "/nlweb"):
            if req.method != "POST":
                return Response.json({"error": "use POST"}, 405)
            server = (self.mcp if req.path == "/mcp" else self.nlweb)[shop.shop_id]
            out = server.handle_bytes(req.body)
            return Response(204, b"", "application/json") if out is None else Response.json(out)
        if req.path.startswith("/api/"):
            return self._api(shop, req)
        return self.html.handle(shop, req)

    # --- admin ---

    def _authorized(self, req: Request) -> bool:
        given = req.headers.get("authorization", "")
        return hmac.compare_digest(given.encode(), f"Bearer {self.backend.admin_token}".encode())

    def _admin(self, req: Request) -> Response:
        if not self._authorized(req):
            return Response.json({"error": "unauthorized"}, 401)
        parts = req.path.strip("/").split("/")
        store = self.backend.store
        if parts == ["admin", "session"] and req.method == "POST":
            return Response.json({"session": store.create_session()})
        if len(parts) == 4 and parts[:2] == ["admin", "session"] and parts[3] == "snapshot" and req.method == "GET":
            try:
                return Response.json(store.snapshot_state(parts[2]).to_dict())
            except CommerceError as exc:
                return Response.json({"error": str(exc)}, 404)
        return Response.json({"error": "not found"}, 404)

    # --- JSON cart API ---

    def _api(self, shop: Shop, req: Request) -> Response:
        store = self.backend.store
        catalog = self.backend.catalog
        if req.method == "GET" and req.path == "/api/cart":
            try:
                cart = store.view_cart(req.arg("session"), shop.shop_id)
            except CommerceError as exc:
                return Response.json({"error": str(exc)}, 400)
            return Response.json(_cart_json(catalog, cart))
        if req.method != "POST" or req.path not in ("/api/cart/add", "/api/checkout"):
            return Response.json({"error": "not found"}, 404)
        try:
            body = json.loads(req.body.decode("utf-8") or "{}")
        except (UnicodeDecodeError, ValueError):
            return Response.json({"error": "invalid JSON body"}, 400)
        if not isinstance(body, dict):
            return Response.json({"error": "body must be an object"}, 400)
        try:
            if req.path == "/api/cart/add":
                offer = catalog.offer_by_url(str(body.get("url", "")))
                if offer is None or offer.shop_id != shop.shop_id:
                    return Response.json({"error": f"unknown product: {body.get('url')}"}, 400)
                cart = store.add_to_cart(body.get("session", ""), shop.shop_id, offer.offer_id,
                                         body.get("quantity", 1))
                return Response.json(_cart_json(catalog, cart))
            ship = Shipping.from_mapping(body.get("shipping") or {})
            pay = body.get("payment") or {}
            card = pay.get("card_number", "") if isinstance(pay, dict) else ""
            order = store.checkout(body.get("session", ""), shop.shop_id, ship, Payment.from_card(card, ship.name))
        except CommerceError as exc:
            return Response.json({"error": str(exc)}, 400)
        return Response.json({"order_id": order.order_id, "total_cents": order.total_cents,
                              "items": [{"url": catalog.get(li.offer_id).url, "quantity": li.quantity}
                                        for li in order.items]})


def _cart_json(catalog, cart) -> dict:
    return {"session": cart.session_id, "shop": cart.shop_id, "total_cents": cart.total_cents,
            "items": [{"url": catalog.get(li.offer_id).url, "title": catalog.get(li.offer_id).title,
                       "quantity": li.quantity, "unit_price_cents": li.unit_price_cents} for li in cart.lines]}


def make_wsgi_app(backend: Backend, fixed_shop: str | None = None) -> Callable:
    return wsgi_app(ShopApp(backend, fixed_shop))


# --- clients --------------------------------------------------------------------


def inprocess_client(backend: Backend, **kwargs) -> httpx.Client:
    """An httpx client whose requests to ``http://shopN.local`` hit the app directly."""
    return httpx.Client(transport=httpx.WSGITransport(app=make_wsgi_app(backend)), **kwargs)


class HostRewriteTransport(httpx.BaseTransport):
    """Sends requests for canonical shop hosts to local ports.

    ``routes`` maps a canonical netloc (``shop1.local``) to ``(host, port)``.
    """

    def __init__(self, routes: dict[str, tuple[str, int]], inner: httpx.BaseTransport | None = None):
        self.routes = routes
        self.inner = inner or httpx.HTTPTransport()

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        target = self.routes.get(request.url.netloc.decode("ascii"))
        if target is not None:
            # a copy, so the client still reports the canonical URL on the response
            request = httpx.Request(request.method, request.url.copy_with(scheme="http", host=target[0],
                                                                          port=target[1]),
                                    headers=request.headers, stream=request.stream,
                                    extensions=request.extensions)
        return self.inner.handle_request(request)

    def close(self) -> None:
        self.inner.close()


def shop_routes(shops, ports_base: int, host: str = "127.0.0.1") -> dict[str, tuple[str, int]]:
    return {urlsplit(s.base_url).netloc: (host, ports_base + i) for i, s in enumerate(shops)}


def network_client(shops, ports_base: int, host: str = "127.0.0.1", **kwargs) -> httpx.Client:
    return httpx.Client(transport=HostRewriteTransport(shop_routes(shops, ports_base, host)), **kwargs)


# --- serving --------------------------------------------------------------------


class _ThreadingWSGIServer(ThreadingMixIn, WSGIServer):
    daemon_threads = True
    allow_reuse_address = False


class _QuietHandler(WSGIRequestHandler):
    def log_message(self, format, *args):  # noqa: A002
        pass


@dataclass
class ServerHandle:
    servers: list = field(default_factory=list)
    threads: list = field(default_factory=list)
    ports: dict[str, int] = field(default_factory=dict)

    def stop(self) -> None:
        for s in self.servers:
            s.shutdown()
            s.server_close()
        for t in self.threads:
            t.join(timeout=5)


def serve(backend: Backend, ports_base: int, host: str = "127.0.0.1") -> ServerHandle:
    """Bind one threaded HTTP server per shop on ``ports_base + i``.

    Raises ``OSError`` if any port is taken; already-bound servers are closed.
    """
    handle = ServerHandle()
    try:
        for i, shop in enumerate(backend.catalog.shops):
            srv = make_server(host, ports_base + i, make_wsgi_app(backend, shop.shop_id),
                              server_class=_ThreadingWSGIServer, handler_class=_QuietHandler)
            handle.servers.append(srv)
            handle.ports[shop.shop_id] = ports_base + i
    except OSError:
        for s in handle.servers:
            s.server_close()
        raise
    for srv in handle.servers:
        t = threading.Thread(target=srv.serve_forever, daemon=True)
        t.start()
        handle.threads.append(t)
    return handle
