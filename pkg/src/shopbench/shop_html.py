"""Server-rendered HTML storefront and the page model the HTML agent observes."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from html import escape
from html.parser import HTMLParser
from urllib.parse import quote, urljoin

from .backend import Backend
from .catalog import Catalog, Offer, Shop
from .commerce import CartView, CommerceError, Order
from .search_index import tokenize
from .web import Request, Response

PAGE_SIZE = 20
SEARCH_LIMIT = 20
SESSION_COOKIE = "shopbench_session"

_CURRENCY_SYMBOLS = {"USD": "$", "EUR": "€", "GBP": "£"}


def format_price(cents: int, currency: str) -> str:
    amount = f"{cents // 100:,}.{cents % 100:02d}"
    sym = _CURRENCY_SYMBOLS.get(currency.upper())
    return f"{sym}{amount}" if sym else f"{amount} {currency}"


def slugify(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-") or "x"


def category_url(shop: Shop, path: tuple[str, ...]) -> str:
    return f"{shop.base_url}/category/" + "/".join(slugify(p) for p in path)


# --- lexical search -----------------------------------------------------------


def search_offers(catalog: Catalog, shop_id: str, query: str, limit: int = SEARCH_LIMIT) -> list[Offer]:
    """Token-AND match over title and description.

    Ranked by the total number of query-token occurrences, then offer_id.
    """
    q = set(tokenize(query))
    if not q:
        return []
    scored = []
    for o in catalog.offers_in(shop_id):
        counts = Counter(tokenize(f"{o.title} {o.description}"))
        if all(t in counts for t in q):
            scored.append((-sum(counts[t] for t in q), o.offer_id, o))
    scored.sort(key=lambda x: (x[0], x[1]))
    return [o for _, _, o in scored[:limit]]


# --- templates ----------------------------------------------------------------


def _category_tree(catalog: Catalog, shop_id: str) -> dict[tuple[str, ...], list[Offer]]:
    """Every category prefix in the shop mapped to the offers in its subtree."""
    tree: dict[tuple[str, ...], list[Offer]] = {}
    for o in catalog.offers_in(shop_id):
        for i in range(1, len(o.category_path) + 1):
            tree.setdefault(o.category_path[:i], []).append(o)
    return tree


def _layout(catalog: Catalog, shop: Shop, title: str, main: str) -> str:
    tops = sorted({p[:1] for p in _category_tree(catalog, shop.shop_id)})
    nav = "".join(f'<li><a href="{escape(category_url(shop, p))}">{escape(p[0])}</a></li>' for p in tops)
    base = escape(shop.base_url)
    name = escape(shop.display_name)
    return (
        "<!DOCTYPE html>\n"
        f'<html lang="en"><head><meta charset="utf-8"><title>{escape(title)} | {name}</title></head>\n'
        "<body>\n"
        f'<header><a href="{base}/">{name}</a>\n'
        f'<form action="{base}/search" method="get" role="search">'
        '<input type="search" name="q" aria-label="Search products">'
        '<button type="submit">Search</button></form>\n'
        f'<a href="{base}/cart">Cart</a></header>\n'
        f'<nav aria-label="Categories"><ul>{nav}</ul></nav>\n'
        f"<main>\n{main}\n</main>\n"
        f"<footer><p>{name} demo store</p></footer>\n"
        "</body></html>\n"
    )


def _offer_li(o: Offer) -> str:
    return (f'<li><a href="{escape(o.url)}">{escape(o.title)}</a> '
            f'<span class="price">{escape(format_price(o.price_cents, o.currency))}</span></li>')


def render_home(catalog: Catalog, shop: Shop) -> str:
    tree = _category_tree(catalog, shop.shop_id)
    tops = sorted(p for p in tree if len(p) == 1)
    items = "".join(f'<li><a href="{escape(category_url(shop, p))}">{escape(p[0])}</a> ({len(tree[p])})</li>'
                    for p in tops)
    main = (f"<h1>Welcome to {escape(shop.display_name)}</h1>\n"
            f"<h2>Shop by category</h2>\n<ul>{items}</ul>")
    return _layout(catalog, shop, "Home", main)


def render_category(catalog: Catalog, shop: Shop, slugs: list[str], page: int = 1) -> str | None:
    tree = _category_tree(catalog, shop.shop_id)
    path = next((p for p in tree if [slugify(x) for x in p] == slugs), None)
    if path is None:
        return None
    offers = tree[path]
    pages = max(1, -(-len(offers) // PAGE_SIZE))
    if not 1 <= page <= pages:
        return None
    subs = sorted(p for p in tree if len(p) == len(path) + 1 and p[:len(path)] == path)
    crumbs = " &rsaquo; ".join(
        f'<a href="{escape(category_url(shop, path[:i]))}">{escape(path[i - 1])}</a>' for i in range(1, len(path) + 1))
    parts = [f'<nav aria-label="Breadcrumb"><a href="{escape(shop.base_url)}/">Home</a> &rsaquo; {crumbs}</nav>',
             f"<h1>{escape(path[-1])}</h1>"]
    if subs:
        parts.append("<h2>Subcategories</h2><ul>" + "".join(
            f'<li><a href="{escape(category_url(shop, p))}">{escape(p[-1])}</a></li>' for p in subs) + "</ul>")
    chunk = offers[(page - 1) * PAGE_SIZE: page * PAGE_SIZE]
    parts.append(f"<h2>Products</h2><p>Page {page} of {pages}</p>")
    parts.append('<ul class="products">' + "".join(_offer_li(o) for o in chunk) + "</ul>")
    here = category_url(shop, path)
    if page > 1:
        parts.append(f'<a rel="prev" href="{escape(here)}?page={page - 1}">Previous page</a>')
    if page < pages:
        parts.append(f'<a rel="next" href="{escape(here)}?page={page + 1}">Next page</a>')
    return _layout(catalog, shop, path[-1], "\n".join(parts))


def render_product_page(catalog: Catalog, offer: Offer) -> str:
    shop = catalog.shop(offer.shop_id)
    crumbs = " &rsaquo; ".join(
        f'<a href="{escape(category_url(shop, offer.category_path[:i]))}">{escape(offer.category_path[i - 1])}</a>'
        for i in range(1, len(offer.category_path) + 1))
    attrs = "".join(f"<tr><th>{escape(k)}</th><td>{escape(v)}</td></tr>" for k, v in offer.attributes.items())
    main = (
        f'<nav aria-label="Breadcrumb"><a href="{escape(shop.base_url)}/">Home</a> &rsaquo; {crumbs}</nav>\n'
        f'<article class="product" data-offer-id="{escape(offer.offer_id)}">\n'
        f"<h1>{escape(offer.title)}</h1>\n"
        f'<p class="price">{escape(format_price(offer.price_cents, offer.currency))}</p>\n'
        f'<p class="category">Category: {escape(" > ".join(offer.category_path))}</p>\n'
        f'<section class="description"><h2>Description</h2><p>{escape(offer.description)}</p></section>\n'
        + (f'<section class="attributes"><h2>Specifications</h2><table>{attrs}</table></section>\n' if attrs else "")
        + f'<form action="{escape(shop.base_url)}/cart/add" method="post">'
        f'<input type="hidden" name="offer_id" value="{escape(offer.offer_id)}">'
        '<label>Quantity <input type="number" name="quantity" value="1" min="1"></label>'
        '<button type="submit">Add to cart</button></form>\n'
        "</article>"
    )
    return _layout(catalog, shop, offer.title, main)


def render_search(catalog: Catalog, shop: Shop, query: str, results: list[Offer]) -> str:
    q = escape(query)
    if not results:
        main = f"<h1>Search results for &ldquo;{q}&rdquo;</h1>\n<p>No products found for &ldquo;{q}&rdquo;.</p>"
    else:
        main = (f"<h1>Search results for &ldquo;{q}&rdquo;</h1>\n<p>{len(results)} products found</p>\n"
                '<ul class="results">' + "".join(_offer_li(o) for o in results) + "</ul>")
    return _layout(catalog, shop, f"Search: {query}", main)


_CHECKOUT_FIELDS = [
    ("name", "Full name", "text"), ("street", "Street address", "text"), ("city", "City", "text"),
    ("postal_code", "Postal code", "text"), ("country", "Country", "text"),
    ("card_number", "Card number", "text"), ("expiry", "Expiry (MM/YY)", "text"),
]


def render_cart(catalog: Catalog, shop: Shop, cart: CartView) -> str:
    if not cart.lines:
        main = "<h1>Shopping cart</h1>\n<p>Your cart is empty.</p>"
        return _layout(catalog, shop, "Cart", main)
    rows = []
    for li in cart.lines:
        o = catalog.get(li.offer_id)
        rows.append(
            f'<tr><td><a href="{escape(o.url)}">{escape(o.title)}</a></td><td>{li.quantity}</td>'
            f"<td>{escape(format_price(li.unit_price_cents, o.currency))}</td>"
            f"<td>{escape(format_price(li.subtotal_cents, o.currency))}</td></tr>")
    currency = catalog.get(cart.lines[0].offer_id).currency
    fields = "".join(
        f'<label>{label} <input type="{typ}" name="{name}" required></label>' for name, label, typ in _CHECKOUT_FIELDS)
    main = (
        "<h1>Shopping cart</h1>\n"
        "<table><tr><th>Product</th><th>Quantity</th><th>Unit price</th><th>Subtotal</th></tr>"
        + "".join(rows) + "</table>\n"
        f'<p class="total">Total: {escape(format_price(cart.total_cents, currency))}</p>\n'
        "<h2>Checkout</h2>\n"
        f'<form action="{escape(shop.base_url)}/checkout" method="post">{fields}'
        '<button type="submit">Place order</button></form>'
    )
    return _layout(catalog, shop, "Cart", main)


def render_order(catalog: Catalog, shop: Shop, order: Order) -> str:
    rows = "".join(
        f"<li>{li.quantity} &times; {escape(catalog.get(li.offer_id).title)}</li>" for li in order.items)
    currency = catalog.get(order.items[0].offer_id).currency
    main = (f"<h1>Order {escape(order.order_id)} confirmed</h1>\n"
            f"<p>Thank you, {escape(order.shipping.name)}. Your order number is "
            f'<strong class="order-id">{escape(order.order_id)}</strong>.</p>\n'
            f"<ul>{rows}</ul>\n"
            f'<p class="total">Total: {escape(format_price(order.total_cents, currency))}</p>\n'
            f"<p>Paid with card ending in {escape(order.payment.last4)}.</p>")
    return _layout(catalog, shop, f"Order {order.order_id}", main)


def render_error(catalog: Catalog, shop: Shop, message: str, title: str = "Error") -> str:
    main = f'<h1>{escape(title)}</h1>\n<p class="error">{escape(message)}</p>'
    return _layout(catalog, shop, title, main)


# --- request handling -----------------------------------------------------------


class HtmlStorefront:
    """Routes for one or more shops over a shared backend."""

    def __init__(self, backend: Backend):
        self.backend = backend
        self.catalog = backend.catalog

    def _session(self, req: Request) -> tuple[str, bool]:
        sid = req.cookies.get(SESSION_COOKIE)
        if sid and self.backend.store.has_session(sid):
            return sid, False
        return self.backend.store.create_session(), True

    def handle(self, shop: Shop, req: Request) -> Response:
        return self._route(shop, req)

    def _not_found(self, shop: Shop, what: str = "Page not found") -> Response:
        return Response.html(render_error(self.catalog, shop, what, "Not found"), 404)

    def _route(self, shop: Shop, req: Request) -> Response:
        path = req.path.rstrip("/") or "/"
        cat = self.catalog
        if req.method in ("GET", "HEAD"):
            if path == "/":
                return Response.html(render_home(cat, shop))
            if path.startswith("/category/"):
                try:
                    page = int(req.arg("page", "1"))
                except ValueError:
                    return self._not_found(shop)
                html = render_category(cat, shop, path[len("/category/"):].split("/"), page)
                return Response.html(html) if html else self._not_found(shop)
            if path.startswith("/product/"):
                offer = cat.offer_by_url(shop.base_url + path)
                if offer is None or offer.shop_id != shop.shop_id:
                    return self._not_found(shop, "Product not found")
                return Response.html(render_product_page(cat, offer))
            if path == "/search":
                q = req.arg("q")
                return Response.html(render_search(cat, shop, q, search_offers(cat, shop.shop_id, q)))
            if path == "/cart":
                return self._with_session(req, lambda sid: Response.html(
                    render_cart(cat, shop, self.backend.store.view_cart(sid, shop.shop_id))))
            if path.startswith("/order/"):
                order_id = path[len("/order/"):]

                def show(sid):
                    try:
                        order = self.backend.store.get_order(sid, order_id)
                    except CommerceError:
                        return self._not_found(shop, "Order not found")
                    if order.shop_id != shop.shop_id:
                        return self._not_found(shop, "Order not found")
                    return Response.html(render_order(cat, shop, order))
                return self._with_session(req, show)
            return self._not_found(shop)
        if req.method == "POST":
            if path == "/cart/add":
                return self._with_session(req, lambda sid: self._add(shop, sid, req.form()))
            if path == "/checkout":
                return self._with_session(req, lambda sid: self._checkout(shop, sid, req.form()))
            return self._not_found(shop)
        return Response.html(render_error(cat, shop, "Method not allowed"), 405)

    def _with_session(self, req: Request, fn) -> Response:
        sid, fresh = self._session(req)
        resp = fn(sid)
        if fresh:
            resp.set_cookie(SESSION_COOKIE, sid)
        return resp

    def _form_error(self, shop: Shop, exc: CommerceError) -> Response:
        return Response.html(render_error(self.catalog, shop, str(exc), "Could not complete request"), 400)

    def _add(self, shop: Shop, sid: str, form: dict[str, str]) -> Response:
        try:
            qty = int(form.get("quantity", "1") or "1")
        except ValueError:
            qty = 0
        try:
            self.backend.store.add_to_cart(sid, shop.shop_id, form.get("offer_id", ""), qty)
        except CommerceError as exc:
            return self._form_error(shop, exc)
        return Response.redirect(f"{shop.base_url}/cart")

    def _checkout(self, shop: Shop, sid: str, form: dict[str, str]) -> Response:
        try:
            order = self.backend.store.checkout(sid, shop.shop_id, form, form.get("card_number", ""))
        except CommerceError as exc:
            return self._form_error(shop, exc)
        return Response.redirect(f"{shop.base_url}/order/{quote(order.order_id)}")


# --- page model -------------------------------------------------------------------


@dataclass
class Link:
    text: str
    href: str
    region: str  # "nav" for header/nav/footer landmarks, else "main"


@dataclass
class FormField:
    name: str
    type: str
    value: str = ""
    required: bool = False
    options: list[str] = field(default_factory=list)


@dataclass
class Form:
    action: str
    method: str
    fields: list[FormField] = field(default_factory=list)
    submit_label: str = ""
    region: str = "main"


@dataclass
class PageModel:
    url: str
    title: str = ""
    headings: list[str] = field(default_factory=list)
    links: list[Link] = field(default_factory=list)
    forms: list[Form] = field(default_factory=list)
    main_text: str = ""

    def content_links(self) -> list[Link]:
        return [l for l in self.links if l.region != "nav"]

    def digest(self, max_text: int = 2000) -> str:
        """Plain-text rendering handed to the agent as its observation."""
        lines = [f"URL: {self.url}", f"Title: {self.title}"]
        if self.headings:
            lines.append("Headings: " + " | ".join(self.headings))
        lines.append("Links:")
        lines += [f"  [{i}] {l.text} -> {l.href}" for i, l in enumerate(self.links)]
        lines.append("Forms:")
        for i, f in enumerate(self.forms):
            fields = ", ".join(
                f"{x.name}({x.type}{'=' + x.value if x.value else ''}{', required' if x.required else ''})"
                for x in f.fields)
            lines.append(f"  [{i}] {f.method} {f.action} fields: {fields} submit: {f.submit_label}")
        text = self.main_text if len(self.main_text) <= max_text else self.main_text[:max_text] + " ..."
        lines.append(f"Text: {text}")
        return "\n".join(lines)


_NAV_TAGS = {"nav", "header", "footer"}
_SKIP_TEXT = {"script", "style", "noscript", "template"}


class _PageParser(HTMLParser):
    def __init__(self, url: str):
        super().__init__(convert_charrefs=True)
        self.url = url
        self.model = PageModel(url=url)
        self.nav_depth = 0
        self.skip_depth = 0
        self.in_title = False
        self.heading: list[str] | None = None
        self.link: tuple[str, list[str]] | None = None
        self.form: Form | None = None
        self.button: list[str] | None = None
        self.select: FormField | None = None
        self.textarea: FormField | None = None
        self.main_depth = 0
        self.saw_main = False
        self.main_parts: list[str] = []
        self.body_parts: list[str] = []

    def _region(self) -> str:
        return "nav" if self.nav_depth else "main"

    def handle_starttag(self, tag, attrs):
        a = {k: (v or "") for k, v in attrs}
        if tag in _NAV_TAGS:
            self.nav_depth += 1
        elif tag in _SKIP_TEXT:
            self.skip_depth += 1
        elif tag == "main":
            self.main_depth += 1
            self.saw_main = True
        elif tag == "title":
            self.in_title = True
        elif tag in ("h1", "h2", "h3", "h4", "h5", "h6"):
            self.heading = []
        elif tag == "a" and "href" in a:
            self.link = (urljoin(self.url, a["href"]), [])
        elif tag == "form":
            self.form = Form(action=urljoin(self.url, a.get("action", "") or self.url),
                             method=(a.get("method") or "get").upper(), region=self._region())
        elif tag == "input" and self.form is not None and a.get("name"):
            typ = (a.get("type") or "text").lower()
            if typ in ("submit", "button", "image", "reset"):
                if typ == "submit" and not self.form.submit_label:
                    self.form.submit_label = a.get("value", "Submit")
                return
            self.form.fields.append(FormField(a["name"], typ, a.get("value", ""), "required" in a))
        elif tag == "select" and self.form is not None and a.get("name"):
            self.select = FormField(a["name"], "select", "", "required" in a)
        elif tag == "option" and self.select is not None:
            self.select.options.append(a.get("value", ""))
            if "selected" in a or not self.select.value:
                self.select.value = a.get("value", "")
        elif tag == "textarea" and self.form is not None and a.get("name"):
            self.textarea = FormField(a["name"], "textarea", "", "required" in a)
        elif tag == "button":
            self.button = []
        if tag in ("p", "li", "div", "h1", "h2", "h3", "tr", "td", "th", "br", "section", "article", "label"):
            self._text(" ")

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)
        if tag not in ("input", "br", "img", "meta", "link", "hr"):
            self.handle_endtag(tag)

    def handle_endtag(self, tag):
        if tag in _NAV_TAGS and self.nav_depth:
            self.nav_depth -= 1
        elif tag in _SKIP_TEXT and self.skip_depth:
            self.skip_depth -= 1
        elif tag == "main" and self.main_depth:
            self.main_depth -= 1
        elif tag == "title":
            self.in_title = False
        elif tag in ("h1", "h2", "h3", "h4", "h5", "h6") and self.heading is not None:
            text = " ".join("".join(self.heading).split())
            if text:
                self.model.headings.append(text)
            self.heading = None
        elif tag == "a" and self.link is not None:
            href, parts = self.link
            self.model.links.append(Link(" ".join("".join(parts).split()), href, self._region()))
            self.link = None
        elif tag == "form" and self.form is not None:
            self.model.forms.append(self.form)
            self.form = None
        elif tag == "select" and self.select is not None:
            if self.form is not None:
                self.form.fields.append(self.select)
            self.select = None
        elif tag == "textarea" and self.textarea is not None:
            if self.form is not None:
                self.form.fields.append(self.textarea)
            self.textarea = None
        elif tag == "button" and self.button is not None:
            if self.form is not None and not self.form.submit_label:
                self.form.submit_label = " ".join("".join(self.button).split())
            self.button = None
        if tag in ("p", "li", "div", "h1", "h2", "h3", "tr", "td", "th", "section", "article", "label"):
            self._text(" ")

    def _text(self, data: str) -> None:
        if self.skip_depth or self.nav_depth:
            return
        self.body_parts.append(data)
        if self.main_depth:
            self.main_parts.append(data)

    def handle_data(self, data):
        if self.in_title:
            self.model.title += data
            return
        if self.skip_depth:
            return
        if self.heading is not None:
            self.heading.append(data)
        if self.link is not None:
            self.link[1].append(data)
        if self.button is not None:
            self.button.append(data)
        if self.textarea is not None:
            self.textarea.value += data
        self._text(data)


def extract_page_model(html: str, url: str) -> PageModel:
    p = _PageParser(url)
    try:
        p.feed(html)
        p.close()
    except Exception:  # pragma: no cover
        pass
    if p.form is not None:  # unclosed form
        p.model.forms.append(p.form)
    m = p.model
    m.title = " ".join(m.title.split())
    parts = p.main_parts if p.saw_main else p.body_parts
    m.main_text = " ".join("".join(parts).split())
    return m
