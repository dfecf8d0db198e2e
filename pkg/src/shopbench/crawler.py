"""Breadth-first crawl of the storefronts and construction of the RAG page index."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from urllib.parse import urlsplit

import httpx

from .catalog import Shop, UrlError, is_under, normalize_url
from .search_index import DocInput, EmbeddingProvider, Index, clean_html, index_docs
from .shop_html import extract_page_model

# Pages that change state, depend on the session or are query-driven.
SKIP_PREFIXES = ("/cart", "/checkout", "/order", "/search", "/api", "/admin", "/mcp", "/nlweb")


class CrawlError(RuntimeError):
    pass


@dataclass(frozen=True)
class CrawledPage:
    url: str
    shop_id: str
    text: str
    offer_id: str | None


def _crawlable(url: str, shop: Shop) -> bool:
    if not is_under(url, shop.base_url):
        return False
    path = urlsplit(url).path
    return not any(path == p or path.startswith(p + "/") for p in SKIP_PREFIXES)


def crawl_shop(client: httpx.Client, shop: Shop, max_pages: int = 10_000) -> list[CrawledPage]:
    """Visit every page reachable by internal links from the shop's home page."""
    home = normalize_url(shop.base_url + "/")
    try:
        resp = client.get(home)
    except httpx.HTTPError as exc:
        raise CrawlError(f"shop {shop.shop_id} unreachable at {home}: {exc}") from None
    if resp.status_code != 200:
        raise CrawlError(f"shop {shop.shop_id} unreachable at {home}: HTTP {resp.status_code}")

    pages: list[CrawledPage] = []
    seen = {home}
    queue: deque[tuple[str, httpx.Response | None]] = deque([(home, resp)])
    while queue:
        url, resp = queue.popleft()
        if resp is None:
            try:
                resp = client.get(url)
            except httpx.HTTPError as exc:
                raise CrawlError(f"shop {shop.shop_id}: fetching {url} failed: {exc}") from None
        if resp.status_code != 200 or "html" not in resp.headers.get("content-type", ""):
            continue
        model = extract_page_model(resp.text, url)
        offer_id = None
        for form in model.forms:
            if urlsplit(form.action).path.endswith("/cart/add"):
                offer_id = next((f.value for f in form.fields if f.name == "offer_id"), None)
                break
        text = clean_html(resp.text)
        if text:
            pages.append(CrawledPage(url, shop.shop_id, text, offer_id))
        for link in model.links:
            try:
                target = normalize_url(link.href)
            except UrlError:
                continue
            if target not in seen and _crawlable(target, shop):
                if len(seen) >= max_pages:
                    raise CrawlError(f"shop {shop.shop_id}: more than {max_pages} pages")
                seen.add(target)
                queue.append((target, None))
    return pages


def crawl(client: httpx.Client, shops: tuple[Shop, ...] | list[Shop], max_pages: int = 10_000) -> list[CrawledPage]:
    """Crawl all shops; pages are returned sorted by URL."""
    pages = []
    for shop in shops:
        pages.extend(crawl_shop(client, shop, max_pages))
    return sorted(pages, key=lambda p: p.url)


def build_rag_index(pages: list[CrawledPage], provider: EmbeddingProvider | None = None) -> Index:
    """One document per crawled page, keyed by its normalized URL."""
    return index_docs((DocInput(p.url, p.shop_id, p.url, p.text, p.offer_id) for p in pages), provider)
