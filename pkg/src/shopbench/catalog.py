"""Product catalog shared by the four shops.

Offers are read from a line-delimited JSON file whose field names follow
schema.org (``name``, ``priceCurrency`` ...).  Every offer gets a canonical
URL of the form ``{base_url}/product/{offer_id}`` unless the record carries
its own URL under the shop's base.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping
from urllib.parse import quote, unquote, urlsplit, urlunsplit


class CatalogError(ValueError):
    """Raised when a catalog file violates the record format or an invariant."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UrlError(ValueError):
    pass


@dataclass(frozen=True)
class Shop:
    shop_id: str
    display_name: str
    base_url: str


@dataclass(frozen=True)
class Offer:
    offer_id: str
    shop_id: str
    title: str
    description: str
    category_path: tuple[str, ...]
    price_cents: int
    currency: str
    url: str
    attributes: Mapping[str, str] = field(default_factory=dict, hash=False, compare=True)
    extra: Mapping[str, object] = field(default_factory=dict, hash=False, compare=False, repr=False)

    @property
    def price_decimal(self) -> str:
        """Price as a two-decimal string, e.g. ``"199.00"``."""
        return f"{self.price_cents // 100}.{self.price_cents % 100:02d}"


DEFAULT_SHOPS: tuple[Shop, ...] = (
    Shop("shop1", "VoltMart", "http://shop1.local"),
    Shop("shop2", "ByteBazaar", "http://shop2.local"),
    Shop("shop3", "CircuitCorner", "http://shop3.local"),
    Shop("shop4", "PixelPoint", "http://shop4.local"),
)


# --- URLs -------------------------------------------------------------------

_DEFAULT_PORTS = {"http": 80, "https": 443}
_UNRESERVED = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~")
_PCT = re.compile(r"%([0-9A-Fa-f]{2})")


def _decode_unreserved(part: str) -> str:
    def repl(m: re.Match) -> str:
        ch = chr(int(m.group(1), 16))
        return ch if ch in _UNRESERVED else "%" + m.group(1).upper()

    return _PCT.sub(repl, part)


def normalize_url(url: str) -> str:
    """Return the canonical form of ``url``.

    Lowercases scheme and host, drops default ports and the fragment, strips
    trailing slashes from non-root paths and decodes percent-escaped
    unreserved characters.  The function is idempotent.
    """
    if not isinstance(url, str):
        raise UrlError(f"not a URL: {url!r}")
    try:
        parts = urlsplit(url.strip())
        port = parts.port
    except ValueError as exc:
        raise UrlError(f"unparseable URL {url!r}: {exc}") from None
    scheme = parts.scheme.lower()
    host = (parts.hostname or "").lower()
    if not scheme or not host:
        raise UrlError(f"unparseable URL {url!r}: missing scheme or host")
    if any(ch.isspace() for ch in url.strip()):
        raise UrlError(f"unparseable URL {url!r}: contains whitespace")

    if ":" in host:  # IPv6 literal
        host = f"[{host}]"
    netloc = host
    if port is not None and port != _DEFAULT_PORTS.get(scheme):
        netloc = f"{host}:{port}"
    if parts.username is not None:
        userinfo = parts.username
        if parts.password is not None:
            userinfo += ":" + parts.password
        netloc = f"{userinfo}@{netloc}"

    path = _decode_unreserved(parts.path)
    if not path:
        path = "/"
    elif path != "/":
        path = path.rstrip("/") or "/"
    query = _decode_unreserved(parts.query)
    return urlunsplit((scheme, netloc, path, query, ""))


def is_under(url: str, base_url: str) -> bool:
    """True when ``url`` lies under ``base_url`` (both compared canonically)."""
    u, b = normalize_url(url), normalize_url(base_url)
    if b.endswith("/"):
        return u.startswith(b)
    return u == b or u.startswith(b + "/")


def product_url(shop: Shop, offer_id: str) -> str:
    return f"{shop.base_url.rstrip('/')}/product/{quote(offer_id, safe='')}"


# --- Catalog ----------------------------------------------------------------


class Catalog:
    """Immutable, validated set of shops and offers."""

    def __init__(self, shops: Iterable[Shop], offers: Iterable[Offer] = ()):
        self.shops: tuple[Shop, ...] = tuple(shops)
        self._shops = {s.shop_id: s for s in self.shops}
        if len(self._shops) != len(self.shops):
            raise CatalogError("duplicate shop_id in shop list")
        bases = [normalize_url(s.base_url) for s in self.shops]
        for i, a in enumerate(bases):
            for b in bases[i + 1:]:
                if is_under(a, b) or is_under(b, a):
                    raise CatalogError(f"overlapping shop base URLs {a!r} and {b!r}")

        self.offers: tuple[Offer, ...] = tuple(offers)
        self._by_id: dict[str, Offer] = {}
        self._by_url: dict[str, Offer] = {}
        for o in self.offers:
            self._check_offer(o)
            self._by_id[o.offer_id] = o
            self._by_url[normalize_url(o.url)] = o

    def _check_offer(self, o: Offer, line: int | None = None) -> None:
        if o.offer_id in self._by_id:
            raise CatalogError(f"duplicate offer_id {o.offer_id!r}", line)
        shop = self._shops.get(o.shop_id)
        if shop is None:
            raise CatalogError(f"offer {o.offer_id!r} references unknown shop_id {o.shop_id!r}", line)
        if o.price_cents < 0:
            raise CatalogError(f"offer {o.offer_id!r} has negative price", line)
        if not o.currency:
            raise CatalogError(f"offer {o.offer_id!r} has empty currency", line)
        if not is_under(o.url, shop.base_url):
            raise CatalogError(f"offer {o.offer_id!r} url {o.url!r} not under {shop.base_url!r}", line)
        if normalize_url(o.url) in self._by_url:
            raise CatalogError(f"offer {o.offer_id!r} url {o.url!r} already used", line)

    def __len__(self) -> int:
        return len(self.offers)

    def shop(self, shop_id: str) -> Shop:
        return self._shops[shop_id]

    def has_shop(self, shop_id: str) -> bool:
        return shop_id in self._shops

    @property
    def shop_ids(self) -> list[str]:
        return [s.shop_id for s in self.shops]

    def get(self, offer_id: str) -> Offer | None:
        return self._by_id.get(offer_id)

    def offers_in(self, shop_id: str) -> list[Offer]:
        return [o for o in self.offers if o.shop_id == shop_id]

    def shop_for_url(self, url: str) -> Shop | None:
        try:
            for s in self.shops:
                if is_under(url, s.base_url):
                    return s
        except UrlError:
            return None
        return None

    def offer_by_url(self, url: str) -> Offer | None:
        try:
            return self._by_url.get(normalize_url(url))
        except UrlError:
            return None


def offer_by_url(catalog: Catalog, url: str) -> Offer | None:
    return catalog.offer_by_url(url)


def _parse_price(raw: object, line: int) -> int:
    if isinstance(raw, bool) or raw is None:
        raise CatalogError(f"bad price {raw!r}", line)
    try:
        d = Decimal(str(raw).strip())
    except InvalidOperation:
        raise CatalogError(f"bad price {raw!r}", line) from None
    if not d.is_finite() or d < 0:
        raise CatalogError(f"bad price {raw!r}", line)
    cents = d * 100
    if cents != cents.to_integral_value():
        raise CatalogError(f"price {raw!r} has more than two decimals", line)
    return int(cents)


_KNOWN_FIELDS = {"offer_id", "shop_id", "name", "description", "category",
                 "price", "priceCurrency", "url", "attributes"}


def parse_record(rec: object, shops: Mapping[str, Shop], line: int) -> Offer:
    if not isinstance(rec, dict):
        raise CatalogError("record is not a JSON object", line)
    for key in ("offer_id", "shop_id", "name", "price", "priceCurrency"):
        if key not in rec:
            raise CatalogError(f"missing field {key!r}", line)
    for key in ("offer_id", "shop_id", "name", "priceCurrency"):
        if not isinstance(rec[key], str) or not rec[key]:
            raise CatalogError(f"field {key!r} must be a non-empty string", line)
    description = rec.get("description", "")
    if not isinstance(description, str):
        raise CatalogError("field 'description' must be a string", line)
    category = rec.get("category", [])
    if isinstance(category, str):
        category = [category]
    if not isinstance(category, list) or not all(isinstance(c, str) and c for c in category):
        raise CatalogError("field 'category' must be a list of strings", line)
    attributes = rec.get("attributes", {})
    if not isinstance(attributes, dict):
        raise CatalogError("field 'attributes' must be an object", line)

    shop = shops.get(rec["shop_id"])
    url = rec.get("url")
    if url is None:
        if shop is None:
            raise CatalogError(f"offer {rec['offer_id']!r} references unknown shop_id {rec['shop_id']!r}", line)
        url = product_url(shop, rec["offer_id"])
    elif not isinstance(url, str):
        raise CatalogError("field 'url' must be a string", line)
    else:
        try:
            normalize_url(url)
        except UrlError as exc:
            raise CatalogError(str(exc), line) from None

    return Offer(
        offer_id=rec["offer_id"],
        shop_id=rec["shop_id"],
        title=rec["name"],
        description=description,
        category_path=tuple(category),
        price_cents=_parse_price(rec["price"], line),
        currency=rec["priceCurrency"],
        url=url,
        attributes={str(k): str(v) for k, v in attributes.items()},
        extra={k: v for k, v in rec.items() if k not in _KNOWN_FIELDS},
    )


def load_catalog(path: str | Path, shops: Iterable[Shop] = DEFAULT_SHOPS) -> Catalog:
    """Load and validate a line-delimited JSON catalog.

    Raises :class:`CatalogError` (with the offending line number) on the
    first bad record; a partially valid catalog is never returned.
    """
    shops = tuple(shops)
    shop_map = {s.shop_id: s for s in shops}
    catalog = Catalog(shops)
    offers: list[Offer] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CatalogError(f"malformed JSON: {exc.msg}", lineno) from None
            offer = parse_record(rec, shop_map, lineno)
            catalog._check_offer(offer, lineno)
            catalog._by_id[offer.offer_id] = offer
            catalog._by_url[normalize_url(offer.url)] = offer
            offers.append(offer)
    return Catalog(shops, offers)


def demo_catalog_path() -> Path:
    return Path(str(resources.files("shopbench") / "data" / "demo_catalog.jsonl"))


def load_demo_catalog() -> Catalog:
    return load_catalog(demo_catalog_path())


# --- statistics ---------------------------------------------------------------


def lower_median(values: Iterable[int]) -> int | None:
    """Median; for an even count, the lower of the two middle values."""
    vals = sorted(values)
    if not vals:
        return None
    return vals[(len(vals) - 1) // 2]


@dataclass(frozen=True)
class CatalogStats:
    offers_per_shop: dict[str, int]
    median_title_length: int | None
    median_description_length: int | None

    @property
    def total_offers(self) -> int:
        return sum(self.offers_per_shop.values())


def catalog_stats(catalog: Catalog) -> CatalogStats:
    counts = {s.shop_id: 0 for s in catalog.shops}
    for o in catalog.offers:
        counts[o.shop_id] += 1
    return CatalogStats(
        offers_per_shop=counts,
        median_title_length=lower_median(len(o.title) for o in catalog.offers),
        median_description_length=lower_median(len(o.description) for o in catalog.offers),
    )


def parse_offer_id_from_path(path: str) -> str | None:
    """Extract the offer id from a ``/product/{offer_id}`` path."""
    m = re.fullmatch(r"/product/([^/]+)/?", path)
    return unquote(m.group(1)) if m else None
