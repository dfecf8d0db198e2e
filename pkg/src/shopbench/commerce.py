"""Sessions, per-shop carts, checkout and orders.

One session spans all shops: each shop has its own cart inside the session,
and checking out in one shop leaves the other carts untouched.  The store is
safe to share between threads; calls on the same session are serialized.
"""

from __future__ import annotations

import random
import threading
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Mapping

from .catalog import Catalog


class CommerceError(Exception):
    code = "commerce_error"


class UnknownSession(CommerceError):
    code = "unknown_session"


class UnknownOffer(CommerceError):
    code = "unknown_offer"


class ShopMismatch(CommerceError):
    code = "shop_mismatch"


class InvalidQuantity(CommerceError):
    code = "invalid_quantity"


class EmptyCart(CommerceError):
    code = "empty_cart"


class InvalidShipping(CommerceError):
    code = "invalid_shipping"


class InvalidPayment(CommerceError):
    code = "invalid_payment"


class UnknownOrder(CommerceError):
    code = "unknown_order"


def luhn_valid(number: str) -> bool:
    digits = number.replace(" ", "").replace("-", "")
    if not digits.isdigit() or not 12 <= len(digits) <= 19:
        return False
    total = 0
    for i, ch in enumerate(reversed(digits)):
        d = int(ch)
        if i % 2 == 1:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return total % 10 == 0


SHIPPING_FIELDS = ("name", "street", "city", "postal_code", "country")


@dataclass(frozen=True)
class Shipping:
    name: str
    street: str
    city: str
    postal_code: str
    country: str

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "Shipping":
        if not isinstance(data, Mapping):
            raise InvalidShipping("shipping details must be an object")
        values = {}
        for f in SHIPPING_FIELDS:
            v = data.get(f)
            if not isinstance(v, str) or not v.strip():
                raise InvalidShipping(f"missing shipping field: {f}")
            values[f] = v.strip()
        return cls(**values)


@dataclass(frozen=True)
class Payment:
    """Masked card: only the last four digits are kept."""

    last4: str
    holder: str = ""

    @classmethod
    def from_card(cls, card_number: str, holder: str = "") -> "Payment":
        if not isinstance(card_number, str) or not luhn_valid(card_number):
            raise InvalidPayment("invalid card number")
        digits = card_number.replace(" ", "").replace("-", "")
        return cls(last4=digits[-4:], holder=holder or "")


@dataclass(frozen=True)
class LineItem:
    offer_id: str
    quantity: int
    unit_price_cents: int

    @property
    def subtotal_cents(self) -> int:
        return self.quantity * self.unit_price_cents


@dataclass(frozen=True)
class CartView:
    session_id: str
    shop_id: str
    lines: tuple[LineItem, ...]

    @property
    def total_cents(self) -> int:
        return sum(li.subtotal_cents for li in self.lines)


@dataclass(frozen=True)
class Order:
    order_id: str
    shop_id: str
    items: tuple[LineItem, ...]
    shipping: Shipping
    payment: Payment
    total_cents: int
    created_at: datetime


@dataclass(frozen=True)
class StateSnapshot:
    """Read-only copy of a session: cart and order item multisets per shop.

    Shops with an empty cart (or no orders) are omitted.
    """

    carts: dict[str, dict[str, int]] = field(default_factory=dict)
    orders: dict[str, list[dict[str, int]]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"carts": {s: dict(c) for s, c in sorted(self.carts.items())},
                "orders": {s: [dict(o) for o in os_] for s, os_ in sorted(self.orders.items())}}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StateSnapshot":
        carts = {s: {k: int(v) for k, v in c.items()} for s, c in (data.get("carts") or {}).items() if c}
        orders = {s: [{k: int(v) for k, v in o.items()} for o in os_]
                  for s, os_ in (data.get("orders") or {}).items() if os_}
        return cls(carts, orders)


class _Session:
    def __init__(self, session_id: str):
        self.session_id = session_id
        self.lock = threading.Lock()
        self.carts: dict[str, list[LineItem]] = {}
        self.orders: dict[str, list[Order]] = {}
        self.order_seq = 0


class SessionStore:
    """Thread-safe in-memory session store over an immutable catalog.

    Session ids come from a private RNG; pass ``seed`` to make them
    reproducible.  Order ids are derived from the session id and a per-session
    counter, so replaying a run gives identical ids.
    """

    def __init__(self, catalog: Catalog, seed: int | None = None):
        self.catalog = catalog
        self._rng = random.Random(seed) if seed is not None else random.SystemRandom()
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()

    def create_session(self) -> str:
        with self._lock:
            while True:
                sid = "s" + "".join(self._rng.choice("0123456789abcdef") for _ in range(16))
                if sid not in self._sessions:
                    break
            self._sessions[sid] = _Session(sid)
        return sid

    def _get(self, session_id: str) -> _Session:
        with self._lock:
            s = self._sessions.get(session_id) if isinstance(session_id, str) else None
        if s is None:
            raise UnknownSession(f"unknown session: {session_id}")
        return s

    def has_session(self, session_id: str) -> bool:
        with self._lock:
            return session_id in self._sessions

    def _check_shop(self, shop_id: str) -> None:
        if not self.catalog.has_shop(shop_id):
            raise UnknownOffer(f"unknown shop: {shop_id}")

    def add_to_cart(self, session_id: str, shop_id: str, offer_id: str, quantity: int = 1) -> CartView:
        s = self._get(session_id)
        self._check_shop(shop_id)
        offer = self.catalog.get(offer_id) if isinstance(offer_id, str) else None
        if offer is None:
            raise UnknownOffer(f"unknown product: {offer_id}")
        if offer.shop_id != shop_id:
            raise ShopMismatch(f"product {offer_id} is not sold by {shop_id}")
        if isinstance(quantity, bool) or not isinstance(quantity, int) or quantity < 1:
            raise InvalidQuantity(f"quantity must be a positive integer, got {quantity!r}")
        with s.lock:
            lines = s.carts.setdefault(shop_id, [])
            for i, li in enumerate(lines):
                if li.offer_id == offer_id:
                    lines[i] = LineItem(offer_id, li.quantity + quantity, li.unit_price_cents)
                    break
            else:
                lines.append(LineItem(offer_id, quantity, offer.price_cents))
            return CartView(session_id, shop_id, tuple(lines))

    def view_cart(self, session_id: str, shop_id: str) -> CartView:
        s = self._get(session_id)
        self._check_shop(shop_id)
        with s.lock:
            return CartView(session_id, shop_id, tuple(s.carts.get(shop_id, ())))

    def checkout(self, session_id: str, shop_id: str,
                 shipping: Shipping | Mapping[str, Any], payment: Payment | str) -> Order:
        """Turn the shop's cart into an order.

        ``payment`` is either a :class:`Payment` or a raw card number, which
        is Luhn-checked and masked.
        """
        s = self._get(session_id)
        self._check_shop(shop_id)
        ship = shipping if isinstance(shipping, Shipping) else Shipping.from_mapping(shipping)
        pay = payment if isinstance(payment, Payment) else Payment.from_card(payment, ship.name)
        with s.lock:
            lines = s.carts.get(shop_id)
            if not lines:
                raise EmptyCart("empty cart")
            s.order_seq += 1
            order = Order(
                order_id=f"{session_id}-{shop_id}-{s.order_seq}",
                shop_id=shop_id,
                items=tuple(lines),
                shipping=ship,
                payment=pay,
                total_cents=sum(li.subtotal_cents for li in lines),
                created_at=datetime.now(timezone.utc),
            )
            s.orders.setdefault(shop_id, []).append(order)
            s.carts[shop_id] = []
            return order

    def get_order(self, session_id: str, order_id: str) -> Order:
        s = self._get(session_id)
        with s.lock:
            for orders in s.orders.values():
                for o in orders:
                    if o.order_id == order_id:
                        return o
        raise UnknownOrder(f"unknown order: {order_id}")

    def snapshot_state(self, session_id: str) -> StateSnapshot:
        s = self._get(session_id)
        with s.lock:
            carts = {}
            for shop, lines in s.carts.items():
                c = Counter()
                for li in lines:
                    c[li.offer_id] += li.quantity
                if c:
                    carts[shop] = dict(sorted(c.items()))
            orders = {}
            for shop, os_ in s.orders.items():
                if os_:
                    orders[shop] = [dict(sorted(Counter({li.offer_id: li.quantity for li in o.items}).items()))
                                    for o in os_]
        return StateSnapshot(carts, orders)
