from __future__ import annotations

import secrets
from dataclasses import dataclass

from .catalog import Catalog
from .commerce import SessionStore
from .search_index import EmbeddingProvider, Index, build_offer_index


@dataclass
class Backend:
    """Everything a shop interface needs: catalog, session store and offer index."""

    catalog: Catalog
    store: SessionStore
    offer_index: Index
    admin_token: str

    @classmethod
    def create(cls, catalog: Catalog, seed: int | None = None,
               provider: EmbeddingProvider | None = None, admin_token: str | None = None) -> "Backend":
        return cls(
            catalog=catalog,
            store=SessionStore(catalog, seed=seed),
            offer_index=build_offer_index(catalog, provider),
            admin_token=admin_token or secrets.token_hex(16),
        )
