"""Embedding-based retrieval shared by the RAG engine and the shop APIs.

Search is an exact scan: every document is scored by cosine similarity
against the query embedding, and ties are broken by ``doc_id`` ascending.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import math
import os
import re
import time
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import httpx
import numpy as np

from .catalog import normalize_url

DEFAULT_DIM = 256
# Scores are rounded to this many decimals so that ties are exact regardless
# of the floating-point path used to compute them.
SCORE_DECIMALS = 12
INDEX_FORMAT = "shopbench-index"
INDEX_VERSION = 1


# --- HTML cleaning ------------------------------------------------------------

_SKIP_TAGS = {"script", "style", "nav", "header", "footer", "noscript", "template", "head"}
_VOID_TAGS = {"area", "base", "br", "col", "embed", "hr", "img", "input", "link",
              "meta", "param", "source", "track", "wbr"}
_BLOCK_TAGS = {"p", "div", "section", "article", "main", "li", "ul", "ol", "tr", "td",
               "th", "table", "h1", "h2", "h3", "h4", "h5", "h6", "br", "dd", "dt", "dl",
               "form", "label", "button", "option", "title", "aside", "figure"}


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self.skip_stack: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "body":
            self.skip_stack.clear()  # an unclosed <head> must not hide the body
            return
        if tag in _VOID_TAGS:
            if tag == "br":
                self.parts.append(" ")
            return
        if self.skip_stack or tag in _SKIP_TAGS:
            self.skip_stack.append(tag)
        elif tag in _BLOCK_TAGS:
            self.parts.append(" ")

    def handle_startendtag(self, tag, attrs):
        if tag == "br":
            self.parts.append(" ")

    def handle_endtag(self, tag):
        if self.skip_stack:
            # pop back to the matching open tag; tolerate unclosed children
            if tag in self.skip_stack:
                while self.skip_stack:
                    if self.skip_stack.pop() == tag:
                        break
            return
        if tag in _BLOCK_TAGS:
            self.parts.append(" ")

    def handle_data(self, data):
        if not self.skip_stack:
            self.parts.append(data)


def clean_html(html: str) -> str:
    """Visible text of ``html`` without markup, scripts, styles or nav/header/footer."""
    parser = _TextExtractor()
    try:
        parser.feed(html)
        parser.close()
    except Exception:  # pragma: no cover - html.parser is very lenient
        pass
    text = " ".join("".join(parser.parts).split())
    # stray angle brackets from text content or broken markup
    return " ".join(text.replace("<", " ").replace(">", " ").split())


# --- embeddings ---------------------------------------------------------------

_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on anything that is not a letter or digit."""
    return _TOKEN.findall(text.lower())


class EmbeddingError(RuntimeError):
    pass


class RetryableEmbeddingError(EmbeddingError):
    """Transport failure talking to a remote embedder; safe to retry."""


class EmbeddingProvider(Protocol):
    name: str
    dim: int

    def embed_many(self, texts: Sequence[str]) -> np.ndarray: ...


def _stable_hash64(token: str) -> int:
    return int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "big")


class HashingEmbedder:
    """Deterministic feature-hashing embedder.

    Each token adds 1 to bucket ``h % dim`` of its 64-bit BLAKE2b hash, so
    features are non-negative and cosine scores fall in [0, 1].  With
    ``signed=True`` the top bit of the hash picks the sign instead.  Vectors
    are L2-normalised; text without tokens maps to the all-zero vector.
    """

    def __init__(self, dim: int = DEFAULT_DIM, signed: bool = False):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.signed = signed
        self.name = f"hashing-v1/{dim}/{'signed' if signed else 'unsigned'}"

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for tok in tokenize(text):
            h = _stable_hash64(tok)
            sign = -1.0 if (self.signed and h >> 63) else 1.0
            vec[h % self.dim] += sign
        norm = math.sqrt(float(np.dot(vec, vec)))
        if norm > 0:
            vec /= norm
        return vec

    def embed_many(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for i, t in enumerate(texts):
            out[i] = self.embed(t)
        return out


class RemoteEmbedder:
    """Client for an OpenAI-style ``/embeddings`` endpoint.

    Reads ``EMBED_BASE_URL`` and ``EMBED_API_KEY`` from the environment when
    not given explicitly.
    """

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 model: str = "text-embedding-3-small", dim: int = 1536,
                 client: httpx.Client | None = None, retries: int = 3, backoff: float = 0.5):
        self.base_url = (base_url or os.environ.get("EMBED_BASE_URL") or "").rstrip("/")
        if not self.base_url:
            raise EmbeddingError("EMBED_BASE_URL is not set")
        self.api_key = api_key if api_key is not None else os.environ.get("EMBED_API_KEY", "")
        self.model = model
        self.dim = dim
        self.name = f"remote/{model}"
        self.retries = retries
        self.backoff = backoff
        self._client = client or httpx.Client(timeout=60.0)

    def _post(self, texts: Sequence[str]) -> list[list[float]]:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            resp = self._client.post(f"{self.base_url}/embeddings",
                                     json={"model": self.model, "input": list(texts)}, headers=headers)
        except httpx.TransportError as exc:
            raise RetryableEmbeddingError(f"embedding request failed: {exc}") from exc
        if resp.status_code >= 500 or resp.status_code == 429:
            raise RetryableEmbeddingError(f"embedding endpoint returned HTTP {resp.status_code}")
        if resp.status_code != 200:
            raise EmbeddingError(f"embedding endpoint returned HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            data = resp.json()["data"]
            return [item["embedding"] for item in data]
        except (ValueError, KeyError, TypeError) as exc:
            raise EmbeddingError(f"malformed embedding response: {exc}") from exc

    def embed_many(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        todo = [(i, t) for i, t in enumerate(texts) if tokenize(t)]
        if not todo:
            return out
        for attempt in range(self.retries):
            try:
                vectors = self._post([t for _, t in todo])
                break
            except RetryableEmbeddingError:
                if attempt == self.retries - 1:
                    raise
                time.sleep(self.backoff * (2 ** attempt))
        if len(vectors) != len(todo):
            raise EmbeddingError("embedding response has the wrong number of vectors")
        for (i, _), v in zip(todo, vectors):
            arr = np.asarray(v, dtype=np.float64)
            if arr.shape != (self.dim,):
                raise EmbeddingError(f"expected dimension {self.dim}, got {arr.shape}")
            n = float(np.linalg.norm(arr))
            out[i] = arr / n if n > 0 else arr
        return out

    def embed(self, text: str) -> np.ndarray:
        return self.embed_many([text])[0]


def embed(text: str, provider: EmbeddingProvider | None = None) -> np.ndarray:
    provider = provider or HashingEmbedder()
    return provider.embed_many([text])[0]


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b)) / (na * nb)


# --- index --------------------------------------------------------------------


@dataclass(frozen=True)
class DocInput:
    doc_id: str
    shop_id: str
    source_url: str
    text: str
    offer_id: str | None = None


@dataclass(frozen=True)
class IndexedDoc:
    doc_id: str
    shop_id: str
    offer_id: str | None
    source_url: str
    text: str


@dataclass(frozen=True)
class SearchHit:
    doc: IndexedDoc
    score: float


class IndexBuildError(ValueError):
    pass


class Index:
    """Immutable exact-search vector index."""

    def __init__(self, docs: Sequence[IndexedDoc], vectors: np.ndarray, provider: EmbeddingProvider):
        self.docs = tuple(docs)
        self.vectors = np.asarray(vectors, dtype=np.float64).reshape(len(self.docs), provider.dim)
        self.vectors.setflags(write=False)
        self.provider = provider
        self._norms = np.linalg.norm(self.vectors, axis=1) if len(self.docs) else np.zeros(0)
        self._shop_rows: dict[str, np.ndarray] = {}
        for shop in sorted({d.shop_id for d in self.docs}):
            self._shop_rows[shop] = np.array([i for i, d in enumerate(self.docs) if d.shop_id == shop], dtype=np.int64)
        self._by_id = {d.doc_id: d for d in self.docs}

    def __len__(self) -> int:
        return len(self.docs)

    def get(self, doc_id: str) -> IndexedDoc | None:
        return self._by_id.get(doc_id)

    def search(self, query: str, k: int, shop_filter: str | None = None) -> list[SearchHit]:
        if k < 0:
            raise ValueError("k must be non-negative")
        if k == 0 or not self.docs:
            return []
        if shop_filter is None:
            rows = np.arange(len(self.docs))
        else:
            rows = self._shop_rows.get(shop_filter)
            if rows is None:
                return []
        q = self.provider.embed_many([query])[0]
        qn = float(np.linalg.norm(q))
        dots = self.vectors[rows] @ q
        denom = self._norms[rows] * qn
        scores = np.divide(dots, denom, out=np.zeros_like(dots), where=denom > 0)
        keyed = ((-round(float(s), SCORE_DECIMALS), self.docs[r].doc_id, int(r)) for s, r in zip(scores, rows))
        top = heapq.nsmallest(k, keyed)
        return [SearchHit(self.docs[r], -neg + 0.0) for neg, _, r in top]

    # --- serialization ---

    def dumps(self) -> str:
        """Deterministic line-JSON serialisation (docs sorted by doc_id)."""
        lines = [json.dumps({"format": INDEX_FORMAT, "version": INDEX_VERSION,
                             "provider": self.provider.name, "dim": self.provider.dim,
                             "count": len(self.docs)}, sort_keys=True, separators=(",", ":"))]
        for i in sorted(range(len(self.docs)), key=lambda i: self.docs[i].doc_id):
            d = self.docs[i]
            lines.append(json.dumps({
                "doc_id": d.doc_id, "shop_id": d.shop_id, "offer_id": d.offer_id,
                "source_url": d.source_url, "text": d.text,
                "vector": [float(x) for x in self.vectors[i]],
            }, sort_keys=True, separators=(",", ":"), ensure_ascii=False))
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, provider: EmbeddingProvider | None = None) -> "Index":
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("format") != INDEX_FORMAT or header.get("version") != INDEX_VERSION:
                raise IndexBuildError(f"{path}: not a {INDEX_FORMAT} v{INDEX_VERSION} file")
            if provider is None:
                provider = provider_from_name(header["provider"])
            if provider.dim != header["dim"]:
                raise IndexBuildError(f"{path}: dimension {header['dim']} does not match provider ({provider.dim})")
            docs, vecs = [], []
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                docs.append(IndexedDoc(rec["doc_id"], rec["shop_id"], rec["offer_id"], rec["source_url"], rec["text"]))
                vecs.append(rec["vector"])
        return cls(docs, np.array(vecs, dtype=np.float64).reshape(len(docs), provider.dim), provider)


def provider_from_name(name: str) -> EmbeddingProvider:
    m = re.fullmatch(r"hashing-v1/(\d+)/(signed|unsigned)", name)
    if m:
        return HashingEmbedder(int(m.group(1)), signed=m.group(2) == "signed")
    if name.startswith("remote/"):
        return RemoteEmbedder(model=name.split("/", 1)[1])
    raise IndexBuildError(f"unknown embedding provider {name!r}")


def index_docs(docs: Iterable[DocInput], provider: EmbeddingProvider | None = None) -> Index:
    provider = provider or HashingEmbedder()
    docs = list(docs)
    seen: set[str] = set()
    for d in docs:
        if d.doc_id in seen:
            raise IndexBuildError(f"duplicate doc_id {d.doc_id!r}")
        seen.add(d.doc_id)
    vectors = provider.embed_many([d.text for d in docs]) if docs else np.zeros((0, provider.dim))
    indexed = [IndexedDoc(d.doc_id, d.shop_id, d.offer_id, d.source_url, d.text) for d in docs]
    return Index(indexed, vectors, provider)


def search(index: Index, query: str, k: int, shop_filter: str | None = None) -> list[SearchHit]:
    return index.search(query, k, shop_filter)


def offer_document_text(offer) -> str:
    """Text indexed for an offer on the API side: title, description, category path."""
    return f"{offer.title}. {offer.description}. {' > '.join(offer.category_path)}"


def build_offer_index(catalog, provider: EmbeddingProvider | None = None) -> Index:
    """One document per offer, keyed by offer_id."""
    return index_docs(
        (DocInput(doc_id=o.offer_id, shop_id=o.shop_id, source_url=normalize_url(o.url),
                  text=offer_document_text(o), offer_id=o.offer_id) for o in catalog.offers),
        provider,
    )
