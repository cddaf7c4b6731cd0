"""Dense retrieval over prior annotations and schema table signatures.

The default embedder is a hash-trigram term-frequency vector (d=256,
L2-normalized) so the whole pipeline runs hermetically offline; a remote
embedder can be dropped in behind the same contract. Retrieval is an exact
linear scan: benchmark projects hold at most a few thousand entries, and the
ranking must equal a brute-force cosine scan by contract.
"""

from __future__ import annotations

import threading
import zlib
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from benchforge.errors import BenchforgeError, EmbedderUnavailable
from benchforge.sqlmodel.analysis import extract_tables
from benchforge.sqlmodel.parser import parse_sql
from benchforge.sqlmodel.schema import SchemaCatalog, TableDef

DEFAULT_DIM = 256
DEFAULT_K_EXAMPLES = 3
DEFAULT_K_TABLES = 5


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    is_zero: bool = False

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RetrievalEntry:
    entry_id: str
    kind: str  # 'example' | 'table_signature'
    text: str
    payload: object
    vector: EmbeddingVector
    insertion_seq: int


class Embedder(Protocol):
    dim: int

    def embed(self, text: str) -> EmbeddingVector: ...


class HashTrigramEmbedder:
    """Deterministic local embedder: character-trigram TF, hashed buckets."""

    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim

    def embed(self, text: str) -> EmbeddingVector:
        lowered = text.lower()
        if len(lowered) < 3:
            lowered = lowered.strip()
        counts = np.zeros(self.dim, dtype=np.float64)
        for i in range(len(lowered) - 2):
            trigram = lowered[i : i + 3]
            bucket = zlib.crc32(trigram.encode("utf-8")) % self.dim
            counts[bucket] += 1.0
        norm = float(np.linalg.norm(counts))
        if norm == 0.0:
            return EmbeddingVector(values=tuple(counts), is_zero=True)
        return EmbeddingVector(values=tuple(counts / norm))


class RemoteEmbedder:
    """POSTs text to an embedding endpoint; vectors are L2-normalized here.

    Wire format: POST {base_url} with {"input": str} -> {"embedding": [...]}.
    """

    def __init__(self, base_url: str, dim: int, token: str | None = None,
                 session=None):
        import requests

        self.base_url = base_url
        self.dim = dim
        self.token = token
        self._session = session or requests.Session()

    def embed(self, text: str) -> EmbeddingVector:
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            resp = self._session.post(
                self.base_url, json={"input": text}, headers=headers, timeout=30
            )
            resp.raise_for_status()
            values = resp.json()["embedding"]
        except Exception as exc:
            raise EmbedderUnavailable(str(exc)) from exc
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (self.dim,):
            raise EmbedderUnavailable(
                f"embedding dimension {arr.shape} != expected ({self.dim},)"
            )
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            return EmbeddingVector(values=tuple(arr), is_zero=True)
        return EmbeddingVector(values=tuple(arr / norm))


def embed(text: str, embedder: Embedder | None = None) -> EmbeddingVector:
    return (embedder or HashTrigramEmbedder()).embed(text)


@dataclass
class VectorIndex:
    """Append-only in-memory index; writes are serialized by the workflow."""

    dim: int = DEFAULT_DIM
    embedder: Embedder | None = None
    entries: list[RetrievalEntry] = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _next_seq: int = 0

    def __post_init__(self):
        if self.embedder is None:
            self.embedder = HashTrigramEmbedder(self.dim)

    def add(self, entry_id: str, kind: str, text: str, payload: object) -> RetrievalEntry:
        vector = self.embedder.embed(text)
        with self._lock:
            if any(e.entry_id == entry_id for e in self.entries):
                raise ValueError(f"duplicate entry_id: {entry_id}")
            entry = RetrievalEntry(
                entry_id=entry_id, kind=kind, text=text, payload=payload,
                vector=vector, insertion_seq=self._next_seq,
            )
            self._next_seq += 1
            # snapshot semantics: readers iterate over the old list object
            self.entries = self.entries + [entry]
        return entry

    def top_k(self, query: EmbeddingVector, k: int,
              kind: str | None = None) -> list[tuple[RetrievalEntry, float]]:
        """Exact cosine top-k; ties broken by ascending insertion_seq."""
        if k < 1:
            raise ValueError("k must be >= 1")
        entries = [e for e in self.entries if kind is None or e.kind == kind]
        if not entries:
            return []
        if query.is_zero:
            oldest = sorted(entries, key=lambda e: e.insertion_seq)[:k]
            return [(e, 0.0) for e in oldest]
        # per-entry dot products (not one matmul) so scores are bit-identical
        # to any brute-force scan, keeping exact-tie ordering well-defined
        qvec = np.asarray(query.values, dtype=np.float64)
        sims = [float(np.dot(np.asarray(e.vector.values, dtype=np.float64), qvec))
                for e in entries]
        order = sorted(range(len(entries)),
                       key=lambda i: (-sims[i], entries[i].insertion_seq))
        return [(entries[i], float(sims[i])) for i in order[:k]]


def retrieve_examples(index: VectorIndex, sql: str,
                      k: int = DEFAULT_K_EXAMPLES) -> list[tuple[str, str]]:
    """Top-k previously accepted (sql, nl) pairs for prompt grounding."""
    query = index.embedder.embed(sql)
    hits = index.top_k(query, k, kind="example")
    return [tuple(e.payload) for e, _ in hits]


def index_table_signatures(index: VectorIndex, catalog: SchemaCatalog) -> None:
    """Register each catalog table's signature for the fallback path."""
    existing = {e.entry_id for e in index.entries}
    for table in catalog.tables:
        entry_id = f"table:{catalog.schema_id}:{table.name.lower()}"
        if entry_id not in existing:
            index.add(entry_id, "table_signature", table.signature_text(), table)


def retrieve_schema_context(
    sql: str,
    catalog: SchemaCatalog,
    index: VectorIndex,
    k_tables: int = DEFAULT_K_TABLES,
) -> tuple[list[TableDef], bool]:
    """Tables grounding a query: parse-based, embedding fallback on failure.

    Returns (tables, used_fallback); non-empty whenever the catalog is.
    """
    try:
        ast = parse_sql(sql)
        tables = extract_tables(ast, catalog)
        if tables:
            return tables, False
    except BenchforgeError:
        pass
    index_table_signatures(index, catalog)
    query = index.embedder.embed(sql)
    hits = index.top_k(query, k_tables, kind="table_signature")
    tables = [e.payload for e, _ in hits]
    if not tables and catalog.tables:
        tables = catalog.tables[:k_tables]
    return tables, True
