"""Sentence embedders behind one uniform interface.

Every embedder exposes ``name`` and ``embed_batch(texts) -> (n, dim) float64
array``. Three production backends are provided: a from-scratch TF-IDF
(deliberately without stopword removal, so inserted particles stay
in-vocabulary), word-vector averaging over a loaded table, and an HTTP client
for remote transformer services. A position-weighted token-hash embedder is
included as a diagnostic baseline: it reacts to token position rather than
content, which is exactly the failure mode the curves are meant to expose.

Rows of ``embed_batch`` may be zero vectors for texts the backend cannot
embed (for example all-OOV input); downstream cosine treats those as
degenerate and skips them.
"""

from __future__ import annotations

import hashlib
import math
import time
import warnings
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import requests

from .corpus import tokenize


class EmbedderKind(str, Enum):
    TFIDF = "tfidf"
    WORD_AVG = "wordavg"
    REMOTE = "remote"
    HASH = "hash"  # diagnostic position-hash baseline


# ---------------------------------------------------------------------------
# TF-IDF
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TfidfModel:
    """Fitted TF-IDF statistics: vocabulary columns and idf weights."""

    vocabulary: dict[str, int]
    idf: np.ndarray
    corpus_doc_count: int


def fit_tfidf(sentences: Sequence[str]) -> TfidfModel:
    """Fit TF-IDF on lowercased whitespace tokens of *sentences*.

    No stopword removal: inserted articles and negation particles must stay
    in-vocabulary or the two perturbation modes would be indistinguishable.
    idf(t) = ln((1 + N) / (1 + df(t))) + 1.
    """
    docs = [set(tok.lower() for tok in tokenize(s)) for s in sentences]
    if not any(docs):
        raise ValueError("need at least one non-empty sentence to fit TF-IDF")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(doc)
    vocabulary = {tok: i for i, tok in enumerate(sorted(df))}
    n_docs = len(docs)
    idf = np.empty(len(vocabulary))
    for tok, col in vocabulary.items():
        idf[col] = math.log((1 + n_docs) / (1 + df[tok])) + 1.0
    return TfidfModel(vocabulary=vocabulary, idf=idf, corpus_doc_count=n_docs)


def embed_tfidf(model: TfidfModel, text: str) -> np.ndarray:
    """Raw term counts times idf, L2-normalized; all-OOV text gives zeros."""
    vec = np.zeros(len(model.vocabulary))
    for tok, count in Counter(t.lower() for t in tokenize(text)).items():
        col = model.vocabulary.get(tok)
        if col is not None:
            vec[col] = count * model.idf[col]
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


# ---------------------------------------------------------------------------
# Word-vector averaging
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WordVectorTable:
    """Static token -> vector lookup with a fixed dimension."""

    dim: int
    entries: dict[str, np.ndarray]


def load_word_vectors(path: str | Path) -> WordVectorTable:
    """Load a textual vector table: header "count dim", then token + components.

    Malformed rows are reported with their 1-based line number. Duplicate
    tokens keep the last occurrence and emit a warning.
    """
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: header must be 'count dim'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ValueError(f"{path}: non-numeric header {header!r}") from None
        if count < 0 or dim < 1:
            raise ValueError(f"{path}: invalid header count={count} dim={dim}")

        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.split()
            token, comps = parts[0], parts[1:]
            if len(comps) != dim:
                raise ValueError(f"{path}: line {lineno}: expected {dim} "
                                 f"components, got {len(comps)}")
            try:
                vec = np.array([float(c) for c in comps])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric component") from None
            if token in entries:
                warnings.warn(f"{path}: line {lineno}: duplicate token {token!r}, "
                              "last occurrence wins")
            entries[token] = vec
    if count != len(entries):
        warnings.warn(f"{path}: header declares {count} rows, found {len(entries)}")
    return WordVectorTable(dim=dim, entries=entries)


def embed_average(table: WordVectorTable, text: str) -> np.ndarray:
    """Mean of the L2-normalized vectors of in-vocabulary tokens."""
    vecs = []
    for tok in tokenize(text):
        vec = table.entries.get(tok)
        if vec is None:
            continue
        norm = np.linalg.norm(vec)
        if norm > 0:
            vecs.append(vec / norm)
    if not vecs:
        raise ValueError("no embeddable tokens")
    return np.mean(vecs, axis=0)


# ---------------------------------------------------------------------------
# Uniform embedder objects
# ---------------------------------------------------------------------------

class TfidfEmbedder:
    def __init__(self, model: TfidfModel, name: str = "tfidf"):
        self.model = model
        self.name = name

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        return np.stack([embed_tfidf(self.model, t) for t in texts]) \
            if texts else np.zeros((0, len(self.model.vocabulary)))


class AverageVectorEmbedder:
    """Word-vector averaging; unembeddable texts become zero rows."""

    def __init__(self, table: WordVectorTable, name: str = "wordavg"):
        self.table = table
        self.name = name

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.table.dim))
        for i, text in enumerate(texts):
            try:
                out[i] = embed_average(self.table, text)
            except ValueError:
                pass  # degenerate row, skipped downstream
        return out


class PositionHashEmbedder:
    """Position-weighted token hash: a deliberately concept-blind baseline.

    Each token contributes a deterministic pseudo-random unit vector scaled by
    its 1-based position, so any insertion shifts every later token's weight.
    Useful as a worst case: it separates on position, not meaning.
    """

    def __init__(self, dim: int = 64, name: str = "hash"):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.name = name

    def _token_vector(self, token: str) -> np.ndarray:
        digest = hashlib.blake2b(token.encode(), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        vec = rng.standard_normal(self.dim)
        return vec / np.linalg.norm(vec)

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim))
        for i, text in enumerate(texts):
            for pos, tok in enumerate(tokenize(text)):
                out[i] += (pos + 1) * self._token_vector(tok)
        return out


class RemoteEmbeddingError(RuntimeError):
    """Remote embedding service failure (transport or protocol contract)."""


class RemoteEmbedder:
    """Client for an HTTP embedding service.

    Protocol: POST {endpoint}/embed with JSON {"model": str, "texts": [str]};
    the response is JSON {"vectors": [[number]]} with exactly one vector per
    request text. Transport errors and non-200 statuses are retried with
    exponential backoff (3 attempts, starting at 250 ms); contract violations
    (count mismatch, dimension inconsistency, non-finite values) fail fast.
    """

    def __init__(self, endpoint: str, model: str, batch_size: int = 64,
                 max_attempts: int = 3, backoff: float = 0.25,
                 timeout: float = 30.0, jobs: int = 1,
                 session: requests.Session | None = None):
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.batch_size = batch_size
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.timeout = timeout
        self.jobs = max(1, jobs)
        self.session = session or requests.Session()
        self.name = f"remote:{model}"
        self._dim: int | None = None

    def _post_once(self, texts: Sequence[str]) -> list[list[float]]:
        resp = self.session.post(f"{self.endpoint}/embed",
                                 json={"model": self.model, "texts": list(texts)},
                                 timeout=self.timeout)
        if resp.status_code != 200:
            raise RemoteEmbeddingError(
                f"embedding service returned status {resp.status_code}")
        body = resp.json()
        vectors = body.get("vectors")
        if not isinstance(vectors, list):
            raise RemoteEmbeddingError("response missing 'vectors' array")
        return vectors

    def _post_with_retry(self, texts: Sequence[str]) -> list[list[float]]:
        delay = self.backoff
        last: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                return self._post_once(texts)
            except (requests.RequestException, RemoteEmbeddingError) as exc:
                last = exc
                if attempt < self.max_attempts:
                    time.sleep(delay)
                    delay *= 2
        raise RemoteEmbeddingError(
            f"embedding request failed after {self.max_attempts} attempts: {last}")

    def _embed_chunk(self, texts: Sequence[str]) -> np.ndarray:
        vectors = self._post_with_retry(texts)
        if len(vectors) != len(texts):
            raise RemoteEmbeddingError(
                f"count mismatch: sent {len(texts)} texts, "
                f"received {len(vectors)} vectors")
        arr = np.asarray(vectors, dtype=float)
        if arr.ndim != 2:
            raise RemoteEmbeddingError("dimension inconsistency within a batch")
        if not np.all(np.isfinite(arr)):
            raise RemoteEmbeddingError("non-finite vector component in response")
        if self._dim is None:
            self._dim = arr.shape[1]
        elif arr.shape[1] != self._dim:
            raise RemoteEmbeddingError(
                f"dimension inconsistency: expected {self._dim}, "
                f"got {arr.shape[1]}")
        return arr

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        """Embed *texts* in request order, chunked by ``batch_size``.

        Chunks may be issued concurrently (``jobs`` > 1); results are
        reassembled in request order before returning.
        """
        if not texts:
            return np.zeros((0, self._dim or 0))
        chunks = [texts[i:i + self.batch_size]
                  for i in range(0, len(texts), self.batch_size)]
        if self.jobs == 1 or len(chunks) == 1:
            parts = [self._embed_chunk(c) for c in chunks]
        else:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                parts = list(pool.map(self._embed_chunk, chunks))
        return np.vstack(parts)


# ---------------------------------------------------------------------------
# Embedder specs (construction from config strings)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbedderSpec:
    """Backend selection plus its backend-specific parameters."""

    kind: EmbedderKind
    params: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        if self.kind is EmbedderKind.REMOTE:
            return f"remote:{self.params['model']}"
        return self.kind.value


def parse_embedder_spec(text: str, default_endpoint: str | None = None) -> EmbedderSpec:
    """Parse an embedder spec string.

    Accepted forms: ``tfidf``, ``hash``, ``wordavg:PATH``,
    ``remote:MODEL[@ENDPOINT]`` (falls back to *default_endpoint*).
    """
    text = text.strip()
    if text == "tfidf":
        return EmbedderSpec(EmbedderKind.TFIDF)
    if text == "hash":
        return EmbedderSpec(EmbedderKind.HASH)
    if text.startswith("wordavg:"):
        path = text[len("wordavg:"):]
        if not path:
            raise ValueError("wordavg spec needs a vector file: wordavg:PATH")
        return EmbedderSpec(EmbedderKind.WORD_AVG, {"path": path})
    if text.startswith("remote:"):
        rest = text[len("remote:"):]
        model, sep, endpoint = rest.partition("@")
        if not model:
            raise ValueError("remote spec needs a model: remote:MODEL[@ENDPOINT]")
        endpoint = endpoint if sep else (default_endpoint or "")
        if not endpoint:
            raise ValueError(f"remote embedder {model!r} has no endpoint; "
                             "use remote:MODEL@URL or --endpoint")
        return EmbedderSpec(EmbedderKind.REMOTE, {"model": model, "endpoint": endpoint})
    raise ValueError(f"unknown embedder spec {text!r}; expected tfidf, hash, "
                     "wordavg:PATH or remote:MODEL[@ENDPOINT]")


def build_embedder(spec: EmbedderSpec, fit_texts: Sequence[str] = (), jobs: int = 1):
    """Construct the embedder object for *spec*.

    *fit_texts* is the TF-IDF fitting corpus (originals plus all generated
    variants); other backends ignore it.
    """
    if spec.kind is EmbedderKind.TFIDF:
        return TfidfEmbedder(fit_tfidf(fit_texts))
    if spec.kind is EmbedderKind.HASH:
        return PositionHashEmbedder(dim=int(spec.params.get("dim", 64)))
    if spec.kind is EmbedderKind.WORD_AVG:
        return AverageVectorEmbedder(load_word_vectors(spec.params["path"]))
    if spec.kind is EmbedderKind.REMOTE:
        return RemoteEmbedder(endpoint=spec.params["endpoint"],
                              model=spec.params["model"],
                              batch_size=int(spec.params.get("batch_size", 64)),
                              jobs=jobs)
    raise ValueError(f"unknown embedder kind {spec.kind}")


def batched_embed(embedder, texts: Sequence[str], jobs: int = 1,
                  chunk_size: int = 256) -> np.ndarray:
    """Embed *texts* through *embedder*, fanning chunks out to a thread pool.

    Results are reassembled in input order, so the output is independent of
    scheduling.
    """
    if not texts:
        return embedder.embed_batch([])
    if jobs <= 1 or len(texts) <= chunk_size:
        return embedder.embed_batch(texts)
    chunks = [texts[i:i + chunk_size] for i in range(0, len(texts), chunk_size)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(embedder.embed_batch, chunks))
    return np.vstack(parts)


def texts_of(items: Iterable) -> list[str]:
    """Pull .text off sentences or perturbed sentences."""
    return [item.text for item in items]
