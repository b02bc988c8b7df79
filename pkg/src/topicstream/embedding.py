"""Document embedding providers and node-embedding update math.

Three providers speak one interface: a deterministic token-hash encoder
(default, fully reproducible), a vector file keyed by document id, and a
client for an external sidecar process speaking newline-delimited JSON:

    request  {"id": int, "texts": [str, ...]}
    response {"id": int, "vectors": [[f, ...], ...], "dim": int}

All providers return unit-norm float64 vectors; normalization is applied
at this boundary regardless of what the backend produced.
"""

from __future__ import annotations

import hashlib
import json
import logging
import selectors
import socket
import subprocess
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ProviderError

logger = logging.getLogger(__name__)

DEFAULT_DIM = 512
DEFAULT_BATCH = 64


def unit(vec: np.ndarray) -> np.ndarray:
    """Scale a vector to unit length."""
    norm = float(np.linalg.norm(vec))
    if norm == 0.0 or not np.isfinite(norm):
        raise ProviderError("cannot normalize zero or non-finite vector")
    return vec / norm


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for zero vector")
    if a is b or np.array_equal(a, b):
        return 1.0
    value = float(np.dot(a, b) / (na * nb))
    return max(-1.0, min(1.0, value))


def update_node_embedding(prev: np.ndarray, doc_vec: np.ndarray, alpha: float) -> np.ndarray:
    """Blend a node embedding with a new document vector.

    Returns alpha*prev + (1-alpha)*doc_vec re-normalized to unit length,
    so cosine magnitudes stay comparable across nodes regardless of how
    often each was updated. Identical inputs are an exact fixed point.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if prev.shape != doc_vec.shape:
        raise ValueError(f"dimension mismatch: {prev.shape} vs {doc_vec.shape}")
    if np.array_equal(prev, doc_vec):
        return prev.copy()
    blended = alpha * prev + (1.0 - alpha) * doc_vec
    norm = float(np.linalg.norm(blended))
    if norm < 1e-12:
        # alpha*prev cancelled (1-alpha)*doc_vec almost exactly; fall back
        # to the incoming direction rather than dividing by ~0.
        return doc_vec.copy()
    return blended / norm


class EmbeddingProvider:
    """Base interface: one unit-norm context vector per document."""

    kind = "abstract"

    def __init__(self, dim: int = DEFAULT_DIM):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim

    def embed_document(self, tokens: Sequence[str], doc_id: Optional[str] = None) -> np.ndarray:
        raise NotImplementedError

    def embed_batch(
        self,
        docs: Sequence[Sequence[str]],
        ids: Optional[Sequence[Optional[str]]] = None,
    ) -> list[np.ndarray]:
        """Order-preserving batch form, equivalent to mapping embed_document."""
        if ids is None:
            ids = [None] * len(docs)
        return [self.embed_document(tokens, doc_id) for tokens, doc_id in zip(docs, ids)]

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class HashEmbedder(EmbeddingProvider):
    """Deterministic provider: pure function of the token list.

    Each token hashes to a seed that expands into a pseudo-random unit
    vector; the document vector is the normalized sum. Shared tokens give
    documents higher cosine, which is enough overlap structure for tests
    and synthetic runs.
    """

    kind = "hash"

    def __init__(self, dim: int = DEFAULT_DIM):
        super().__init__(dim)
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        vec = self._token_cache.get(token)
        if vec is None:
            digest = hashlib.sha256(token.encode("utf-8")).digest()
            seed = int.from_bytes(digest[:8], "little")
            rng = np.random.default_rng(seed)
            vec = unit(rng.standard_normal(self.dim))
            self._token_cache[token] = vec
        return vec

    def embed_document(self, tokens: Sequence[str], doc_id: Optional[str] = None) -> np.ndarray:
        if not tokens:
            raise ProviderError("cannot embed an empty token list")
        total = np.zeros(self.dim)
        for token in tokens:
            total += self._token_vector(token)
        return unit(total)


class VectorFileEmbedder(EmbeddingProvider):
    """Precomputed vectors loaded from JSONL {"id": str, "vector": [...]}."""

    kind = "file"

    def __init__(self, path: str | Path, dim: int = DEFAULT_DIM):
        super().__init__(dim)
        self._vectors: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    vec = np.asarray(record["vector"], dtype=float)
                    doc_id = record["id"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise ProviderError(f"bad vector file record at line {line_no}") from exc
                if vec.shape != (self.dim,):
                    raise ProviderError(
                        f"vector for {doc_id!r} has dim {vec.shape}, expected ({self.dim},)"
                    )
                self._vectors[doc_id] = unit(vec)

    def embed_document(self, tokens: Sequence[str], doc_id: Optional[str] = None) -> np.ndarray:
        if doc_id is None:
            raise ProviderError("vector-file provider requires a document id")
        vec = self._vectors.get(doc_id)
        if vec is None:
            raise ProviderError(f"no vector for document id {doc_id!r}")
        return vec.copy()


class SidecarEmbedder(EmbeddingProvider):
    """Client for an external embedding sidecar process.

    Either spawns ``command`` and talks over its stdio, or connects to a
    local TCP ``port``; both carry one JSON request per line. Requests are
    chunked into batches of ``batch_size`` texts.
    """

    kind = "sidecar"

    def __init__(
        self,
        dim: int = DEFAULT_DIM,
        command: Optional[Sequence[str]] = None,
        host: str = "127.0.0.1",
        port: Optional[int] = None,
        batch_size: int = DEFAULT_BATCH,
        timeout: float = 30.0,
    ):
        super().__init__(dim)
        if (command is None) == (port is None):
            raise ProviderError("sidecar needs exactly one of: command, port")
        self.batch_size = batch_size
        self.timeout = timeout
        self._next_id = 0
        self._proc: Optional[subprocess.Popen] = None
        self._sock: Optional[socket.socket] = None
        if command is not None:
            self._proc = subprocess.Popen(
                list(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        else:
            try:
                self._sock = socket.create_connection((host, port), timeout=timeout)
            except OSError as exc:
                raise ProviderError(f"cannot connect to sidecar at {host}:{port}: {exc}") from exc
            self._sock_file = self._sock.makefile("rw", encoding="utf-8", newline="\n")

    def _send_line(self, line: str) -> None:
        try:
            if self._proc is not None:
                assert self._proc.stdin is not None
                self._proc.stdin.write(line + "\n")
                self._proc.stdin.flush()
            else:
                self._sock_file.write(line + "\n")
                self._sock_file.flush()
        except (OSError, ValueError, BrokenPipeError) as exc:
            raise ProviderError(f"sidecar unreachable: {exc}") from exc

    def _read_line(self) -> str:
        if self._proc is not None:
            assert self._proc.stdout is not None
            sel = selectors.DefaultSelector()
            sel.register(self._proc.stdout, selectors.EVENT_READ)
            if not sel.select(self.timeout):
                sel.close()
                raise ProviderError(f"sidecar response timed out after {self.timeout}s")
            sel.close()
            line = self._proc.stdout.readline()
        else:
            self._sock.settimeout(self.timeout)
            try:
                line = self._sock_file.readline()
            except socket.timeout as exc:
                raise ProviderError(f"sidecar response timed out after {self.timeout}s") from exc
        if not line:
            raise ProviderError("sidecar closed the connection")
        return line

    def _request(self, texts: list[str]) -> list[np.ndarray]:
        request_id = self._next_id
        self._next_id += 1
        self._send_line(json.dumps({"id": request_id, "texts": texts}))
        line = self._read_line()
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProviderError(f"sidecar sent invalid JSON: {line[:200]!r}") from exc
        if response.get("error"):
            raise ProviderError(f"sidecar error: {response['error']}")
        if response.get("id") != request_id:
            raise ProviderError(
                f"sidecar response id {response.get('id')} does not match request {request_id}"
            )
        if response.get("dim") != self.dim:
            raise ProviderError(
                f"sidecar dim {response.get('dim')} does not match configured {self.dim}"
            )
        vectors = response.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderError("sidecar returned wrong number of vectors")
        return [unit(np.asarray(v, dtype=float)) for v in vectors]

    def embed_document(self, tokens: Sequence[str], doc_id: Optional[str] = None) -> np.ndarray:
        return self._request([" ".join(tokens)])[0]

    def embed_batch(
        self,
        docs: Sequence[Sequence[str]],
        ids: Optional[Sequence[Optional[str]]] = None,
    ) -> list[np.ndarray]:
        texts = [" ".join(tokens) for tokens in docs]
        out: list[np.ndarray] = []
        for start in range(0, len(texts), self.batch_size):
            out.extend(self._request(texts[start : start + self.batch_size]))
        return out

    def close(self) -> None:
        if self._sock is not None:
            self._sock_file.close()
            self._sock.close()
            self._sock = None
        if self._proc is not None:
            if self._proc.stdin is not None:
                self._proc.stdin.close()
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
            self._proc = None
