"""Decaying cumulative word co-occurrence graph.

Every document becomes a complete subgraph over its distinct tokens.
Edge scores accumulate the cosine similarity of the two endpoint
embeddings at insertion time, so with a constant embedding the score
degenerates to the plain co-occurrence count. Nodes and edges fade by
the forgetting curve exp(-elapsed/rho) measured from their last update;
readers always see the decayed (effective) value, and maintenance prunes
whatever has faded below the retrievability threshold. rho adapts to a
node-count budget with a 90%/80% hysteresis band.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Optional

import numpy as np

from .clustering import TopicClusterSet
from .embedding import cosine, update_node_embedding
from .errors import MissingEdgeError, SnapshotError
from .ingest import TokenizedDocument

logger = logging.getLogger(__name__)

SNAPSHOT_VERSION = 1
HIGH_WATER = 0.90
LOW_WATER = 0.80


@dataclass
class NodeState:
    """Per-word state: embedding, counters, entity flag, cluster id."""

    word: str
    embedding: np.ndarray
    freq_total: int = 0
    freq_window: int = 0
    freq_prev_window: int = 0
    engagement: int = 0
    last_update: int = 0
    is_entity: bool = False
    entity_type: Optional[str] = None
    cluster: Optional[int] = None


@dataclass
class EdgeState:
    """Per-pair state: cumulative similarity score and co-occurrence count."""

    score: float
    cooccur_count: int
    last_update: int


@dataclass
class PruneReport:
    removed_nodes: list[str] = field(default_factory=list)
    removed_edges: list[tuple[str, str]] = field(default_factory=list)


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def decay_factor(last_update: float, now: float, rho: float) -> float:
    """Retrievability exp(-(now - last_update)/rho) of an item."""
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    elapsed = now - last_update
    if elapsed < 0:
        raise ValueError(f"negative elapsed time: now={now} < last_update={last_update}")
    return math.exp(-elapsed / rho)


class MemoryGraph:
    """Mutable word graph with forgetting; single writer, many readers."""

    def __init__(
        self,
        dim: int,
        rho: float = 1000.0,
        node_budget: int = 100_000,
        prune_epsilon: float = 0.01,
    ):
        if rho < 1:
            raise ValueError("rho must be >= 1")
        if node_budget < 1:
            raise ValueError("node_budget must be >= 1")
        self.dim = dim
        self.rho = float(rho)
        self.rho_init = float(rho)
        self.node_budget = node_budget
        self.prune_epsilon = prune_epsilon
        self.stream_time = 0
        self.nodes: dict[str, NodeState] = {}
        self.edges: dict[tuple[str, str], EdgeState] = {}
        self.adjacency: dict[str, set[str]] = {}
        self.clusters = TopicClusterSet()

    # ------------------------------------------------------------------
    # ingestion

    def insert_subgraph(
        self, doc: TokenizedDocument, doc_vec: np.ndarray, alpha: float = 0.5
    ) -> set[str]:
        """Fold one document into the graph; returns its distinct words.

        Node embeddings are blended with the document vector first; the
        pairwise cosines that reinforce the edges are computed after both
        endpoints were updated. A node's first embedding is the vector of
        the first document containing it.
        """
        if doc.timestamp < self.stream_time:
            raise ValueError(
                f"document at t={doc.timestamp} is older than stream time {self.stream_time}"
            )
        ts = doc.timestamp
        engagement = doc.likes + doc.retweets
        words = sorted(set(doc.tokens))
        for w in words:
            node = self.nodes.get(w)
            if node is None:
                node = NodeState(word=w, embedding=doc_vec.copy())
                self.nodes[w] = node
                self.adjacency[w] = set()
            else:
                node.embedding = update_node_embedding(node.embedding, doc_vec, alpha)
            node.freq_total += 1
            node.freq_window += 1
            node.engagement += engagement
            node.last_update = ts
            if w in doc.entity_tokens:
                node.is_entity = True
                node.entity_type = doc.entity_types.get(w, node.entity_type)
        for a, b in combinations(words, 2):
            similarity = cosine(self.nodes[a].embedding, self.nodes[b].embedding)
            edge = self.edges.get((a, b))
            if edge is None:
                self.edges[(a, b)] = EdgeState(score=similarity, cooccur_count=1, last_update=ts)
                self.adjacency[a].add(b)
                self.adjacency[b].add(a)
            else:
                edge.score += similarity
                edge.cooccur_count += 1
                edge.last_update = ts
        self.stream_time = ts
        return set(words)

    # ------------------------------------------------------------------
    # decay and pruning

    def effective_score(self, a: str, b: str, now: float) -> float:
        """Stored edge score composed with its decay at ``now``."""
        edge = self.edges.get(edge_key(a, b))
        if edge is None:
            raise MissingEdgeError(f"no edge between {a!r} and {b!r}")
        return edge.score * decay_factor(edge.last_update, now, self.rho)

    def node_retrievability(self, word: str, now: int) -> float:
        node = self.nodes[word]
        return decay_factor(node.last_update, now, self.rho)

    def apply_decay(self, now: int) -> PruneReport:
        """Forget everything whose decayed value fell below the threshold.

        Stored scores are never rewritten; decay stays a function of the
        last-update timestamps, so a later pass at a smaller rho can
        forget more. Isolated nodes go once their own retrievability
        fades; pruned words also leave the cluster partition.
        """
        if now < self.stream_time:
            raise ValueError(f"now={now} is before stream time {self.stream_time}")
        report = PruneReport()
        for key, edge in self.edges.items():
            if edge.score * decay_factor(edge.last_update, now, self.rho) < self.prune_epsilon:
                report.removed_edges.append(key)
        for a, b in report.removed_edges:
            del self.edges[(a, b)]
            self.adjacency[a].discard(b)
            self.adjacency[b].discard(a)
        for word, node in self.nodes.items():
            if self.adjacency[word]:
                continue
            if decay_factor(node.last_update, now, self.rho) < self.prune_epsilon:
                report.removed_nodes.append(word)
        for word in report.removed_nodes:
            del self.nodes[word]
            del self.adjacency[word]
            self.clusters.remove_word(word)
        self.stream_time = now
        return report

    def adapt_rho(self, usage_fraction: float) -> float:
        """Adjust rho toward the node budget with 90%/80% hysteresis.

        Above the high watermark, rho drops by exactly 1 per iteration
        with decay re-applied until usage is back under it or rho hits 1
        (exhaustion, logged). Below the low watermark, rho recovers by 1
        per maintenance cycle, never past its initial value.
        """
        if usage_fraction > HIGH_WATER:
            usage = usage_fraction
            while usage > HIGH_WATER and self.rho > 1.0:
                self.rho = max(1.0, self.rho - 1.0)
                self.apply_decay(self.stream_time)
                usage = len(self.nodes) / self.node_budget
            if usage > HIGH_WATER:
                logger.warning(
                    "memory budget exhausted: %d nodes > %.0f%% of %d at rho=1",
                    len(self.nodes),
                    HIGH_WATER * 100,
                    self.node_budget,
                )
        elif usage_fraction < LOW_WATER:
            self.rho = min(self.rho_init, self.rho + 1.0)
        return self.rho

    # ------------------------------------------------------------------
    # persistence

    def snapshot(self, path: str | Path, meta: Optional[dict] = None) -> None:
        """Write the full graph state (including clusters) as JSON."""
        payload = {
            "format_version": SNAPSHOT_VERSION,
            "dim": self.dim,
            "rho": self.rho,
            "rho_init": self.rho_init,
            "node_budget": self.node_budget,
            "prune_epsilon": self.prune_epsilon,
            "stream_time": self.stream_time,
            "next_cluster_id": self.clusters.next_id,
            "nodes": [
                [
                    node.word,
                    node.embedding.tolist(),
                    node.freq_total,
                    node.freq_window,
                    node.freq_prev_window,
                    node.engagement,
                    node.last_update,
                    node.is_entity,
                    node.entity_type,
                    node.cluster,
                ]
                for _, node in sorted(self.nodes.items())
            ],
            "edges": [
                [a, b, edge.score, edge.cooccur_count, edge.last_update]
                for (a, b), edge in sorted(self.edges.items())
            ],
            "meta": meta or {},
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, separators=(",", ":"))

    def member_count(self) -> int:
        return len(self.nodes)


def restore(path: str | Path) -> tuple[MemoryGraph, dict]:
    """Rebuild a MemoryGraph from a snapshot file; returns (graph, meta)."""
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"corrupt snapshot file {path}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise SnapshotError(f"corrupt snapshot file {path}: not an object")
    version = payload.get("format_version")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {version!r} (expected {SNAPSHOT_VERSION})")
    try:
        g = MemoryGraph(
            dim=payload["dim"],
            rho=payload["rho"],
            node_budget=payload["node_budget"],
            prune_epsilon=payload["prune_epsilon"],
        )
        g.rho_init = float(payload["rho_init"])
        g.rho = float(payload["rho"])
        g.stream_time = payload["stream_time"]
        for row in payload["nodes"]:
            word, emb, freq_total, freq_window, freq_prev, engagement, last_update, is_entity, etype, cluster = row
            g.nodes[word] = NodeState(
                word=word,
                embedding=np.asarray(emb, dtype=float),
                freq_total=freq_total,
                freq_window=freq_window,
                freq_prev_window=freq_prev,
                engagement=engagement,
                last_update=last_update,
                is_entity=is_entity,
                entity_type=etype,
                cluster=cluster,
            )
            g.adjacency[word] = set()
            if cluster is not None:
                g.clusters.assign(word, cluster)
        g.clusters.next_id = payload["next_cluster_id"]
        for a, b, score, cooccur, last_update in payload["edges"]:
            if a not in g.nodes or b not in g.nodes:
                raise SnapshotError(f"edge ({a!r}, {b!r}) references a missing node")
            g.edges[(a, b)] = EdgeState(score=score, cooccur_count=cooccur, last_update=last_update)
            g.adjacency[a].add(b)
            g.adjacency[b].add(a)
        meta = payload.get("meta", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotError(f"corrupt snapshot file {path}: {exc}") from exc
    return g, meta
