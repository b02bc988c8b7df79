"""Node scoring and ranked-topic extraction.

A word's base score multiplies its window-over-window frequency growth
with its cumulative frequency plus accumulated engagement; its topic
score adds the neighbors' base scores weighted by the decayed edge
scores, boosted 1.2x for named entities. Topic scores normalize into
within-cluster word probabilities and cluster probabilities whose
product is the overall nomination probability of each word.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from .clustering import TopicClusterSet
from .errors import UnknownWordError
from .memgraph import MemoryGraph, NodeState

logger = logging.getLogger(__name__)

ENTITY_BOOST = 1.2


@dataclass
class TopicEntry:
    cluster_id: int
    probability: float
    words: list[tuple[str, float]]  # (word, P(word|cluster)), descending


@dataclass
class TopicReport:
    """Ranked topics for one extraction window."""

    window_end: int
    topics: list[TopicEntry] = field(default_factory=list)
    top_k_topics: Optional[int] = None
    top_k_words: Optional[int] = None

    def to_json_dict(self) -> dict:
        return {
            "window_end": self.window_end,
            "top_k_topics": self.top_k_topics,
            "top_k_words": self.top_k_words,
            "topics": [
                {
                    "cluster": entry.cluster_id,
                    "p": entry.probability,
                    "words": [[w, p] for w, p in entry.words],
                }
                for entry in self.topics
            ],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "TopicReport":
        return cls(
            window_end=payload["window_end"],
            top_k_topics=payload.get("top_k_topics"),
            top_k_words=payload.get("top_k_words"),
            topics=[
                TopicEntry(
                    cluster_id=item["cluster"],
                    probability=item["p"],
                    words=[(w, p) for w, p in item["words"]],
                )
                for item in payload["topics"]
            ],
        )


def upsilon(node: NodeState, trend: bool = True) -> float:
    """Base score: frequency growth times (frequency + engagement).

    The growth factor is the window-over-window gain in occurrence count,
    floored at 1 so stable words are not zeroed out; pass trend=False to
    disable the trend term entirely.
    """
    if trend:
        delta = max(1, node.freq_window - node.freq_prev_window)
    else:
        delta = 1
    return float(delta * (node.freq_total + node.engagement))


def gamma(word: str, g: MemoryGraph, now: int, trend: bool = True) -> float:
    """Topic score: own base score plus edge-weighted neighbor base scores."""
    node = g.nodes.get(word)
    if node is None:
        raise UnknownWordError(word)
    acc = upsilon(node, trend)
    for nbr in sorted(g.adjacency.get(word, ())):
        acc += upsilon(g.nodes[nbr], trend) * g.effective_score(word, nbr, now)
    boost = ENTITY_BOOST if node.is_entity else 1.0
    return boost * acc


def extract_topics(
    g: MemoryGraph,
    clusters: TopicClusterSet,
    now: int,
    top_k_topics: Optional[int] = 10,
    top_k_words: Optional[int] = 10,
    trend: bool = True,
) -> TopicReport:
    """Build the ranked topic report for one window.

    Probabilities are computed over the full partition before any
    truncation, so the reported numbers are true probabilities even when
    only the top slice is kept. A cluster whose words all score zero gets
    a uniform word distribution (with a warning).
    """
    if not clusters.members:
        raise ValueError("cannot extract topics: no non-empty cluster")

    cluster_scores: dict[int, list[tuple[str, float]]] = {}
    cluster_totals: dict[int, float] = {}
    grand_total = 0.0
    for cid in sorted(clusters.members):
        scored = [(w, gamma(w, g, now, trend)) for w in sorted(clusters.members[cid])]
        total = sum(s for _, s in scored)
        cluster_scores[cid] = scored
        cluster_totals[cid] = total
        grand_total += total

    entries = []
    for cid in sorted(clusters.members):
        scored = cluster_scores[cid]
        total = cluster_totals[cid]
        if total == 0.0:
            logger.warning("cluster %d has all-zero topic scores; using uniform", cid)
            words = [(w, 1.0 / len(scored)) for w, _ in scored]
        else:
            words = [(w, s / total) for w, s in scored]
        words.sort(key=lambda item: (-item[1], item[0]))
        if grand_total == 0.0:
            topic_p = 1.0 / len(clusters.members)
        else:
            topic_p = total / grand_total
        entries.append(TopicEntry(cluster_id=cid, probability=topic_p, words=words))
    if grand_total == 0.0:
        logger.warning("all clusters have zero topic score; using uniform topic probabilities")

    entries.sort(key=lambda e: (-e.probability, e.cluster_id))
    if top_k_topics is not None:
        entries = entries[:top_k_topics]
    if top_k_words is not None:
        for entry in entries:
            entry.words = entry.words[:top_k_words]
    return TopicReport(
        window_end=now,
        topics=entries,
        top_k_topics=top_k_topics,
        top_k_words=top_k_words,
    )
