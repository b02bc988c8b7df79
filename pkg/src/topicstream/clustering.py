"""Incremental topic-cluster maintenance over the memory graph.

Each incoming document subgraph is categorized by how its words overlap
the existing clusters (Unique / Incessant / Multiple / Subset) and every
document word is then re-assigned to the cluster holding the largest
share of its decayed neighborhood edge weight (the stickiness ratio). A
freshly allocated candidate cluster competes with the established ones
and is dropped if it ends up empty, so cluster ids are never reused.
"""

from __future__ import annotations

import enum
import logging
from typing import TYPE_CHECKING, Iterable

from .errors import UnknownWordError

if TYPE_CHECKING:
    from .memgraph import MemoryGraph

logger = logging.getLogger(__name__)


class Category(enum.Enum):
    UNIQUE = "unique"        # all words new
    INCESSANT = "incessant"  # all words already in one cluster
    MULTIPLE = "multiple"    # all words assigned, spanning >= 2 clusters
    SUBSET = "subset"        # some assigned, some new


class TopicClusterSet:
    """Partition of graph words into clusters, with inverse maps."""

    def __init__(self):
        self.assignment: dict[str, int] = {}
        self.members: dict[int, set[str]] = {}
        self.next_id = 1

    def allocate(self) -> int:
        """Allocate a fresh cluster id; ids are monotone and never reused."""
        cid = self.next_id
        self.next_id += 1
        self.members[cid] = set()
        return cid

    def assign(self, word: str, cid: int, keep_empty: frozenset[int] | set[int] = frozenset()):
        """Move a word into cluster ``cid``, dropping its old cluster if emptied."""
        old = self.assignment.get(word)
        if old == cid:
            return
        if old is not None:
            self.members[old].discard(word)
            if not self.members[old] and old not in keep_empty:
                del self.members[old]
        self.assignment[word] = cid
        self.members.setdefault(cid, set()).add(word)

    def remove_word(self, word: str):
        cid = self.assignment.pop(word, None)
        if cid is not None:
            self.members[cid].discard(word)
            if not self.members[cid]:
                del self.members[cid]

    def drop_if_empty(self, cid: int):
        if cid in self.members and not self.members[cid]:
            del self.members[cid]

    def cluster_of(self, word: str) -> int | None:
        return self.assignment.get(word)

    def as_dict(self) -> dict[int, list[str]]:
        """JSON-friendly dump: cluster id -> sorted member words."""
        return {cid: sorted(words) for cid, words in sorted(self.members.items())}

    def check_partition(self, words: Iterable[str]) -> bool:
        """True when assignment/members are inverse and cover ``words`` exactly."""
        covered = set()
        for cid, members in self.members.items():
            if not members:
                return False
            for w in members:
                if self.assignment.get(w) != cid:
                    return False
            covered |= members
        if covered != set(self.assignment):
            return False
        return covered == set(words)


def categorize(clusters: TopicClusterSet, words: Iterable[str]) -> Category:
    """Classify a document's word set against the current clusters."""
    words = set(words)
    if not words:
        raise ValueError("cannot categorize an empty word set")
    assigned = [clusters.assignment.get(w) for w in words]
    known = [cid for cid in assigned if cid is not None]
    if not known:
        return Category.UNIQUE
    if len(known) < len(assigned):
        return Category.SUBSET
    return Category.INCESSANT if len(set(known)) == 1 else Category.MULTIPLE


def _neighbor_weights(
    word: str, clusters: TopicClusterSet, g: "MemoryGraph", now: int
) -> tuple[float, dict[int, float]]:
    """Decayed edge weight from ``word`` to each cluster, plus the total.

    Neighbors are visited in sorted order so float accumulation is
    reproducible across runs. Unassigned neighbors count toward the total
    but toward no cluster.
    """
    total = 0.0
    per_cluster: dict[int, float] = {}
    for nbr in sorted(g.adjacency.get(word, ())):
        score = g.effective_score(word, nbr, now)
        total += score
        cid = clusters.assignment.get(nbr)
        if cid is not None:
            per_cluster[cid] = per_cluster.get(cid, 0.0) + score
    return total, per_cluster


def stickiness(word: str, cluster: int, g: "MemoryGraph", now: int) -> float:
    """Fraction of a word's decayed neighborhood weight inside ``cluster``.

    Returns 0.0 when the word has no neighbors or all its edges have
    decayed to zero.
    """
    if word not in g.nodes:
        raise UnknownWordError(word)
    total, per_cluster = _neighbor_weights(word, g.clusters, g, now)
    if total == 0.0:
        return 0.0
    return per_cluster.get(cluster, 0.0) / total


def _best_cluster(
    word: str, clusters: TopicClusterSet, g: "MemoryGraph", now: int, candidate: int
) -> int:
    """Argmax of stickiness over clusters holding at least one neighbor.

    Ties go to the lowest (oldest) cluster id; the candidate carries the
    newest id, so established clusters win ties against it. Words whose
    neighborhood weight is all zero land in the candidate.
    """
    total, per_cluster = _neighbor_weights(word, clusters, g, now)
    if total == 0.0 or not per_cluster:
        return candidate
    best_cid = -1
    best_value = -1.0
    for cid in sorted(per_cluster):
        value = per_cluster[cid] / total
        if value > best_value:
            best_cid = cid
            best_value = value
    return best_cid


def update_topic_clusters(
    clusters: TopicClusterSet,
    doc_words: Iterable[str],
    g: "MemoryGraph",
    now: int,
    order: str = "seen-first",
) -> TopicClusterSet:
    """Fold one document's words into the cluster partition.

    Must run after the document's subgraph was inserted, so edge scores
    are current. If every word is new, they form one fresh cluster.
    Otherwise a candidate cluster is allocated, unseen words start there,
    and each document word moves to its best-stickiness cluster (seen
    words first by default; words are processed in sorted order inside
    each group for reproducibility). An empty candidate is removed; its
    id stays consumed. Words outside the document never move.
    """
    if order not in ("seen-first", "unseen-first"):
        raise ValueError(f"unknown assign order: {order!r}")
    words = sorted(set(doc_words))
    if not words:
        return clusters
    seen = [w for w in words if w in clusters.assignment]
    unseen = [w for w in words if w not in clusters.assignment]

    if not seen:
        cid = clusters.allocate()
        for w in words:
            clusters.assign(w, cid)
            g.nodes[w].cluster = cid
        return clusters

    candidate = clusters.allocate()
    keep = frozenset((candidate,))
    for w in unseen:
        clusters.assign(w, candidate, keep_empty=keep)
    groups = (seen, unseen) if order == "seen-first" else (unseen, seen)
    for group in groups:
        for w in group:
            target = _best_cluster(w, clusters, g, now, candidate)
            clusters.assign(w, target, keep_empty=keep)
            g.nodes[w].cluster = target
    clusters.drop_if_empty(candidate)
    return clusters
