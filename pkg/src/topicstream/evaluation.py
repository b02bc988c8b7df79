"""Topic-recall and keyword-precision scoring of emitted reports.

Ground truth is a JSON list: [{"id": str, "keywords": [str, ...],
"window": [start, end]?}]. A detected topic matches a ground-truth topic
when its reported keywords cover at least ``match_threshold`` of the
mandatory keywords (default: all of them). Matching is greedy in report
order then detected-probability order, one-to-one on both sides; ties
between ground-truth candidates break by coverage then id, so shuffling
the ground-truth file never changes scores.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .extraction import TopicReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroundTruthTopic:
    id: str
    keywords: frozenset[str]
    window: Optional[tuple[int, int]] = None


@dataclass
class GroundTruth:
    topics: list[GroundTruthTopic] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.topics)

    def all_keywords(self) -> set[str]:
        out: set[str] = set()
        for topic in self.topics:
            out |= topic.keywords
        return out


@dataclass
class EvalResult:
    k: int
    topic_recall: float
    keyword_precision: float
    keyword_precision_literal: float
    matched: list[tuple[str, int]] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "topic_recall": self.topic_recall,
            "keyword_precision": self.keyword_precision,
            "keyword_precision_literal": self.keyword_precision_literal,
            "matched": [[gt_id, cid] for gt_id, cid in self.matched],
        }

    def format_table(self) -> str:
        rows = [
            ("topic-recall", self.topic_recall),
            ("keyword-precision", self.keyword_precision),
            ("keyword-precision (ground-truth denominator)", self.keyword_precision_literal),
        ]
        width = max(len(name) for name, _ in rows)
        lines = [f"{'metric':<{width}}  @{self.k}", "-" * (width + 8)]
        for name, value in rows:
            lines.append(f"{name:<{width}}  {value:.3f}")
        lines.append(f"{'matched topics':<{width}}  {len(self.matched)}")
        return "\n".join(lines)


def load_ground_truth(path: str | Path) -> GroundTruth:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, list):
        raise ValueError(f"{path}: ground truth must be a JSON list")
    topics = []
    for item in payload:
        keywords = frozenset(str(k).lower() for k in item["keywords"])
        if not keywords:
            raise ValueError(f"{path}: topic {item.get('id')!r} has no keywords")
        window = tuple(item["window"]) if item.get("window") else None
        topics.append(GroundTruthTopic(id=str(item["id"]), keywords=keywords, window=window))
    return GroundTruth(topics=topics)


def load_reports(path: str | Path) -> list[TopicReport]:
    reports = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                reports.append(TopicReport.from_json_dict(json.loads(line)))
    return reports


@dataclass(frozen=True)
class _Match:
    gt_id: str
    cluster_id: int
    window_end: int
    detected_words: tuple[str, ...]


def _coverage(detected: set[str], gt_topic: GroundTruthTopic) -> float:
    return len(detected & gt_topic.keywords) / len(gt_topic.keywords)


def _match_topics(
    reports: Sequence[TopicReport],
    gt: GroundTruth,
    k_topics: Optional[int],
    match_threshold: float,
) -> list[_Match]:
    """Greedy one-to-one matching, unique on both sides across all windows."""
    matches: list[_Match] = []
    matched_gt: set[str] = set()
    used_clusters: set[int] = set()
    for report in reports:
        entries = report.topics if k_topics is None else report.topics[:k_topics]
        for entry in entries:
            if entry.cluster_id in used_clusters:
                continue
            detected = {w for w, _ in entry.words}
            best = None
            best_key = None
            for topic in gt.topics:
                if topic.id in matched_gt:
                    continue
                if topic.window is not None and not (
                    topic.window[0] <= report.window_end <= topic.window[1]
                ):
                    continue
                coverage = _coverage(detected, topic)
                if coverage < match_threshold or coverage == 0.0:
                    continue
                key = (-coverage, topic.id)
                if best_key is None or key < best_key:
                    best = topic
                    best_key = key
            if best is not None:
                matched_gt.add(best.id)
                used_clusters.add(entry.cluster_id)
                matches.append(
                    _Match(
                        gt_id=best.id,
                        cluster_id=entry.cluster_id,
                        window_end=report.window_end,
                        detected_words=tuple(w for w, _ in entry.words),
                    )
                )
    return matches


def topic_recall_at_k(
    reports: Sequence[TopicReport],
    gt: GroundTruth,
    k: int,
    match_threshold: float = 1.0,
) -> float:
    """Fraction of ground-truth topics detected within the top-k topics."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not gt.topics:
        raise ValueError("ground truth is empty")
    matches = _match_topics(reports, gt, k, match_threshold)
    return len(matches) / len(gt.topics)


def _keyword_sets(
    matches: Sequence[_Match], gt: GroundTruth, k: int
) -> tuple[set[str], set[str]]:
    """(all detected keywords, correctly detected keywords) with set semantics."""
    by_id = {topic.id: topic for topic in gt.topics}
    detected: set[str] = set()
    correct: set[str] = set()
    for match in matches:
        top_words = set(match.detected_words[:k])
        detected |= top_words
        correct |= top_words & by_id[match.gt_id].keywords
    return detected, correct


def keyword_precision_at_k(
    reports: Sequence[TopicReport],
    gt: GroundTruth,
    k: int,
    match_threshold: float = 1.0,
    k_topics: Optional[int] = None,
) -> float:
    """Standard precision of matched topics' top-k keywords.

    ``k`` truncates each matched topic's keyword list; ``k_topics``
    bounds how deep in the per-window topic ranking matches are searched
    (None = all reported topics).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    matches = _match_topics(reports, gt, k_topics, match_threshold)
    detected, correct = _keyword_sets(matches, gt, k)
    if not detected:
        return 0.0
    return len(correct) / len(detected)


def evaluate(
    reports: Sequence[TopicReport],
    gt: GroundTruth,
    k_topics: int,
    k_words: int,
    match_threshold: float = 1.0,
) -> EvalResult:
    """Full scoring pass: recall, both precision variants, matched pairs.

    The "literal" precision divides by the total number of ground-truth
    keywords instead of the number of detected ones.
    """
    if not gt.topics:
        raise ValueError("ground truth is empty")
    matches = _match_topics(reports, gt, k_topics, match_threshold)
    detected, correct = _keyword_sets(matches, gt, k_words)
    precision = len(correct) / len(detected) if detected else 0.0
    literal_denom = len(gt.all_keywords())
    literal = len(correct) / literal_denom if literal_denom else 0.0
    return EvalResult(
        k=k_topics,
        topic_recall=len(matches) / len(gt.topics),
        keyword_precision=precision,
        keyword_precision_literal=literal,
        matched=[(m.gt_id, m.cluster_id) for m in matches],
    )
