"""Synthetic document streams with planted topics.

The original evaluation corpora cannot be redistributed, so tests and
demos run on generated streams: a few disjoint planted topics whose
words co-occur heavily, against a large noise vocabulary. The generator
returns JSONL-ready records plus the matching ground-truth topics.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def make_planted_stream(
    n_docs: int = 5000,
    n_topics: int = 3,
    words_per_topic: int = 10,
    noise_vocab: int = 1000,
    start_ts: int = 1_000_000,
    duration: int = 3600,
    planted_fraction: float = 0.7,
    noise_in_planted: float = 0.2,
    seed: int = 0,
) -> tuple[list[dict], list[dict]]:
    """Build (documents, ground_truth) for a planted-topic stream.

    Planted documents draw 4-7 words from one topic's vocabulary and
    occasionally carry one noise word; the rest are pure noise documents.
    Topic vocabularies are mutually disjoint and disjoint from the noise
    vocabulary, so each planted topic should surface as one cluster.
    """
    rng = np.random.default_rng(seed)
    topics = [
        [f"topic{t}word{i}" for i in range(words_per_topic)] for t in range(n_topics)
    ]
    noise = [f"noise{j}" for j in range(noise_vocab)]

    records = []
    for i in range(n_docs):
        ts = start_ts + (i * duration) // n_docs
        if rng.random() < planted_fraction:
            topic = topics[int(rng.integers(n_topics))]
            count = int(rng.integers(4, 8))
            words = list(rng.choice(topic, size=count, replace=False))
            if rng.random() < noise_in_planted:
                words.append(noise[int(rng.integers(noise_vocab))])
        else:
            count = int(rng.integers(3, 9))
            words = list(rng.choice(noise, size=count, replace=False))
        rng.shuffle(words)
        records.append(
            {
                "id": f"doc{i}",
                "ts": ts,
                "text": " ".join(words),
                "likes": int(rng.integers(0, 20)),
                "rts": int(rng.integers(0, 10)),
                "lang": "en",
            }
        )

    ground_truth = [
        {"id": f"topic{t}", "keywords": topics[t]} for t in range(n_topics)
    ]
    return records, ground_truth


def write_jsonl(records: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def write_ground_truth(ground_truth: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ground_truth, fh, indent=2)
