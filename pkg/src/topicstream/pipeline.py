"""End-to-end orchestration: ingest -> embed -> insert -> cluster ->
periodic maintenance -> extract -> report/eval, plus snapshot/resume and
CSV graph export.

All timing is stream time (document timestamps); wall clock is never
consulted, so replays are reproducible byte for byte. Resume state
(documents consumed, window bookkeeping) rides in the snapshot metadata,
and a resumed run continues exactly where the snapshot stopped.
"""

from __future__ import annotations

import csv
import json
import logging
import shlex
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .clustering import categorize, update_topic_clusters
from .embedding import (
    DEFAULT_BATCH,
    DEFAULT_DIM,
    EmbeddingProvider,
    HashEmbedder,
    SidecarEmbedder,
    VectorFileEmbedder,
)
from .errors import ConfigError
from .evaluation import EvalResult, evaluate, load_ground_truth
from .extraction import TopicReport, extract_topics
from .ingest import load_stopwords, load_stream, preprocess
from .memgraph import MemoryGraph, restore
from .nertag import Gazetteer, merge_entities, tag

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    """Everything one pipeline run needs; defaults match the module docs."""

    input: str | Path
    out_dir: str | Path = "out"
    embedder: str = "hash"
    dim: int = DEFAULT_DIM
    alpha: float = 0.5
    rho_init: float = 1000.0
    node_budget: int = 100_000
    prune_epsilon: float = 0.01
    window: int = 600
    topk_topics: int = 10
    topk_words: int = 10
    assign_order: str = "seen-first"
    trend: bool = True
    stopwords: Optional[str | Path] = None
    gazetteer: Optional[str | Path] = None
    snapshot: Optional[str | Path] = None
    resume: bool = False
    eval_path: Optional[str | Path] = None
    match_threshold: float = 1.0
    keep_non_english: bool = False
    vector_file: Optional[str | Path] = None
    sidecar_cmd: Optional[str] = None
    sidecar_host: str = "127.0.0.1"
    sidecar_port: Optional[int] = None
    batch_size: int = DEFAULT_BATCH
    stop_after: Optional[int] = None
    print_topics: bool = False

    def validate(self) -> None:
        if self.embedder not in ("hash", "file", "sidecar"):
            raise ConfigError(f"unknown embedder {self.embedder!r}")
        if self.embedder == "file" and not self.vector_file:
            raise ConfigError("--embedder file requires --vector-file")
        if self.embedder == "sidecar" and not (self.sidecar_cmd or self.sidecar_port):
            raise ConfigError("--embedder sidecar requires --sidecar-cmd or --sidecar-port")
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must be in (0, 1)")
        if self.rho_init < 1:
            raise ConfigError("rho-init must be >= 1")
        if self.node_budget < 1:
            raise ConfigError("node-budget must be >= 1")
        if self.prune_epsilon <= 0:
            raise ConfigError("prune-eps must be > 0")
        if self.window < 1:
            raise ConfigError("window must be >= 1 second")
        if self.topk_topics < 1 or self.topk_words < 1:
            raise ConfigError("top-k settings must be >= 1")
        if self.assign_order not in ("seen-first", "unseen-first"):
            raise ConfigError(f"unknown assign order {self.assign_order!r}")
        if not 0.0 < self.match_threshold <= 1.0:
            raise ConfigError("match-threshold must be in (0, 1]")
        if self.batch_size < 1:
            raise ConfigError("batch size must be >= 1")
        if self.resume and not self.snapshot:
            raise ConfigError("--resume requires --snapshot")


@dataclass
class RunResult:
    reports: list[TopicReport] = field(default_factory=list)
    report_path: Optional[Path] = None
    eval_result: Optional[EvalResult] = None
    docs_consumed: int = 0
    docs_inserted: int = 0
    docs_dropped: int = 0
    category_counts: dict[str, int] = field(default_factory=dict)
    snapshot_path: Optional[Path] = None
    rho_final: float = 0.0
    node_count: int = 0


def build_provider(config: RunConfig) -> EmbeddingProvider:
    if config.embedder == "hash":
        return HashEmbedder(dim=config.dim)
    if config.embedder == "file":
        return VectorFileEmbedder(config.vector_file, dim=config.dim)
    command = shlex.split(config.sidecar_cmd) if config.sidecar_cmd else None
    return SidecarEmbedder(
        dim=config.dim,
        command=command,
        host=config.sidecar_host,
        port=config.sidecar_port,
        batch_size=config.batch_size,
    )


class _WindowState:
    """Window bookkeeping that must survive a snapshot/resume split."""

    def __init__(self, meta: Optional[dict] = None):
        meta = meta or {}
        self.docs_consumed: int = meta.get("docs_consumed", 0)
        self.window_origin: Optional[int] = meta.get("window_origin")
        self.next_boundary: Optional[int] = meta.get("next_boundary")
        self.docs_since_boundary: int = meta.get("docs_since_boundary", 0)
        self.last_raw_ts: Optional[int] = meta.get("last_raw_ts")

    def to_meta(self) -> dict:
        return {
            "docs_consumed": self.docs_consumed,
            "window_origin": self.window_origin,
            "next_boundary": self.next_boundary,
            "docs_since_boundary": self.docs_since_boundary,
            "last_raw_ts": self.last_raw_ts,
        }


def _close_window(g: MemoryGraph, now: int, config: RunConfig) -> Optional[TopicReport]:
    """Maintenance cycle at a window boundary: decay, adapt rho, extract."""
    g.apply_decay(now)
    g.adapt_rho(len(g.nodes) / g.node_budget)
    report = None
    if g.clusters.members:
        report = extract_topics(
            g,
            g.clusters,
            now,
            top_k_topics=config.topk_topics,
            top_k_words=config.topk_words,
            trend=config.trend,
        )
    for node in g.nodes.values():
        node.freq_prev_window = node.freq_window
        node.freq_window = 0
    return report


def _print_report(report: TopicReport) -> None:
    print(f"window ending at t={report.window_end}:")
    for entry in report.topics:
        words = ", ".join(w for w, _ in entry.words)
        print(f"  [{entry.probability:.3f}] cluster {entry.cluster_id}: {words}")


def run(config: RunConfig) -> RunResult:
    """Execute one full pipeline run; see RunConfig for the knobs.

    Deterministic given the config, the input file, and a deterministic
    embedding provider: repeated runs produce byte-identical reports, and
    a snapshot/resume split concatenates to the uninterrupted output.
    """
    config.validate()
    stopwords = load_stopwords(config.stopwords) if config.stopwords else set()
    gazetteer = Gazetteer.from_tsv(config.gazetteer) if config.gazetteer else None

    if config.resume:
        g, meta = restore(config.snapshot)
        if g.dim != config.dim:
            raise ConfigError(
                f"snapshot dim {g.dim} does not match configured dim {config.dim}"
            )
        state = _WindowState(meta)
        logger.info("resumed from %s at %d docs consumed", config.snapshot, state.docs_consumed)
    else:
        g = MemoryGraph(
            dim=config.dim,
            rho=config.rho_init,
            node_budget=config.node_budget,
            prune_epsilon=config.prune_epsilon,
        )
        state = _WindowState()

    docs = load_stream(config.input)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "reports.jsonl"
    result = RunResult(report_path=report_path)
    result.category_counts = {"unique": 0, "incessant": 0, "multiple": 0, "subset": 0}

    provider = build_provider(config)
    stopped_early = False
    mode = "a" if config.resume else "w"
    try:
        with open(report_path, mode, encoding="utf-8") as report_file:

            def emit(report: TopicReport) -> None:
                report_file.write(json.dumps(report.to_json_dict(), separators=(",", ":")) + "\n")
                result.reports.append(report)
                if config.print_topics:
                    _print_report(report)

            todo = docs[state.docs_consumed :]
            if config.stop_after is not None:
                remaining = max(0, config.stop_after - state.docs_consumed)
                stopped_early = remaining < len(todo)
                todo = todo[:remaining]

            for start in range(0, len(todo), config.batch_size):
                chunk = todo[start : start + config.batch_size]
                prepared = [
                    preprocess(doc, stopwords, keep_non_english=config.keep_non_english)
                    for doc in chunk
                ]
                if gazetteer is not None:
                    prepared = [
                        merge_entities(tdoc, tag(tdoc, gazetteer)) if tdoc else None
                        for tdoc in prepared
                    ]
                kept = [tdoc for tdoc in prepared if tdoc is not None]
                vectors = provider.embed_batch(
                    [tdoc.tokens for tdoc in kept], [tdoc.id for tdoc in kept]
                )
                vec_iter = iter(vectors)

                for doc, tdoc in zip(chunk, prepared):
                    if state.window_origin is None:
                        state.window_origin = doc.timestamp
                        state.next_boundary = state.window_origin + config.window
                    while doc.timestamp >= state.next_boundary:
                        report = _close_window(g, state.next_boundary, config)
                        if report is not None:
                            emit(report)
                        state.next_boundary += config.window
                        state.docs_since_boundary = 0
                    state.docs_consumed += 1
                    state.docs_since_boundary += 1
                    state.last_raw_ts = doc.timestamp
                    if tdoc is None:
                        result.docs_dropped += 1
                        continue
                    doc_vec = next(vec_iter)
                    cat = categorize(g.clusters, set(tdoc.tokens))
                    result.category_counts[cat.value] += 1
                    g.insert_subgraph(tdoc, doc_vec, alpha=config.alpha)
                    update_topic_clusters(
                        g.clusters,
                        set(tdoc.tokens),
                        g,
                        tdoc.timestamp,
                        order=config.assign_order,
                    )
                    result.docs_inserted += 1
                if state.docs_consumed and state.docs_consumed % 10_000 == 0:
                    logger.info(
                        "processed %d documents, %d nodes, rho=%.0f",
                        state.docs_consumed,
                        len(g.nodes),
                        g.rho,
                    )

            if not stopped_early and state.docs_since_boundary > 0:
                end_ts = max(g.stream_time, state.last_raw_ts or 0)
                report = _close_window(g, end_ts, config)
                if report is not None:
                    emit(report)
                state.docs_since_boundary = 0
    finally:
        provider.close()

    if config.snapshot:
        g.snapshot(config.snapshot, meta=state.to_meta())
        result.snapshot_path = Path(config.snapshot)

    with open(out_dir / "clusters.json", "w", encoding="utf-8") as fh:
        json.dump(g.clusters.as_dict(), fh, indent=2)

    result.docs_consumed = state.docs_consumed
    result.rho_final = g.rho
    result.node_count = len(g.nodes)

    if config.eval_path:
        gt = load_ground_truth(config.eval_path)
        result.eval_result = evaluate(
            result.reports,
            gt,
            k_topics=config.topk_topics,
            k_words=config.topk_words,
            match_threshold=config.match_threshold,
        )
        with open(out_dir / "eval.json", "w", encoding="utf-8") as fh:
            json.dump(result.eval_result.to_json_dict(), fh, indent=2)
        print(result.eval_result.format_table())

    logger.info(
        "run complete: %d consumed, %d inserted, %d dropped, %d reports",
        result.docs_consumed,
        result.docs_inserted,
        result.docs_dropped,
        len(result.reports),
    )
    return result


def export_graph(snapshot_path: str | Path, out_dir: str | Path) -> tuple[Path, Path]:
    """Dump a snapshot as bulk-import-friendly node/edge CSV files."""
    g, _ = restore(snapshot_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    nodes_path = out / "nodes.csv"
    edges_path = out / "edges.csv"
    with open(nodes_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "entity_type", "cluster"])
        for word, node in sorted(g.nodes.items()):
            writer.writerow([word, node.entity_type or "", node.cluster if node.cluster is not None else ""])
    with open(edges_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "score", "cooccur_count"])
        for (a, b), edge in sorted(g.edges.items()):
            writer.writerow([a, b, edge.score, edge.cooccur_count])
    return nodes_path, edges_path
