"""Streaming topic detection over a decaying word co-occurrence graph."""

from .clustering import Category, TopicClusterSet, categorize, stickiness, update_topic_clusters
from .embedding import (
    HashEmbedder,
    SidecarEmbedder,
    VectorFileEmbedder,
    cosine,
    update_node_embedding,
)
from .errors import (
    ConfigError,
    MissingEdgeError,
    ProviderError,
    SnapshotError,
    StreamParseError,
    TopicStreamError,
    UnknownWordError,
)
from .evaluation import (
    EvalResult,
    GroundTruth,
    GroundTruthTopic,
    evaluate,
    keyword_precision_at_k,
    load_ground_truth,
    topic_recall_at_k,
)
from .extraction import TopicReport, extract_topics, gamma, upsilon
from .ingest import Document, TokenizedDocument, load_stopwords, load_stream, preprocess
from .memgraph import EdgeState, MemoryGraph, NodeState, decay_factor, restore
from .nertag import EntitySpan, Gazetteer, merge_entities, tag
from .pipeline import RunConfig, RunResult, export_graph, run

__version__ = "0.1.0"
