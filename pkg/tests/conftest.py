import numpy as np
import pytest

from topicstream.embedding import EmbeddingProvider, unit
from topicstream.ingest import TokenizedDocument
from topicstream.memgraph import EdgeState, MemoryGraph, NodeState


class ConstantEmbedder(EmbeddingProvider):
    """Returns one fixed unit vector for every document."""

    kind = "constant"

    def __init__(self, dim: int = 8):
        super().__init__(dim)
        self._vec = unit(np.ones(dim))

    def embed_document(self, tokens, doc_id=None):
        return self._vec.copy()


def make_tdoc(tokens, ts, likes=0, rts=0, doc_id="d", entity_tokens=(), entity_types=None):
    return TokenizedDocument(
        id=doc_id,
        timestamp=ts,
        tokens=list(tokens),
        likes=likes,
        retweets=rts,
        entity_tokens=set(entity_tokens),
        entity_types=dict(entity_types or {}),
    )


def put_node(g: MemoryGraph, word, freq_total=1, freq_window=0, freq_prev_window=0,
             engagement=0, last_update=0, is_entity=False, entity_type=None, cluster=None):
    """Install a node directly, bypassing insert_subgraph, for precise fixtures."""
    g.nodes[word] = NodeState(
        word=word,
        embedding=np.zeros(g.dim) + 1.0,
        freq_total=freq_total,
        freq_window=freq_window,
        freq_prev_window=freq_prev_window,
        engagement=engagement,
        last_update=last_update,
        is_entity=is_entity,
        entity_type=entity_type,
        cluster=cluster,
    )
    g.adjacency.setdefault(word, set())
    if cluster is not None:
        g.clusters.assign(word, cluster)
        g.clusters.next_id = max(g.clusters.next_id, cluster + 1)
    return g.nodes[word]


def put_edge(g: MemoryGraph, a, b, score, cooccur_count=1, last_update=0):
    key = (a, b) if a <= b else (b, a)
    g.edges[key] = EdgeState(score=score, cooccur_count=cooccur_count, last_update=last_update)
    g.adjacency[a].add(b)
    g.adjacency[b].add(a)
    return g.edges[key]


@pytest.fixture
def constant_embedder():
    return ConstantEmbedder()
