import json
import math

import numpy as np
import pytest

from topicstream.embedding import (
    HashEmbedder,
    VectorFileEmbedder,
    cosine,
    unit,
    update_node_embedding,
)
from topicstream.errors import ProviderError


def test_hash_provider_deterministic():
    provider = HashEmbedder(dim=64)
    a = provider.embed_document(["a", "b"])
    b = provider.embed_document(["a", "b"])
    assert np.array_equal(a, b)
    # A fresh instance gives the same vectors too.
    c = HashEmbedder(dim=64).embed_document(["a", "b"])
    assert np.array_equal(a, c)


def test_hash_provider_distinct_tokens_distinct_vectors():
    provider = HashEmbedder(dim=64)
    va = provider.embed_document(["a"])
    vb = provider.embed_document(["b"])
    # Independent arithmetic for the comparison.
    manual = float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))
    assert manual < 1.0
    assert cosine(va, vb) < 1.0


def test_hash_provider_unit_norm():
    provider = HashEmbedder(dim=128)
    for tokens in (["a"], ["a", "b", "c"], ["x"] * 5):
        vec = provider.embed_document(tokens)
        assert abs(np.linalg.norm(vec) - 1.0) <= 1e-9


def test_hash_provider_shared_tokens_raise_cosine():
    provider = HashEmbedder(dim=128)
    overlap = cosine(provider.embed_document(["a", "b"]), provider.embed_document(["a", "c"]))
    disjoint = cosine(provider.embed_document(["a", "b"]), provider.embed_document(["c", "d"]))
    assert overlap > disjoint


def test_hash_provider_rejects_empty():
    with pytest.raises(ProviderError):
        HashEmbedder(dim=8).embed_document([])


def test_cosine_identity_and_orthogonal():
    v = unit(np.array([3.0, 4.0, 0.0]))
    assert cosine(v, v) == 1.0
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    assert cosine(e1, e2) == 0.0


def test_cosine_45_degrees():
    a = np.array([1.0, 1.0, 0.0])
    b = np.array([1.0, 0.0, 0.0])
    expected = 1.0 / math.sqrt(2.0)
    assert abs(cosine(a, b) - expected) <= 1e-6


def test_cosine_clamped():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.standard_normal(16)
        b = rng.standard_normal(16)
        assert -1.0 <= cosine(a, b) <= 1.0


def test_cosine_errors():
    with pytest.raises(ValueError, match="dimension"):
        cosine(np.ones(3), np.ones(4))
    with pytest.raises(ValueError, match="zero"):
        cosine(np.zeros(3), np.ones(3))


def test_update_symmetric_blend():
    prev = np.array([1.0, 0.0])
    doc = np.array([0.0, 1.0])
    out = update_node_embedding(prev, doc, alpha=0.5)
    expected = 1.0 / math.sqrt(2.0)
    assert np.allclose(out, [expected, expected], atol=1e-9)


def test_update_fixed_point_exact():
    v = unit(np.array([0.3, -0.2, 0.93]))
    out = update_node_embedding(v, v.copy(), alpha=0.5)
    assert np.array_equal(out, v)


def test_update_alpha_09_direction():
    prev = np.array([1.0, 0.0])
    doc = np.array([0.0, 1.0])
    out = update_node_embedding(prev, doc, alpha=0.9)
    # Direct evaluation of the affine blend, then the same normalization.
    pre_norm = np.array([0.9, 0.1])
    assert np.allclose(out, pre_norm / np.linalg.norm(pre_norm), atol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.5, 1.5])
def test_update_rejects_bad_alpha(alpha):
    with pytest.raises(ValueError):
        update_node_embedding(np.ones(2), np.ones(2), alpha)


def test_update_output_in_span_of_inputs():
    rng = np.random.default_rng(5)
    for _ in range(100):
        prev = unit(rng.standard_normal(16))
        doc = unit(rng.standard_normal(16))
        out = update_node_embedding(prev, doc, alpha=float(rng.uniform(0.05, 0.95)))
        # Residual after projecting onto span{prev, doc} must vanish.
        basis = np.linalg.qr(np.stack([prev, doc], axis=1))[0]
        residual = out - basis @ (basis.T @ out)
        assert np.linalg.norm(residual) <= 1e-9


def test_update_interpolates_monotonically():
    rng = np.random.default_rng(9)
    prev = unit(rng.standard_normal(32))
    doc = unit(rng.standard_normal(32))
    sims_prev = []
    sims_doc = []
    grid = [0.05, 0.2, 0.4, 0.6, 0.8, 0.95]
    for alpha in grid:
        out = update_node_embedding(prev, doc, alpha)
        sims_prev.append(cosine(out, prev))
        sims_doc.append(cosine(out, doc))
    assert sims_prev == sorted(sims_prev)
    assert sims_doc == sorted(sims_doc, reverse=True)
    # Limits: alpha near 1 hugs prev, alpha near 0 hugs doc.
    assert cosine(update_node_embedding(prev, doc, 0.999999), prev) > 0.999
    assert cosine(update_node_embedding(prev, doc, 0.000001), doc) > 0.999


def test_embed_batch_matches_single_and_empty():
    provider = HashEmbedder(dim=32)
    single = provider.embed_batch([["a", "b"]])
    assert len(single) == 1
    assert np.array_equal(single[0], provider.embed_document(["a", "b"]))
    assert provider.embed_batch([]) == []
    docs = [["a"], ["b"], ["a", "b"]]
    batch = provider.embed_batch(docs)
    for tokens, vec in zip(docs, batch):
        assert np.array_equal(vec, provider.embed_document(tokens))


def test_vector_file_provider(tmp_path):
    path = tmp_path / "vectors.jsonl"
    with open(path, "w") as fh:
        fh.write(json.dumps({"id": "d1", "vector": [3.0, 0.0, 0.0, 4.0]}) + "\n")
        fh.write(json.dumps({"id": "d2", "vector": [0.0, 1.0, 0.0, 0.0]}) + "\n")
    provider = VectorFileEmbedder(path, dim=4)
    vec = provider.embed_document(["ignored"], doc_id="d1")
    assert abs(np.linalg.norm(vec) - 1.0) <= 1e-9
    assert np.allclose(vec, [0.6, 0.0, 0.0, 0.8])
    with pytest.raises(ProviderError, match="no vector"):
        provider.embed_document(["x"], doc_id="unknown")
    with pytest.raises(ProviderError, match="document id"):
        provider.embed_document(["x"])


def test_vector_file_dim_mismatch(tmp_path):
    path = tmp_path / "vectors.jsonl"
    path.write_text(json.dumps({"id": "d1", "vector": [1.0, 2.0]}) + "\n")
    with pytest.raises(ProviderError, match="dim"):
        VectorFileEmbedder(path, dim=3)
