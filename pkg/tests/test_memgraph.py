import json
import math

import numpy as np
import pytest

from topicstream.embedding import HashEmbedder
from topicstream.errors import MissingEdgeError, SnapshotError
from topicstream.memgraph import MemoryGraph, decay_factor, restore

from conftest import ConstantEmbedder, make_tdoc, put_edge, put_node
from oracles import cooccurrence_counts


def fresh_graph(dim=8, **kwargs):
    kwargs.setdefault("rho", 1000.0)
    return MemoryGraph(dim=dim, **kwargs)


# ----------------------------------------------------------------------
# insert_subgraph


def test_insert_fresh_pair_scores_one():
    g = fresh_graph()
    provider = HashEmbedder(dim=8)
    doc = make_tdoc(["a", "b"], ts=10)
    touched = g.insert_subgraph(doc, provider.embed_document(doc.tokens))
    assert touched == {"a", "b"}
    edge = g.edges[("a", "b")]
    assert edge.score == 1.0
    assert edge.cooccur_count == 1
    assert edge.last_update == 10
    assert g.stream_time == 10


def test_insert_same_doc_twice_constant_provider():
    g = fresh_graph()
    provider = ConstantEmbedder(dim=8)
    for ts in (10, 20):
        doc = make_tdoc(["a", "b"], ts=ts)
        g.insert_subgraph(doc, provider.embed_document(doc.tokens))
    edge = g.edges[("a", "b")]
    assert edge.score == 2.0
    assert edge.cooccur_count == 2


def test_insert_edge_structure_matches_cooccurrence():
    g = fresh_graph()
    provider = HashEmbedder(dim=8)
    g.insert_subgraph(make_tdoc(["a", "b"], ts=1), provider.embed_document(["a", "b"]))
    g.insert_subgraph(make_tdoc(["b", "c"], ts=2), provider.embed_document(["b", "c"]))
    assert set(g.nodes) == {"a", "b", "c"}
    assert set(g.edges) == {("a", "b"), ("b", "c")}
    assert ("a", "c") not in g.edges


def test_insert_random_stream_matches_cooccurrence_oracle():
    rng = np.random.default_rng(21)
    vocab = [f"w{i}" for i in range(15)]
    g = fresh_graph()
    provider = HashEmbedder(dim=8)
    token_lists = []
    for i in range(80):
        tokens = list(rng.choice(vocab, size=rng.integers(2, 6), replace=False))
        token_lists.append(tokens)
        g.insert_subgraph(make_tdoc(tokens, ts=i), provider.embed_document(tokens))
    expected = cooccurrence_counts(token_lists)
    assert set(g.edges) == set(expected)
    for key, count in expected.items():
        assert g.edges[key].cooccur_count == count


def test_insert_counters_and_entities():
    g = fresh_graph()
    provider = ConstantEmbedder(dim=8)
    doc = make_tdoc(
        ["goal", "final_whistle", "goal"],
        ts=5,
        likes=7,
        rts=3,
        entity_tokens={"final_whistle"},
        entity_types={"final_whistle": "EVENT"},
    )
    g.insert_subgraph(doc, provider.embed_document(doc.tokens))
    goal = g.nodes["goal"]
    assert goal.freq_total == 1  # duplicate tokens collapse
    assert goal.freq_window == 1
    assert goal.engagement == 10
    whistle = g.nodes["final_whistle"]
    assert whistle.is_entity and whistle.entity_type == "EVENT"
    assert not goal.is_entity


def test_insert_rejects_time_going_backwards():
    g = fresh_graph()
    provider = ConstantEmbedder(dim=8)
    g.insert_subgraph(make_tdoc(["a", "b"], ts=10), provider.embed_document(["a"]))
    with pytest.raises(ValueError, match="older than stream time"):
        g.insert_subgraph(make_tdoc(["c"], ts=5), provider.embed_document(["c"]))


def test_constant_provider_degeneracy_small():
    # With one fixed vector, every edge score equals its co-occurrence count.
    rng = np.random.default_rng(4)
    vocab = [f"w{i}" for i in range(20)]
    g = fresh_graph()
    provider = ConstantEmbedder(dim=8)
    for i in range(100):
        tokens = list(rng.choice(vocab, size=rng.integers(2, 7), replace=False))
        g.insert_subgraph(make_tdoc(tokens, ts=i), provider.embed_document(tokens))
    for edge in g.edges.values():
        assert edge.score == edge.cooccur_count


# ----------------------------------------------------------------------
# decay


def test_decay_factor_zero_elapsed():
    assert decay_factor(100, 100, 50.0) == 1.0


def test_decay_factor_one_stability():
    # Independent arithmetic: e^{-1} = 1/e.
    assert abs(decay_factor(0, 700, 700.0) - 1.0 / math.e) <= 1e-6


def test_decay_factor_half_life():
    rho = 123.0
    value = decay_factor(0.0, rho * math.log(2.0), rho)
    assert abs(value - 0.5) <= 1e-9


def test_decay_factor_errors():
    with pytest.raises(ValueError, match="negative elapsed"):
        decay_factor(10, 5, 1.0)
    with pytest.raises(ValueError, match="rho"):
        decay_factor(0, 1, 0.0)


def test_apply_decay_fresh_graph_removes_nothing():
    g = fresh_graph(rho=1000.0)
    put_node(g, "a", last_update=100)
    put_node(g, "b", last_update=100)
    put_edge(g, "a", "b", score=1.0, last_update=100)
    g.stream_time = 100
    report = g.apply_decay(100)
    assert report.removed_edges == [] and report.removed_nodes == []
    assert set(g.nodes) == {"a", "b"}


def test_apply_decay_removes_faded_edge():
    g = fresh_graph(rho=10.0)
    put_node(g, "a", last_update=0)
    put_node(g, "b", last_update=0)
    put_edge(g, "a", "b", score=1.0, last_update=0)
    # elapsed = 10*rho: e^{-10} ~ 4.5e-5 < 0.01 (checked independently).
    assert 1.0 / math.e**10 < 0.01
    report = g.apply_decay(100)
    assert report.removed_edges == [("a", "b")]
    # Both endpoints were last touched at 0 too, so they fade as well.
    assert report.removed_nodes == ["a", "b"]
    assert g.edges == {} and g.nodes == {}


def test_apply_decay_keeps_fresh_removes_stale():
    g = fresh_graph(rho=10.0)
    for w in ("a", "b", "c", "d"):
        put_node(g, w, last_update=0)
    put_edge(g, "a", "b", score=1.0, last_update=100)  # fresh
    put_edge(g, "c", "d", score=1.0, last_update=0)    # stale
    g.nodes["a"].last_update = 100
    g.nodes["b"].last_update = 100
    report = g.apply_decay(100)
    assert report.removed_edges == [("c", "d")]
    assert set(g.edges) == {("a", "b")}
    assert set(report.removed_nodes) == {"c", "d"}


def test_apply_decay_drops_cluster_membership():
    g = fresh_graph(rho=10.0)
    put_node(g, "a", last_update=0, cluster=1)
    put_node(g, "b", last_update=100, cluster=1)
    g.apply_decay(100)
    assert "a" not in g.clusters.assignment
    assert g.clusters.members == {1: {"b"}}


def test_apply_decay_prune_safety_random():
    rng = np.random.default_rng(17)
    vocab = [f"w{i}" for i in range(25)]
    g = fresh_graph(rho=50.0)
    provider = HashEmbedder(dim=8)
    ts = 0
    for _ in range(120):
        ts += int(rng.integers(0, 30))
        tokens = list(rng.choice(vocab, size=rng.integers(2, 5), replace=False))
        g.insert_subgraph(make_tdoc(tokens, ts=ts), provider.embed_document(tokens))
    g.apply_decay(ts + int(rng.integers(0, 200)))
    for a, b in g.edges:
        assert a in g.nodes and b in g.nodes
        assert b in g.adjacency[a] and a in g.adjacency[b]
    for word, neighbors in g.adjacency.items():
        assert word in g.nodes
        for nbr in neighbors:
            assert (min(word, nbr), max(word, nbr)) in g.edges


def test_effective_score_fresh_and_half_life():
    g = fresh_graph(rho=100.0)
    put_node(g, "a", last_update=0)
    put_node(g, "b", last_update=0)
    put_edge(g, "a", "b", score=2.0, last_update=0)
    assert g.effective_score("a", "b", 0) == 2.0
    half = g.effective_score("a", "b", 100.0 * math.log(2.0))
    assert abs(half - 1.0) <= 1e-9
    with pytest.raises(MissingEdgeError):
        g.effective_score("a", "missing", 0)


def test_effective_score_monotone_fading():
    g = fresh_graph(rho=77.0)
    put_node(g, "a", last_update=0)
    put_node(g, "b", last_update=0)
    put_edge(g, "a", "b", score=3.5, last_update=0)
    rng = np.random.default_rng(2)
    times = np.sort(rng.uniform(0, 1000, size=50))
    values = [g.effective_score("a", "b", t) for t in times]
    assert all(x >= y for x, y in zip(values, values[1:]))


# ----------------------------------------------------------------------
# rho adaptation


def test_adapt_rho_inside_hysteresis_band():
    g = fresh_graph(rho=500.0, node_budget=100)
    g.rho_init = 1000.0
    assert g.adapt_rho(0.85) == 500.0


def test_adapt_rho_upper_clamp():
    g = fresh_graph(rho=1000.0, node_budget=100)
    assert g.adapt_rho(0.5) == 1000.0
    g.rho = 995.0
    assert g.adapt_rho(0.5) == 996.0


def _staleness_graph():
    # Budget 10, twelve isolated nodes. Retrievability e^{-age/rho} crosses
    # the 0.01 threshold at age > rho*ln(100) ~ 4.605*rho, so with now=100:
    #   age 42 prunes first at rho=9, age 38 at rho=8, ages 33+34 at rho=7.
    g = MemoryGraph(dim=4, rho=10.0, node_budget=10, prune_epsilon=0.01)
    ages = [42, 38, 33, 34] + [0] * 8
    for i, age in enumerate(ages):
        put_node(g, f"w{i}", last_update=100 - age)
    g.stream_time = 100
    return g


def test_adapt_rho_decrements_by_one_per_iteration():
    g = _staleness_graph()
    for age, rho in ((42, 9.0), (38, 8.0), (33, 7.0), (34, 7.0)):
        assert math.exp(-age / rho) < 0.01, "fixture assumption"
        assert math.exp(-age / (rho + 1.0)) >= 0.01, "fixture assumption"
    new_rho = g.adapt_rho(len(g.nodes) / g.node_budget)
    assert new_rho == 7.0  # decreased by exactly 3
    assert len(g.nodes) == 8


def test_adapt_rho_exhaustion_stops_at_one():
    g = MemoryGraph(dim=4, rho=5.0, node_budget=4, prune_epsilon=0.01)
    for i in range(10):
        put_node(g, f"w{i}", last_update=100)  # all fresh: nothing prunable
    g.stream_time = 100
    new_rho = g.adapt_rho(len(g.nodes) / g.node_budget)
    assert new_rho == 1.0
    assert len(g.nodes) == 10  # exhausted, reported via rho=1


# ----------------------------------------------------------------------
# snapshot / restore


def test_snapshot_round_trip_empty(tmp_path):
    g = fresh_graph()
    path = tmp_path / "empty.snapshot.json"
    g.snapshot(path)
    restored, meta = restore(path)
    assert restored.nodes == {} and restored.edges == {}
    assert restored.rho == g.rho and restored.dim == g.dim
    assert meta == {}


def _graphs_equal(a: MemoryGraph, b: MemoryGraph) -> bool:
    if set(a.nodes) != set(b.nodes) or set(a.edges) != set(b.edges):
        return False
    for word, node in a.nodes.items():
        other = b.nodes[word]
        if not np.array_equal(node.embedding, other.embedding):
            return False
        for attr in ("freq_total", "freq_window", "freq_prev_window", "engagement",
                     "last_update", "is_entity", "entity_type", "cluster"):
            if getattr(node, attr) != getattr(other, attr):
                return False
    for key, edge in a.edges.items():
        other = b.edges[key]
        if (edge.score, edge.cooccur_count, edge.last_update) != (
            other.score, other.cooccur_count, other.last_update):
            return False
    return (
        a.rho == b.rho
        and a.rho_init == b.rho_init
        and a.stream_time == b.stream_time
        and a.node_budget == b.node_budget
        and a.prune_epsilon == b.prune_epsilon
        and a.clusters.assignment == b.clusters.assignment
        and a.clusters.members == b.clusters.members
        and a.clusters.next_id == b.clusters.next_id
    )


def test_snapshot_round_trip_after_inserts(tmp_path):
    rng = np.random.default_rng(33)
    vocab = [f"w{i}" for i in range(30)]
    g = fresh_graph(dim=16)
    provider = HashEmbedder(dim=16)
    for i in range(100):
        tokens = list(rng.choice(vocab, size=rng.integers(2, 6), replace=False))
        doc = make_tdoc(tokens, ts=i, likes=int(rng.integers(0, 5)))
        g.insert_subgraph(doc, provider.embed_document(tokens))
        for w in tokens:
            if g.nodes[w].cluster is None:
                g.clusters.assign(w, 1 + (hash(w) % 3))
                g.nodes[w].cluster = g.clusters.assignment[w]
    g.clusters.next_id = 10
    path = tmp_path / "graph.snapshot.json"
    g.snapshot(path, meta={"docs_consumed": 100})
    restored, meta = restore(path)
    assert _graphs_equal(g, restored)
    assert meta == {"docs_consumed": 100}


def test_restore_truncated_file(tmp_path):
    g = fresh_graph()
    provider = ConstantEmbedder(dim=8)
    g.insert_subgraph(make_tdoc(["a", "b", "c"], ts=1), provider.embed_document(["a"]))
    path = tmp_path / "snap.json"
    g.snapshot(path)
    data = path.read_text()
    path.write_text(data[: len(data) // 2])
    with pytest.raises(SnapshotError, match="corrupt"):
        restore(path)


def test_restore_version_mismatch(tmp_path):
    path = tmp_path / "snap.json"
    path.write_text(json.dumps({"format_version": 999}))
    with pytest.raises(SnapshotError, match="version"):
        restore(path)


# ----------------------------------------------------------------------
# maintenance cycle budget property


def test_budget_respected_after_maintenance_cycle():
    rng = np.random.default_rng(8)
    g = MemoryGraph(dim=8, rho=50.0, node_budget=30, prune_epsilon=0.01)
    provider = HashEmbedder(dim=8)
    ts = 0
    for i in range(150):
        ts += int(rng.integers(5, 20))
        tokens = [f"w{int(k)}" for k in rng.integers(0, 200, size=rng.integers(2, 5))]
        doc = make_tdoc(sorted(set(tokens)), ts=ts)
        g.insert_subgraph(doc, provider.embed_document(doc.tokens))
        if i % 25 == 24:
            g.apply_decay(ts)
            g.adapt_rho(len(g.nodes) / g.node_budget)
            assert len(g.nodes) <= g.node_budget or g.rho == 1.0
