"""Memory-graph basics: documents become subgraphs, and the graph forgets.

Every document is reduced to its distinct tokens and inserted as a
complete subgraph: one node per token, one edge per token pair. Edge
weights accumulate the cosine similarity of the endpoint embeddings, so
repeated co-occurrence in similar contexts pushes an edge's score toward
its co-occurrence count. Unreinforced state then fades along the
forgetting curve exp(-elapsed/rho) and is pruned once it drops below the
retrievability threshold.
"""

import math

from topicstream import Document, HashEmbedder, MemoryGraph, preprocess

provider = HashEmbedder(dim=64)
g = MemoryGraph(dim=64, rho=300.0, prune_epsilon=0.01)

stream = [
    Document(id="t1", timestamp=0, text="Stunning goal at Wembley!", likes=12, retweets=4),
    Document(id="t2", timestamp=30, text="What a goal, Wembley erupts", likes=3, retweets=1),
    Document(id="t3", timestamp=60, text="Wembley goal replay everywhere", likes=8, retweets=2),
    Document(id="t4", timestamp=90, text="Traffic jam downtown again", likes=0, retweets=0),
]
stopwords = {"a", "at", "what"}

for doc in stream:
    tdoc = preprocess(doc, stopwords)
    g.insert_subgraph(tdoc, provider.embed_document(tdoc.tokens))

print(f"{len(g.nodes)} nodes, {len(g.edges)} edges after {len(stream)} documents\n")

print("strongest edges (stored score ~ co-occurrence, weighted by context):")
for (a, b), edge in sorted(g.edges.items(), key=lambda kv: -kv[1].score)[:5]:
    print(f"  {a} -- {b}: score={edge.score:.3f} cooccur={edge.cooccur_count}")

# The same edge, read later and later, fades exponentially.
print("\nforgetting curve on the goal--wembley edge (rho=300):")
for elapsed in (0, 150, 300, 600, 1200):
    eff = g.effective_score("goal", "wembley", g.stream_time + elapsed)
    print(f"  +{elapsed:>5}s  effective score = {eff:8.4f}")

half_life = g.rho * math.log(2.0)
print(f"\nhalf-life = rho*ln(2) = {half_life:.0f}s of stream time")

# Maintenance prunes whatever faded below the threshold. By t=1600 the
# single-occurrence edges (score 1) are below 0.01, while the reinforced
# goal--wembley edge (score 3) still clears it and keeps its nodes alive.
report = g.apply_decay(now=1600)
print(f"\nafter maintenance at t=1600: removed {len(report.removed_edges)} edges, "
      f"{len(report.removed_nodes)} nodes")
print("surviving nodes:", ", ".join(sorted(g.nodes)))
