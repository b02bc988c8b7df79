"""Incremental topic clustering: the four document categories.

Each incoming document is categorized by how its words overlap the
existing clusters, then every document word is pulled to the cluster
holding the largest share of its neighborhood edge weight (stickiness).
New clusters appear only when words genuinely bring a new context.
"""

from topicstream import HashEmbedder, MemoryGraph, categorize, stickiness, update_topic_clusters
from topicstream.ingest import TokenizedDocument

provider = HashEmbedder(dim=64)
g = MemoryGraph(dim=64, rho=1000.0)

stream = [
    # A football story and an election story, interleaved.
    (0, ["goal", "wembley", "chelsea"]),
    (10, ["ballot", "senate", "ohio"]),
    (20, ["goal", "chelsea", "penalty"]),        # mostly seen words: extends cluster 1
    (30, ["ballot", "ohio", "turnout"]),         # extends cluster 2
    (40, ["penalty", "wembley"]),                # fully inside cluster 1
    (50, ["turnout", "senate", "goal"]),         # words from both clusters
]

for ts, tokens in stream:
    doc = TokenizedDocument(id=f"t{ts}", timestamp=ts, tokens=tokens)
    category = categorize(g.clusters, set(tokens))
    g.insert_subgraph(doc, provider.embed_document(tokens))
    update_topic_clusters(g.clusters, set(tokens), g, ts)
    print(f"t={ts:>2}  {category.value:<9}  {tokens}")
    for cid, members in sorted(g.clusters.members.items()):
        print(f"        cluster {cid}: {sorted(members)}")

# Stickiness is the assignment criterion: the share of a word's decayed
# edge weight that falls inside one cluster.
print("\nstickiness of 'goal' toward each cluster at t=50:")
for cid in sorted(g.clusters.members):
    value = stickiness("goal", cid, g, 50)
    print(f"  cluster {cid}: {value:.3f}")
