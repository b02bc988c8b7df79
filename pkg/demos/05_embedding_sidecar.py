"""Driving the engine with the external embedding sidecar.

The sidecar is a separate Node process speaking newline-delimited JSON:
one request line in, one response line out. Build it first:

    cd sidecar && npm install && npm run build

Any service that speaks the same protocol (including one wrapping a real
sentence-transformer model) can stand in; the engine only sees vectors.
"""

import shutil
import tempfile
from pathlib import Path

from topicstream import RunConfig, SidecarEmbedder, cosine, run
from topicstream.evaluation import load_ground_truth, topic_recall_at_k
from topicstream.synthetic import make_planted_stream, write_ground_truth, write_jsonl

dist = Path(__file__).resolve().parent.parent / "sidecar" / "dist" / "main.js"
if not dist.exists() or shutil.which("node") is None:
    raise SystemExit(f"sidecar bundle not found at {dist}; run `npm run build` in sidecar/ first")

command = ["node", str(dist), "--stdio", "--dim", "128"]

# Talk to the sidecar directly.
with SidecarEmbedder(dim=128, command=command) as provider:
    vectors = provider.embed_batch([["good", "morning"], ["good", "evening"], ["tax", "forms"]])
    print("three texts embedded through the sidecar")
    print(f"  cos(good morning, good evening) = {cosine(vectors[0], vectors[1]):.3f}")
    print(f"  cos(good morning, tax forms)    = {cosine(vectors[0], vectors[2]):.3f}")

# Same pipeline as always, embeddings served out of process.
workdir = Path(tempfile.mkdtemp(prefix="topicstream-sidecar-"))
records, ground_truth = make_planted_stream(n_docs=1000, noise_vocab=200, duration=1800, seed=2)
write_jsonl(records, workdir / "stream.jsonl")
write_ground_truth(ground_truth, workdir / "gt.json")

result = run(
    RunConfig(
        input=workdir / "stream.jsonl",
        out_dir=workdir / "out",
        embedder="sidecar",
        sidecar_cmd=" ".join(command),
        dim=128,
        node_budget=2000,
    )
)
gt = load_ground_truth(workdir / "gt.json")
print(f"\nsidecar-driven run: {result.docs_inserted} documents, "
      f"topic-recall@3 = {topic_recall_at_k(result.reports, gt, k=3):.3f}")
