"""The whole workflow in one sitting: generate a fixture, ingest and compute
through the CLI entry points, then query the resulting snapshot through the
HTTP API (in-process, no sockets needed).
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from termex.cli import main as termex
from termex.service import create_app
from termex.snapshot import read_snapshot

tmp = Path(tempfile.mkdtemp(prefix="termex-demo-"))
fx, ws = tmp / "fixture", tmp / "workspace"

assert termex(["fixture", "--out", str(fx)]) == 0
summary = json.loads((fx / "fixture.json").read_text())

for order, corpus_id in enumerate(summary["corpus_ids"]):
    files = [str(fx / rel) for rel in summary["replicates"][corpus_id]]
    assert termex([
        "ingest", "--workspace", str(ws), "--corpus", corpus_id,
        "--label", f"Corpus {order + 1}", "--order", str(order),
        "--terminology", str(fx / "terminology.tsv"), *files,
    ]) == 0

assert termex(["compute", "--workspace", str(ws)]) == 0

client = TestClient(create_app(read_snapshot(ws / "snapshot")))

print("\nGET /api/corpora")
for corpus in client.get("/api/corpora").json():
    print(f"  {corpus['id']}: vocab {corpus['vocab_size']}, "
          f"high-confidence {corpus['high_conf_count']}")

print("\nGET /api/concepts/search?q=drifting")
for hit in client.get("/api/concepts/search", params={"q": "drifting"}).json()["results"]:
    print(f"  {hit['id']} ({hit['match_kind']} match on {hit['matched_term']!r})")

print("\nGET /api/concepts/planted_switch  (neighbor flip + warning)")
detail = client.get("/api/concepts/planted_switch").json()
for block in detail["corpora"]:
    top = ", ".join(n["id"] for n in block["neighbors"][:3])
    note = "  <- warning: not high-confidence here" if block["warning"] else ""
    print(f"  {block['corpus_id']}: ec={block['ec']:.2f} top: {top}{note}")

print("\nGET /api/similarity?ref=c1_000&cmp=planted_drift")
series = client.get(
    "/api/similarity", params=[("ref", "c1_000"), ("cmp", "planted_drift")]
).json()["series"][0]
for point in series["points"]:
    print(f"  {point['corpus_id']}: {point['mean']:.3f} +- {point['std']:.3f}")

print(f"\nsnapshot lives at {ws / 'snapshot'} — serve it with:")
print(f"  termex serve --snapshot {ws / 'snapshot'} --port 8000")
