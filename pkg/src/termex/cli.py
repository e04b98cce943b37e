"""Pipeline driver: ingest -> compute -> serve, plus the fixture generator.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import os
from pathlib import Path

from .errors import DataError, UsageError
from .fixtures import generate_fixture
from .ingest import (
    ConceptMetadata,
    load_replicate_set,
    parse_terminology,
)
from .pipeline import ComputeParams, build_snapshot
from .snapshot import read_snapshot, write_snapshot

WORKSPACE_FILE = "workspace.json"


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as UsageError (exit code 1)."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _load_workspace(workspace: Path) -> dict:
    descriptor = workspace / WORKSPACE_FILE
    if not descriptor.is_file():
        return {"corpora": []}
    try:
        return json.loads(descriptor.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{descriptor} is not valid JSON: {exc}") from exc


def _save_workspace(workspace: Path, doc: dict) -> None:
    doc["corpora"].sort(key=lambda c: (c["order_index"], c["id"]))
    workspace.mkdir(parents=True, exist_ok=True)
    (workspace / WORKSPACE_FILE).write_text(
        json.dumps(doc, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    workspace = Path(args.workspace)
    rset = load_replicate_set(args.embeddings, args.corpus, args.label, args.order)
    if args.terminology:
        with open(args.terminology, "rb") as fh:
            terms = parse_terminology(fh, name=str(args.terminology))
        term_note = f"{len(terms)} terminology entries"
    else:
        term_note = "no terminology"

    doc = _load_workspace(workspace)
    existing = [c for c in doc["corpora"] if c["id"] == args.corpus]
    if existing:
        doc["corpora"] = [c for c in doc["corpora"] if c["id"] != args.corpus]
        print(f"replacing previously ingested corpus {args.corpus!r}")
    doc["corpora"].append(
        {
            "id": args.corpus,
            "label": args.label,
            "order_index": args.order,
            "embeddings": [str(Path(p).resolve()) for p in args.embeddings],
            "terminology": str(Path(args.terminology).resolve()) if args.terminology else None,
            "m": rset.m,
            "dim": rset.dim,
            "vocab_sizes": list(rset.vocab_report.per_replicate),
            "shared_size": rset.vocab_report.shared,
        }
    )
    _save_workspace(workspace, doc)
    print(
        f"ingested {args.corpus!r}: m={rset.m} dim={rset.dim} "
        f"shared vocabulary {rset.vocab_report.shared} ({term_note})"
    )
    return 0


def cmd_compute(args: argparse.Namespace) -> int:
    if not 0.0 <= args.threshold <= 1.0:
        raise UsageError(f"--threshold must be in [0, 1], got {args.threshold}")
    if args.k < 1 or args.n_neighbors < 1 or args.iterations < 1:
        raise UsageError("--k, --n-neighbors, and --iterations must be >= 1")
    if args.perplexity <= 0:
        raise UsageError(f"--perplexity must be positive, got {args.perplexity}")

    workspace = Path(args.workspace)
    doc = _load_workspace(workspace)
    if not doc["corpora"]:
        raise DataError(f"workspace {workspace} has no ingested corpora")

    corpora = []
    terminology: dict[str, ConceptMetadata] = {}
    for entry in doc["corpora"]:
        stage = f"corpus {entry['id']!r}"
        try:
            corpora.append(
                load_replicate_set(
                    entry["embeddings"], entry["id"], entry["label"], entry["order_index"]
                )
            )
            if entry.get("terminology"):
                with open(entry["terminology"], "rb") as fh:
                    parsed = parse_terminology(fh, name=entry["terminology"])
                _merge_terminology(terminology, parsed)
        except (OSError, DataError) as exc:
            raise DataError(f"{stage}: {exc}") from exc

    params = ComputeParams(
        k=args.k,
        threshold=args.threshold,
        n_neighbors=args.n_neighbors,
        perplexity=args.perplexity,
        iterations=args.iterations,
        seed=args.seed,
    )
    snapshot = build_snapshot(
        corpora, terminology, params, progress=lambda msg: print(msg, file=sys.stderr)
    )
    out = Path(args.out) if args.out else workspace / "snapshot"
    digest = write_snapshot(out, snapshot)

    print(f"{'corpus':<12} {'entities':>8} {'hi-conf':>8}")
    for corpus in snapshot.corpora:
        d = corpus.descriptor
        print(f"{d.id:<12} {d.vocab_size:>8} {d.high_conf_count:>8}")
    print(f"snapshot written to {out} (manifest sha256 {digest[:12]}...)")
    return 0


def _merge_terminology(
    into: dict[str, ConceptMetadata], other: dict[str, ConceptMetadata]
) -> None:
    for cid, meta in other.items():
        prior = into.get(cid)
        if prior is None:
            into[cid] = meta
            continue
        synonyms = dict.fromkeys(prior.synonyms)
        for s in meta.synonyms:
            synonyms.setdefault(s)
        definitions = dict.fromkeys(prior.definitions)
        for d in meta.definitions:
            definitions.setdefault(d)
        into[cid] = ConceptMetadata(
            id=cid,
            preferred_term=prior.preferred_term,
            synonyms=tuple(synonyms),
            semantic_group=(
                prior.semantic_group
                if prior.semantic_group != "Unknown"
                else meta.semantic_group
            ),
            definitions=tuple(definitions),
        )


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    snapshot_dir = args.snapshot or os.environ.get("TE_SNAPSHOT")
    if not snapshot_dir:
        raise UsageError("no snapshot directory: pass --snapshot or set TE_SNAPSHOT")
    port = args.port if args.port is not None else int(os.environ.get("TE_PORT", "8000"))

    try:
        snapshot = read_snapshot(snapshot_dir)
    except DataError as exc:
        raise DataError(f"cannot load snapshot {snapshot_dir}: {exc}") from exc

    cors = args.cors.split(",") if args.cors else None
    app = create_app(snapshot, cors_origins=cors)
    print(f"serving snapshot {snapshot_dir} at http://{args.host}:{port}", flush=True)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def cmd_fixture(args: argparse.Namespace) -> int:
    info = generate_fixture(
        args.out,
        corpora=args.corpora,
        clusters=args.clusters,
        per_cluster=args.per_cluster,
        dim=args.dim,
        m=args.m,
        noise=args.noise,
        drift=args.drift,
        seed=args.seed,
    )
    n_files = sum(len(p) for p in info.replicate_paths.values())
    print(
        f"wrote {n_files} replicate files for {len(info.corpus_ids)} corpora "
        f"under {info.out_dir}"
    )
    if info.switch_id:
        print(f"planted cluster switcher: {info.switch_id}")
    if info.drift_id:
        cos = ", ".join(f"{c:.3f}" for c in info.drift_base_cosines)
        print(f"planted drifting pair: {info.drift_id} -> {info.drift_anchor} (base cosines {cos})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="termex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="register a corpus's replicate files in a workspace")
    p.add_argument("embeddings", nargs="+", metavar="EMBEDDING_FILE")
    p.add_argument("--workspace", required=True)
    p.add_argument("--corpus", required=True, help="corpus id")
    p.add_argument("--label", required=True)
    p.add_argument("--order", type=int, required=True, help="diachronic/categorical order index")
    p.add_argument("--terminology", default=None, help="terminology TSV path")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("compute", help="run the analysis and write a snapshot")
    p.add_argument("--workspace", required=True)
    p.add_argument("--out", default=None, help="snapshot directory (default: <workspace>/snapshot)")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--n-neighbors", type=int, default=10)
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("serve", help="serve a snapshot over HTTP")
    p.add_argument("--snapshot", default=None, help="snapshot directory (env: TE_SNAPSHOT)")
    p.add_argument("--port", type=int, default=None, help="TCP port (env: TE_PORT, default 8000)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--cors", default=None, help="comma-separated CORS origin allow-list")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fixture", help="generate a synthetic multi-corpus fixture")
    p.add_argument("--out", required=True)
    p.add_argument("--corpora", type=int, default=3)
    p.add_argument("--clusters", type=int, default=2)
    p.add_argument("--per-cluster", type=int, default=50)
    p.add_argument("--dim", type=int, default=20)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--drift", default="switch,pair", help="'switch', 'pair', 'switch,pair', or 'none'")
    p.add_argument("--seed", type=int, default=13)
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 3
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
