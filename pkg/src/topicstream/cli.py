"""Command-line entry point.

Subcommands:
  run     stream a JSONL document file through the full pipeline
  export  dump a graph snapshot as node/edge CSV files

Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from .errors import ConfigError, TopicStreamError
from .pipeline import RunConfig, export_graph, run

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; bad usage is a config
    # error here, so surface it as one.
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="topicstream", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the streaming pipeline over a JSONL file")
    p_run.add_argument("--input", required=True, help="JSONL document stream")
    p_run.add_argument("--out", default="out", help="output directory for reports")
    p_run.add_argument("--embedder", choices=("hash", "file", "sidecar"), default="hash")
    p_run.add_argument("--dim", type=int, default=512, help="embedding dimension")
    p_run.add_argument("--alpha", type=float, default=0.5, help="embedding blend discount")
    p_run.add_argument("--rho-init", type=float, default=1000.0, help="initial memory stability")
    p_run.add_argument("--node-budget", type=int, default=100_000)
    p_run.add_argument("--prune-eps", type=float, default=0.01, help="forget threshold")
    p_run.add_argument("--window", type=int, default=600, help="extraction window, stream seconds")
    p_run.add_argument("--topk-topics", type=int, default=10)
    p_run.add_argument("--topk-words", type=int, default=10)
    p_run.add_argument("--assign-order", choices=("seen-first", "unseen-first"), default="seen-first")
    p_run.add_argument("--trend", choices=("growth", "off"), default="growth")
    p_run.add_argument("--stopwords", help="stopword list, one word per line")
    p_run.add_argument("--gazetteer", help="entity gazetteer TSV (phrase<TAB>TYPE)")
    p_run.add_argument("--snapshot", help="graph snapshot file to write (and resume from)")
    p_run.add_argument("--resume", action="store_true", help="resume from --snapshot")
    p_run.add_argument("--eval", dest="eval_path", help="ground-truth JSON for scoring")
    p_run.add_argument("--match-threshold", type=float, default=1.0)
    p_run.add_argument("--keep-non-english", action="store_true")
    p_run.add_argument("--vector-file", help="JSONL vectors for --embedder file")
    p_run.add_argument("--sidecar-cmd", help="command to spawn a stdio embedding sidecar")
    p_run.add_argument("--sidecar-host", default="127.0.0.1")
    p_run.add_argument("--sidecar-port", type=int, help="TCP port of a running sidecar")
    p_run.add_argument("--batch", type=int, default=64, help="embedding batch size")
    p_run.add_argument("--print-topics", action="store_true", help="print each window's topics")
    p_run.add_argument("--log-level", default="WARNING")

    p_export = sub.add_parser("export", help="export a snapshot as node/edge CSVs")
    p_export.add_argument("--snapshot", required=True)
    p_export.add_argument("--out", default="export")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        input=args.input,
        out_dir=args.out,
        embedder=args.embedder,
        dim=args.dim,
        alpha=args.alpha,
        rho_init=args.rho_init,
        node_budget=args.node_budget,
        prune_epsilon=args.prune_eps,
        window=args.window,
        topk_topics=args.topk_topics,
        topk_words=args.topk_words,
        assign_order=args.assign_order,
        trend=args.trend == "growth",
        stopwords=args.stopwords,
        gazetteer=args.gazetteer,
        snapshot=args.snapshot,
        resume=args.resume,
        eval_path=args.eval_path,
        match_threshold=args.match_threshold,
        keep_non_english=args.keep_non_english,
        vector_file=args.vector_file,
        sidecar_cmd=args.sidecar_cmd,
        sidecar_host=args.sidecar_host,
        sidecar_port=args.sidecar_port,
        batch_size=args.batch,
        print_topics=args.print_topics,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.WARNING))
            result = run(_config_from_args(args))
            print(
                f"processed {result.docs_consumed} documents "
                f"({result.docs_inserted} inserted, {result.docs_dropped} dropped); "
                f"{len(result.reports)} reports -> {result.report_path}"
            )
        elif args.command == "export":
            nodes_path, edges_path = export_graph(args.snapshot, args.out)
            print(f"wrote {nodes_path} and {edges_path}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TopicStreamError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
