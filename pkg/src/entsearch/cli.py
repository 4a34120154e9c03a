"""Single executable exposing the pipeline as subcommands.

    entsearch link    --input texts.tsv --gazetteer gaz.tsv --out ann.jsonl
    entsearch expand  --input texts.tsv --annotations ann.jsonl --strategy explicit --out expanded.tsv
    entsearch index   --input expanded.tsv --out idx/
    entsearch search  --index idx/ --queries queries.tsv --tag bm25 --out run.txt
    entsearch fuse    run1.txt run2.txt --out fused.txt
    entsearch oracle  run1.txt run2.txt --qrels qrels.txt --out oracle.txt
    entsearch eval    run.txt --qrels qrels.txt --cutoffs 10,100,1000 --out report.csv
    entsearch mine-hard report1.csv report2.csv ... --min-rankers 4 --out hard.txt
    entsearch plot    report1.csv report2.csv --out curves.svg

Every command is deterministic given identical inputs and configuration, and
commands that produce a run or annotation file record the configuration used
in a `.meta.json` sidecar.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import evaluation, fusion
from . import index as indexing
from . import linker as linking
from .analysis import Analyzer
from .config import PipelineConfig, load_default_config
from .corpus import load_collection, load_qrels, load_queries, write_collection
from .expansion import ExpansionStrategy, expand_collection
from .fusion import FusionConfig
from .index import BM25Params

log = logging.getLogger("entsearch")


def _write_meta(out_path: str, payload: dict) -> None:
    Path(str(out_path) + ".meta.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _parse_cutoffs(text: str) -> tuple[int, ...]:
    cutoffs = tuple(int(part) for part in text.split(",") if part.strip())
    if not cutoffs:
        raise ValueError(f"no cutoffs in {text!r}")
    return cutoffs


def cmd_link(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    wcfg = linking.WindowConfig(
        args.window if args.window is not None else cfg.window.window_tokens,
        args.overlap if args.overlap is not None else cfg.window.overlap_tokens,
    )
    lcfg = linking.LinkerConfig(
        threshold=args.threshold if args.threshold is not None else cfg.linker.threshold,
        num_cand_mentions=cfg.linker.num_cand_mentions,
        num_cand_entities=cfg.linker.num_cand_entities,
    )
    analyzer = Analyzer(cfg.analyzer)
    texts = [(p.id, p.text) for p in load_collection(args.input)]

    out: list[tuple[str, list[linking.EntityAnnotation]]] = []
    if args.gazetteer:
        gaz = linking.load_gazetteer(args.gazetteer, analyzer)
        link = linking.GazetteerLinker(gaz, analyzer)
        for text_id, text in texts:
            out.append((text_id, linking.link_spans(text, link, wcfg, lcfg, analyzer)))
    else:
        loaded = linking.load_annotations(args.annotations)
        for text_id, text in texts:
            anns = loaded.get(text_id, [])
            for ann in anns:
                if ann.char_end > len(text):
                    raise linking.LinkError(
                        f"annotation for {text_id!r} ends at {ann.char_end}, "
                        f"past text length {len(text)}"
                    )
            out.append((text_id, anns))
        unknown = set(loaded) - {text_id for text_id, _ in texts}
        if unknown:
            log.warning("%d annotation id(s) matched no input text", len(unknown))
    n = linking.write_annotations(out, args.out)
    _write_meta(args.out, {"window": wcfg.to_dict(), "linker": lcfg.to_dict(),
                           "analyzer": cfg.analyzer.to_dict()})
    log.info("wrote %d annotation records to %s", n, args.out)
    return 0


def cmd_expand(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    spec = args.strategy if args.strategy is not None else cfg.strategy
    if spec is None:
        raise ValueError("no expansion strategy given (flag --strategy or config)")
    strategy = ExpansionStrategy.parse(spec)
    annotations = linking.load_annotations(args.annotations)
    expanded = expand_collection(load_collection(args.input), annotations, strategy)
    n = write_collection(expanded, args.out)
    log.info("expanded %d passages with strategy %s to %s", n, strategy, args.out)
    return 0


def cmd_index(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    idx = indexing.build_index(load_collection(args.input), Analyzer(cfg.analyzer))
    indexing.save_index(idx, args.out)
    log.info("indexed %d passages (avgdl %.2f) into %s", idx.n_docs, idx.avgdl, args.out)
    return 0


def cmd_search(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    params = BM25Params(
        args.k1 if args.k1 is not None else cfg.bm25.k1,
        args.b if args.b is not None else cfg.bm25.b,
    )
    k = args.k if args.k is not None else cfg.k
    idx = indexing.load_index(args.index)
    queries = load_queries(args.queries)
    run = indexing.batch_search(idx, params, queries, k, args.tag)
    n = fusion.write_run(run, args.out)
    _write_meta(args.out, {"bm25": params.to_dict(), "k": k, "tag": args.tag,
                           "index": str(args.index)})
    log.info("searched %d queries, wrote %d result lines to %s", len(queries), n, args.out)
    return 0


def cmd_fuse(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    fcfg = FusionConfig(
        args.rrf_k if args.rrf_k is not None else cfg.fusion.rrf_k,
        args.depth if args.depth is not None else cfg.fusion.depth,
    )
    runs = [fusion.read_run(path) for path in args.runs]
    fused = fusion.rrf(runs, fcfg, tag=args.tag)
    n = fusion.write_run(fused, args.out)
    _write_meta(args.out, {"fusion": fcfg.to_dict(), "tag": args.tag,
                           "inputs": [str(p) for p in args.runs]})
    log.info("fused %d runs into %s (%d lines)", len(runs), args.out, n)
    return 0


def cmd_oracle(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    runs = [fusion.read_run(path) for path in args.runs]
    qrels = load_qrels(args.qrels)
    best = fusion.oracle(runs, qrels, tag=args.tag)
    n = fusion.write_run(best, args.out)
    _write_meta(args.out, {"tag": args.tag, "qrels": str(args.qrels),
                           "inputs": [str(p) for p in args.runs]})
    log.info("oracle over %d runs wrote %d lines to %s", len(runs), n, args.out)
    return 0


def cmd_eval(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    cutoffs = _parse_cutoffs(args.cutoffs) if args.cutoffs is not None else cfg.cutoffs
    run = fusion.read_run(args.run)
    qrels = load_qrels(args.qrels)
    report = evaluation.recall_curve(run, qrels, cutoffs)
    evaluation.write_report_csv(report, args.out)
    if args.summary:
        evaluation.write_summary_csv([(run.tag or Path(args.run).stem, report)], args.summary)
    for cutoff, mean in zip(report.cutoffs, report.means):
        print(f"recall@{cutoff}\t{run.tag}\t{mean:.4f}\t({len(report.per_query)} queries)")
    return 0


def cmd_mine_hard(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    spec = evaluation.HardSetSpec(args.worst_fraction, args.min_rankers)
    per_run = []
    for path in args.reports:
        report = evaluation.read_report_csv(path)
        if args.cutoff not in report.cutoffs:
            raise ValueError(f"{path} has no cutoff {args.cutoff} (has {report.cutoffs})")
        per_run.append((Path(path).stem, report.query_values(args.cutoff)))
    hard = evaluation.mine_hard_queries(per_run, spec)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for qid in sorted(hard):
            fh.write(qid + "\n")
    log.info("mined %d hard queries from %d runs into %s", len(hard), len(per_run), args.out)
    return 0


def cmd_plot(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    labels = args.labels.split(",") if args.labels else None
    if labels and len(labels) != len(args.reports):
        raise ValueError(f"{len(labels)} labels for {len(args.reports)} reports")
    series = []
    for i, path in enumerate(args.reports):
        report = evaluation.read_report_csv(path)
        label = labels[i] if labels else Path(path).stem
        series.append((label, report.cutoffs, report.means))
    out = Path(args.out)
    curve_csv = out if out.suffix == ".csv" else out.with_suffix(".csv")
    with open(curve_csv, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("tag,cutoff,mean\n")
        for label, cutoffs, means in series:
            for cutoff, mean in zip(cutoffs, means):
                fh.write(f"{label},{cutoff},{mean!r}\n")
    if out.suffix != ".csv":
        from .plotting import plot_recall_curves  # deferred: matplotlib is heavy

        plot_recall_curves(series, out, title=args.title)
        log.info("wrote figure %s and curve data %s", out, curve_csv)
    else:
        log.info("wrote curve data %s", curve_csv)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entsearch",
        description="Entity-expansion pipeline for sparse first-stage retrieval.",
    )
    parser.add_argument("--config", help="pipeline config JSON (default: $ENTSEARCH_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("link", help="annotate texts with linked entities")
    p.add_argument("--input", required=True, help="collection or queries TSV")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--gazetteer", help="gazetteer TSV: alias<TAB>entity<TAB>score")
    source.add_argument("--annotations", help="existing annotation JSONL to ingest")
    p.add_argument("--out", required=True, help="output annotation JSONL")
    p.add_argument("--window", type=int, help="window size in tokens")
    p.add_argument("--overlap", type=int, help="window overlap in tokens")
    p.add_argument("--threshold", type=float, help="minimum linker score")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("expand", help="append entity terms to texts")
    p.add_argument("--input", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--strategy", help="none|explicit|hashed|constant:<c>|weighted")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("index", help="build an inverted index")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="index directory")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="run BM25 queries against an index")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, help="retrieval depth (default 1000)")
    p.add_argument("--k1", type=float, help="BM25 k1 (default 0.82)")
    p.add_argument("--b", type=float, help="BM25 b (default 0.68)")
    p.add_argument("--tag", default="bm25")
    p.add_argument("--out", required=True, help="output TREC run file")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("fuse", help="reciprocal rank fusion of runs")
    p.add_argument("runs", nargs="+")
    p.add_argument("--rrf-k", type=int, dest="rrf_k")
    p.add_argument("--depth", type=int)
    p.add_argument("--tag", default="rrf")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("oracle", help="per-query best-of-runs upper bound")
    p.add_argument("runs", nargs="+")
    p.add_argument("--qrels", required=True)
    p.add_argument("--tag", default="oracle")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("eval", help="recall at cutoffs")
    p.add_argument("run")
    p.add_argument("--qrels", required=True)
    p.add_argument("--cutoffs", help="comma-separated, e.g. 10,100,1000")
    p.add_argument("--out", required=True, help="report CSV (metric,cutoff,qid,value)")
    p.add_argument("--summary", help="optional summary CSV (tag,cutoff,mean)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mine-hard", help="queries in the worst fraction of several runs")
    p.add_argument("reports", nargs="+", help="report CSVs from `entsearch eval`")
    p.add_argument("--cutoff", type=int, default=1000, help="cutoff to rank queries by")
    p.add_argument("--min-rankers", type=int, dest="min_rankers", default=4)
    p.add_argument("--worst-fraction", type=float, dest="worst_fraction", default=0.5)
    p.add_argument("--out", required=True, help="output file, one query id per line")
    p.set_defaults(func=cmd_mine_hard)

    p = sub.add_parser("plot", help="render recall curves from report CSVs")
    p.add_argument("reports", nargs="+")
    p.add_argument("--out", required=True, help="figure path (.svg/.png/.pdf) or .csv")
    p.add_argument("--labels", help="comma-separated curve labels (default: file stems)")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_default_config(args.config)
        return args.func(args, cfg)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
