"""Command line entry point: ``svgviz <subcommand> ...``.

Machine-readable results go to stdout and everything else to stderr. Exit
status is 0 on success, 1 for bad input and 2 for internal errors. Output
files are written atomically, so a failed command leaves none behind.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from svgviz import chartgen
from svgviz.collections_data import COLLECTIONS
from svgviz.corpus import DEFAULT_USER_AGENT, CorpusStore, CrawlPolicy, crawl, ingest
from svgviz.evaluation import cross_validate, usage_stats
from svgviz.features import extract_features, read_matrix, write_matrix
from svgviz.io import atomic_write
from svgviz.tree import LabeledSample, TrainParams, decode_model, encode_model, fit_matrix, predict

log = logging.getLogger("svgviz")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _corpus_rows(corpus_dir: str, jobs: int, labeled_only: bool):
    root = Path(corpus_dir)
    if not (root / "manifest.jsonl").is_file():
        raise InputError(f"{corpus_dir}: not a corpus directory (no manifest.jsonl)")
    store = CorpusStore(root)
    entries = [e for e in store.entries() if e.excluded is None and (e.label or not labeled_only)]

    def work(entry):
        return entry.id, entry.label or "", extract_features(store.svg_text(entry))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(work, entries))
    return [work(e) for e in entries]


def cmd_crawl(args) -> int:
    seeds_path = Path(args.seeds)
    if not seeds_path.is_file():
        raise InputError(f"{args.seeds}: no such file")
    seeds = [s.strip() for s in seeds_path.read_text().splitlines() if s.strip() and not s.startswith("#")]
    if not seeds:
        raise InputError(f"{args.seeds}: no seed URLs")
    policy = CrawlPolicy(
        max_pages=args.max_pages,
        max_depth=args.max_depth,
        per_host_delay=args.delay,
        same_host_only=not args.all_hosts,
        user_agent=args.user_agent,
        obey_robots=not args.ignore_robots,
        timeout=args.timeout,
    )
    entries = crawl(seeds, policy, CorpusStore(Path(args.out)), jobs=args.jobs)
    for e in entries:
        print(f"{e.id}\t{e.excluded or ''}\t{e.source_url}")
    log.info("%d SVG entries", len(entries))
    return 0


def cmd_ingest(args) -> int:
    if not Path(args.dir).is_dir():
        raise InputError(f"{args.dir}: not a directory")
    if args.labels and not Path(args.labels).is_file():
        raise InputError(f"{args.labels}: no such file")
    entries = ingest(args.dir, args.labels, CorpusStore(Path(args.out)))
    for e in entries:
        print(f"{e.id}\t{e.label or ''}\t{e.excluded or ''}")
    log.info("ingested %d files", len(entries))
    return 0


def cmd_features(args) -> int:
    rows = _corpus_rows(args.corpus_dir, args.jobs, labeled_only=False)
    write_matrix(rows, args.out)
    log.info("wrote %d rows to %s", len(rows), args.out)
    return 0


def cmd_train(args) -> int:
    if not Path(args.matrix).is_file():
        raise InputError(f"{args.matrix}: no such file")
    ids, labels, X, version = read_matrix(args.matrix)
    keep = [i for i, label in enumerate(labels) if label]
    if not keep:
        raise InputError(f"{args.matrix}: no labeled rows")
    params = TrainParams(args.max_depth, args.min_samples_split, args.min_samples_leaf)
    model = fit_matrix(X[keep], [labels[i] for i in keep], params, version)
    atomic_write(args.out, encode_model(model))
    log.info("trained on %d rows: %d nodes, depth %d", len(keep), len(model.nodes), model.depth())
    return 0


def cmd_predict(args) -> int:
    if not Path(args.model).is_file():
        raise InputError(f"{args.model}: no such file")
    model = decode_model(Path(args.model).read_bytes())
    status = 0
    for name in args.files:
        try:
            vector = extract_features(Path(name).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            log.error("%s: %s", name, exc)
            status = 1
            continue
        label, confidence = predict(model, vector)
        print(f"{label}\t{confidence:.3f}\t{name}")
    return status


def cmd_crossval(args) -> int:
    source = Path(args.corpus)
    if source.is_file():
        _, labels, X, _ = read_matrix(source)
        data = [LabeledSample(row, label) for row, label in zip(X, labels) if label]
    else:
        data = [LabeledSample(v, label) for _, label, v in _corpus_rows(args.corpus, args.jobs, labeled_only=True)]
    if not data:
        raise InputError(f"{args.corpus}: no labeled samples")
    report = cross_validate(data, k=args.folds, runs=args.runs, seed=args.seed, jobs=args.jobs)
    text = report.to_json()
    if args.out:
        atomic_write(args.out, text)
    sys.stdout.write(text)
    sys.stderr.write(report.table())
    return 0


def cmd_stats(args) -> int:
    if args.collection:
        if args.collection not in COLLECTIONS:
            raise InputError(f"unknown collection {args.collection!r}; known: {', '.join(COLLECTIONS)}")
        size, counts = COLLECTIONS[args.collection]
        report = usage_stats(counts, total=size)
    else:
        if args.corpus_dir is None:
            raise InputError("give a corpus directory or --collection")
        root = Path(args.corpus_dir)
        if not (root / "manifest.jsonl").is_file():
            raise InputError(f"{args.corpus_dir}: not a corpus directory (no manifest.jsonl)")
        counts = Counter(e.label for e in CorpusStore(root).entries() if e.label and e.excluded is None)
        if not counts:
            raise InputError(f"{args.corpus_dir}: no labeled entries")
        report = usage_stats(counts)
    sys.stdout.write(report.table())
    return 0


def cmd_generate(args) -> int:
    types = chartgen.CHART_TYPES if args.type == "all" else (args.type,)
    if args.type != "all" and args.type not in chartgen.CHART_TYPES:
        raise InputError(f"unknown chart type {args.type!r}")
    samples = chartgen.generate_corpus(types, args.count, args.seed, nonchart_count=args.nonchart)
    labels = chartgen.write_corpus(args.out, samples)
    print(labels)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="svgviz", description="Extract and classify SVG visualizations.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("crawl", help="crawl pages and store their inline SVGs")
    p.add_argument("--seeds", required=True, help="file with one seed URL per line")
    p.add_argument("--out", required=True, help="corpus directory")
    p.add_argument("--max-pages", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=1)
    p.add_argument("--delay", type=float, default=1.0, help="seconds between requests to one host")
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--user-agent", default=DEFAULT_USER_AGENT)
    p.add_argument("--all-hosts", action="store_true", help="follow links to other hosts")
    p.add_argument("--ignore-robots", action="store_true")
    p.add_argument("--jobs", type=int, default=4)
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("ingest", help="add a directory of SVG files to a corpus")
    p.add_argument("dir")
    p.add_argument("--labels", help="filename<TAB>label file")
    p.add_argument("--out", required=True, help="corpus directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("features", help="write the feature matrix of a corpus")
    p.add_argument("corpus_dir")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train a decision tree on a feature matrix")
    p.add_argument("matrix")
    p.add_argument("--out", required=True)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-samples-split", type=int, default=2)
    p.add_argument("--min-samples-leaf", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; training is deterministic")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify SVG files")
    p.add_argument("model")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("crossval", help="repeated stratified k-fold cross-validation")
    p.add_argument("corpus", help="corpus directory or feature matrix file")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("stats", help="visualization type usage table")
    p.add_argument("corpus_dir", nargs="?")
    p.add_argument("--collection", help="use a published collection's counts instead")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("generate", help="write a synthetic labeled chart corpus")
    p.add_argument("--type", default="all", help=f"one of {', '.join(chartgen.CHART_TYPES)} or 'all'")
    p.add_argument("--count", type=int, default=100, help="charts per type")
    p.add_argument("--nonchart", type=int, default=0, help="also write this many icon-like non-charts")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (InputError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1
    except Exception:
        log.exception("internal error")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
