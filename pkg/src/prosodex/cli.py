"""Command-line pipeline front end.

Commands: synth, stats, extract, classify, shuffle, graph.  Exit codes:
0 on success, 1 on a usage problem (bad flags, bad config), 2 on a data
problem (missing or malformed inputs, untrainable corpora).
"""

import argparse
import csv
import json
import os
import sys

from . import config as configuration
from .corpus import (POETRY, PROSE, STAT_COLUMNS, Corpus, corpus_stats,
                     generate_synthetic_corpus, load_corpus, save_corpus,
                     shuffle_document)
from .errors import ConfigError, ParseError, ProsodexError, TrainError
from .features import (FeatureVector, document_features, read_features,
                       write_features)
from .learning import Dataset, rank_features, sweep_nf, write_report
from .phonetics import load_fixture_lexicon, load_lexicon
from .simgraph import build_graph, export_graph, layout_fr
from .timeline import build_timeline, find_rhyme_signals, timeline_dump, tokenize
from .windowing import windows_dump


class _Parser(argparse.ArgumentParser):
    """Argument errors surface as ConfigError so main can exit with 1."""

    def error(self, message):
        raise ConfigError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="TOML config file (or set PROSODEX_CONFIG)")
    common.add_argument("--lexicon", metavar="PATH",
                        help="pronunciation lexicon (default: bundled)")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--jobs", type=int, metavar="N")
    common.add_argument("--out-dir", metavar="DIR", default=".",
                        help="where artifacts are written (default: .)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="prosodex",
                     description="Rhyme-timeline rhythm analysis pipeline")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", parents=[common],
                                help="generate a synthetic labeled corpus")
    synth.add_argument("--count", type=int, default=40, metavar="N",
                       help="documents per class (default: 40)")

    stats = commands.add_parser("stats", parents=[common],
                                help="per-document statistics and histograms")
    stats.add_argument("--corpus", metavar="DIR")

    extract = commands.add_parser("extract", parents=[common],
                                  help="feature matrix from a corpus")
    extract.add_argument("--corpus", metavar="DIR")
    extract.add_argument("--dump-timeline", action="store_true",
                         help="also write per-document timeline dumps")
    extract.add_argument("--dump-windows", action="store_true",
                         help="also write per-document window dumps")

    classify = commands.add_parser("classify", parents=[common],
                                   help="cross-validated evaluation report")
    classify.add_argument("--features", metavar="PATH", default=None,
                          help="feature CSV (default: <out-dir>/features.csv)")

    shuffle = commands.add_parser("shuffle", parents=[common],
                                  help="word-shuffled control corpus")
    shuffle.add_argument("--corpus", metavar="DIR")

    graph = commands.add_parser("graph", parents=[common],
                                help="document-similarity figure")
    graph.add_argument("--features", metavar="PATH", default=None)
    graph.add_argument("--tau", type=float, default=None,
                       help="edge threshold (default from config)")
    graph.add_argument("--top-k", default="all", metavar="K",
                       help="feature count by selection score, or 'all'")
    graph.add_argument("--out", metavar="PATH", default=None,
                       help="figure path; .svg, .json, or .dot")
    return parser


def _resolved_config(args) -> configuration.Config:
    path = configuration.resolve_config_path(args.config)
    config = configuration.load_config(path)
    return configuration.override(
        config, lexicon_path=args.lexicon, seed=args.seed, jobs=args.jobs,
        corpus_dir=getattr(args, "corpus", None),
        tau=getattr(args, "tau", None))


def _lexicon(config):
    if config.lexicon_path is None:
        return load_fixture_lexicon()
    if not os.path.exists(config.lexicon_path):
        raise ParseError(f"lexicon not found: {config.lexicon_path}")
    return load_lexicon(config.lexicon_path)


def _corpus(config) -> Corpus:
    if config.corpus_dir is None:
        raise ConfigError("no corpus directory; pass --corpus or set "
                          "corpus_dir in the config")
    if not os.path.isdir(config.corpus_dir):
        raise ParseError(f"corpus directory not found: {config.corpus_dir}")
    return load_corpus(config.corpus_dir)


def _features_path(args, config) -> str:
    path = args.features
    if path is None:
        path = os.path.join(args.out_dir, "features.csv")
    if not os.path.exists(path):
        raise ParseError(f"feature file not found: {path}")
    return path


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _out(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def cmd_synth(args, config) -> None:
    corpus = generate_synthetic_corpus(args.count, config.seed,
                                       _lexicon(config))
    os.makedirs(args.out_dir, exist_ok=True)
    save_corpus(corpus, args.out_dir)
    print(f"wrote {len(corpus)} documents to {args.out_dir}")


def cmd_stats(args, config) -> None:
    stats = corpus_stats(_corpus(config), _lexicon(config),
                         configuration.punctuation(config))
    csv_path = _out(args, "stats.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["doc_id", "label", *STAT_COLUMNS])
        for row in stats.rows:
            writer.writerow([
                row["doc_id"], row["label"],
                *("" if row[c] is None else repr(row[c])
                  for c in STAT_COLUMNS)])
    histograms = {
        name: {"edges": getattr(stats, f"{name}_hist").edges,
               "counts": getattr(stats, f"{name}_hist").counts}
        for name in ("phone_count", "char_count", "rhythm_punct_count",
                     "punct_gap", "distinct_rhymes",
                     "mean_rhyme_repetitions")}
    fits = {name: {"shape": shape, "scale": scale}
            for name, (shape, scale) in sorted(stats.weibull_fits.items())}
    json_path = _out(args, "stats.json")
    _write_json(json_path, {"histograms": histograms, "weibull": fits})
    print(f"wrote {csv_path} and {json_path}")


def cmd_extract(args, config) -> None:
    lexicon = _lexicon(config)
    durations = configuration.duration_table(config)
    punct = configuration.punctuation(config)
    grid = configuration.window_grid(config)
    vectors = []
    timelines = {}
    windows = {}
    for doc in _corpus(config):
        tokens = tokenize(doc.text)
        timeline = build_timeline(tokens, lexicon, durations)
        signals = find_rhyme_signals(tokens, timeline, lexicon, punct)
        vectors.append(document_features(signals, grid,
                                         doc_id=doc.id, label=doc.label))
        if args.dump_timeline:
            timelines[doc.id] = timeline_dump(tokens, timeline, signals)
        if args.dump_windows:
            windows[doc.id] = {
                f"{p.initial_pairs}_{p.cv_jump:.2f}": windows_dump(signals, p)
                for p in grid}
    path = _out(args, "features.csv")
    write_features(path, vectors, grid)
    written = [path]
    if args.dump_timeline:
        written.append(_out(args, "timelines.json"))
        _write_json(written[-1], timelines)
    if args.dump_windows:
        written.append(_out(args, "windows.json"))
        _write_json(written[-1], windows)
    print("wrote " + " and ".join(written))


def _dataset(args, config) -> Dataset:
    ids, labels, matrix, names = read_features(_features_path(args, config))
    return Dataset(matrix=matrix, labels=labels, feature_names=names,
                   doc_ids=ids)


def cmd_classify(args, config) -> None:
    dataset = _dataset(args, config)
    present = set(dataset.labels)
    for needed in (POETRY, PROSE):
        if needed not in present:
            raise TrainError(f"corpus has no {needed} documents; "
                             "both classes are required")
    report = sweep_nf(dataset, configuration.classifier_configs(config),
                      configuration.nf_values(config), bins=config.nmi_bins)
    csv_path = _out(args, "report.csv")
    json_path = _out(args, "report.json")
    write_report(report, csv_path, json_path)
    print(f"wrote {csv_path} and {json_path}")


def cmd_shuffle(args, config) -> None:
    corpus = _corpus(config)
    shuffled = Corpus([shuffle_document(doc, f"{config.seed}:{doc.id}")
                       for doc in corpus])
    os.makedirs(args.out_dir, exist_ok=True)
    save_corpus(shuffled, args.out_dir)
    print(f"wrote {len(shuffled)} shuffled documents to {args.out_dir}")


def _parse_top_k(raw: str):
    if raw == "all":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"--top-k must be an integer or 'all', "
                          f"got {raw!r}") from None
    if value < 1:
        raise ConfigError("--top-k must be at least 1")
    return value


def cmd_graph(args, config) -> None:
    ids, labels, matrix, names = read_features(_features_path(args, config))
    top_k = _parse_top_k(args.top_k)
    selected = None
    if top_k is not None:
        if top_k > len(names):
            raise ConfigError(f"--top-k {top_k} exceeds the "
                              f"{len(names)} available features")
        ranking = rank_features(Dataset(matrix=matrix, labels=labels,
                                        feature_names=names, doc_ids=ids),
                                bins=config.nmi_bins)
        selected = ranking.top(top_k)
    vectors = [FeatureVector(doc_id=ids[i], label=labels[i],
                             values=list(matrix[i]))
               for i in range(len(ids))]
    graph = build_graph(vectors, selected=selected, threshold=config.tau)
    layout = layout_fr(graph, seed=config.seed)
    out_path = args.out
    if out_path is None:
        out_path = _out(args, "graph.svg")
    format = os.path.splitext(out_path)[1].lstrip(".").lower()
    data = export_graph(graph, layout, format)
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    with open(out_path, "wb") as fh:
        fh.write(data)
    print(f"wrote {out_path}")


_HANDLERS = {"synth": cmd_synth, "stats": cmd_stats, "extract": cmd_extract,
             "classify": cmd_classify, "shuffle": cmd_shuffle,
             "graph": cmd_graph}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _HANDLERS[args.command](args, _resolved_config(args))
        return 0
    except SystemExit as exc:  # --help and --version exit through here
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ProsodexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
