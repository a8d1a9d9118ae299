"""Command-line entry point: ``dscompress <command> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import glob
import logging
import sys
from pathlib import Path

from . import __version__
from .channel import (ExpansionTable, dump_expansion, dump_stars, estimate_expansion,
                      extract_discourse_templates, extract_syntax_templates,
                      load_expansion, load_stars, load_syntax_pairs, propagate_stars)
from .chooser import DEFAULT_ALPHA, SelectionPolicy, format_table
from .decoder import DecodeOptions, candidate_line
from .errors import DataError, DSCompressError, ValidationError
from .evaluation import (SYSTEMS, SuiteConfig, compression_rate, format_ratio,
                         format_records, format_report, run_suite)
from .forest import (DEFAULT_MAX_SIZE, ForestOptions, build_forest, count_derivations,
                     dump_forest)
from .grammar import DEFAULT_FLOOR, Pcfg, dump_pcfg, estimate_pcfg, load_pcfg
from .lm import dump_bigram, load_bigram, train_bigram
from .pipeline import MODES, CompressConfig, ModelSet, compress_tree
from .tree import (discourse_rules, merge_to_sentences, parse_dstree, serialize_dstree,
                   syntax_rules, yield_words)

log = logging.getLogger("dscompress")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# helpers

def _expand(patterns):
    paths = []
    for pat in patterns:
        if any(ch in pat for ch in "*?["):
            matched = sorted(glob.glob(pat))
            if not matched:
                raise DataError(f"no files match {pat!r}")
            paths.extend(matched)
        else:
            paths.append(pat)
    if not paths:
        raise DataError("no input files")
    return paths


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _load_tree(path, merge=False):
    try:
        tree = parse_dstree(_read(path), doc_id=Path(path).stem, source=str(path))
        return merge_to_sentences(tree) if merge else tree
    except (ValidationError, DataError) as exc:
        raise DataError(f"{path}: {exc}") from None


def _trees(patterns, merge=False):
    return [_load_tree(path, merge) for path in _expand(patterns)]


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _weights(text):
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weights {text!r}") from None
    if len(vals) != 4 or any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("weights must be four non-negative numbers")
    return vals


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _load_models(args):
    if not args.bigram:
        raise UsageError("--bigram is required")
    bigram = load_bigram(_read(args.bigram), args.bigram)
    spcfg = load_pcfg(_read(args.spcfg), args.spcfg) if args.spcfg else Pcfg({})
    dpcfg = load_pcfg(_read(args.dpcfg), args.dpcfg) if args.dpcfg else Pcfg({})
    dtable = (load_expansion(_read(args.dtemplates), args.dtemplates) if args.dtemplates
              else ExpansionTable.empty("discourse"))
    stable = (load_expansion(_read(args.stemplates), args.stemplates) if args.stemplates
              else ExpansionTable.empty("syntax"))
    if dtable.layer != "discourse" or stable.layer != "syntax":
        raise DataError("--dtemplates must be a discourse table and --stemplates a syntax "
                        "table")
    return ModelSet(bigram, spcfg, dpcfg, dtable, stable)


def _config(args):
    if args.alpha <= 0 and not args.raw_argmax:
        raise UsageError("--alpha must be positive (use --raw-argmax for alpha=0)")
    policy = SelectionPolicy(0.0 if args.raw_argmax else args.alpha, args.raw_argmax)
    return CompressConfig(
        mode=args.mode,
        policy=policy,
        forest=ForestOptions(args.open_templates, args.forest_cap),
        decode=DecodeOptions(args.weights, args.per_sentence_bigram),
        target_length=getattr(args, "target_length", None),
    )


# ---------------------------------------------------------------------------
# commands

def cmd_train_bigram(args):
    trees = _trees(args.corpus, args.merge_sentences)
    model = train_bigram([yield_words(t) for t in trees], args.k, args.unk_min_count)
    _write(dump_bigram(model), args.output)


def cmd_train_pcfg(args):
    trees = _trees(args.trees, args.merge_sentences)
    _write(dump_pcfg(estimate_pcfg([syntax_rules(t) for t in trees], args.floor)),
           args.output)


def cmd_train_dpcfg(args):
    trees = _trees(args.trees, args.merge_sentences)
    _write(dump_pcfg(estimate_pcfg([discourse_rules(t) for t in trees], args.floor)),
           args.output)


def cmd_train_channel(args):
    pairs = []
    if args.layer == "discourse":
        if not args.trees or not args.stars:
            raise UsageError("--layer discourse needs --trees and --stars")
        stars = {}
        for path in _expand(args.stars):
            for doc, idx in load_stars(_read(path), path).items():
                stars.setdefault(doc, set()).update(idx)
        for tree in _trees(args.trees, args.merge_sentences):
            if tree.doc_id not in stars:
                log.warning("no STAR line for %s; skipped", tree.doc_id)
                continue
            pairs.extend(extract_discourse_templates(
                tree, propagate_stars(tree, stars[tree.doc_id])))
    else:
        if not args.pairs:
            raise UsageError("--layer syntax needs --pairs")
        for path in _expand(args.pairs):
            for long, short in load_syntax_pairs(_read(path), path):
                pairs.extend(extract_syntax_templates(long, short))
    table = estimate_expansion(pairs, args.layer, args.identity_count, args.floor)
    _write(dump_expansion(table), args.output)


def _print_section(sec, policy, out):
    for cand in sec.table.candidates():
        out.append(candidate_line(cand))
    out.extend(format_table(sec.rows, sec.chosen_length, policy))


def cmd_compress(args):
    config = _config(args)
    models = _load_models(args)
    tree = _load_tree(args.doc)
    result = compress_tree(tree, models, config)
    out = [f"# doc {tree.doc_id} mode {config.mode} tokens {len(result.original)}"]
    for sec in result.sections:
        if config.mode == "concat":
            out.append(f"# {sec.label}")
        if config.target_length is not None:
            out.append(candidate_line(sec.chosen))
        else:
            _print_section(sec, config.policy, out)
    words = result.words
    out.append(f"CHOSEN\t{len(words)}\t{' '.join(words)}")
    out.append(f"Cmp\t{format_ratio(compression_rate(result.original, words))}")
    sys.stdout.write("\n".join(out) + "\n")
    if args.plot:
        from .plotting import plot_length_table
        if config.mode == "concat" or config.target_length is not None:
            log.warning("--plot applies to edu/sent mode without --target-length; skipped")
        else:
            sec = result.sections[0]
            plot_length_table(sec.rows, sec.chosen_length, config.policy, args.plot,
                              title=tree.doc_id)


def cmd_evaluate(args):
    systems = tuple(s.strip().lower() for s in args.systems.split(",") if s.strip())
    bad = [s for s in systems if s not in SYSTEMS]
    if bad or not systems:
        raise UsageError(f"unknown system(s) {', '.join(bad) or '(none)'}; choose from "
                         f"{', '.join(SYSTEMS)}")
    config = _config(args)
    models = _load_models(args) if set(systems) - {"random"} else None
    trees = _trees(args.corpus)
    suite = SuiteConfig(systems, args.p, args.seed, config, args.jobs)
    records, summaries = run_suite(trees, models, suite)
    if args.records:
        _write(format_records(records), args.records)
    sys.stdout.write(format_report(summaries))
    if args.plot:
        from .plotting import plot_cmp_summary
        plot_cmp_summary(summaries, args.plot)


def cmd_dump_forest(args):
    config = _config(args)
    models = _load_models(args)
    tree = _load_tree(args.doc)
    if config.mode == "sent":
        tree = merge_to_sentences(tree)
    elif config.mode == "concat":
        raise UsageError("dump-forest supports --mode edu or sent")
    forest = build_forest(tree, models.dtable, models.stable, models.dpcfg, models.spcfg,
                          config.forest)
    sys.stdout.write(dump_forest(forest))
    sys.stdout.write(f"DERIVATIONS {count_derivations(forest)}\n")


def cmd_make_fixtures(args):
    from importlib import resources
    from .synth import make_rng, random_deletion, random_dstree, with_sentence_table
    out = Path(args.directory)
    out.mkdir(parents=True, exist_ok=True)
    data = resources.files("dscompress") / "data"
    for name in ("figure1.ds", "stars.txt"):
        (out / name).write_text((data / name).read_text(encoding="utf-8"), encoding="utf-8")
    rng = make_rng(args.seed)
    stars = {}
    pair_lines = []
    for i in range(args.count):
        doc_id = f"random{i:03d}"
        tree = with_sentence_table(rng, random_dstree(rng, args.max_words, doc_id=doc_id))
        (out / f"{doc_id}.ds").write_text(serialize_dstree(tree, indent=True),
                                         encoding="utf-8")
        n_leaves = len(tree.leaves())
        stars[doc_id] = {j for j in range(n_leaves) if rng.random() < 0.5} or {0}
        for leaf in tree.leaves():
            short = random_deletion(rng, leaf.edu)
            pair_lines.append(f"{leaf.edu}\t{short}")
    (out / "random_stars.txt").write_text(dump_stars(stars), encoding="utf-8")
    (out / "random_pairs.txt").write_text("\n".join(pair_lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# argument parsing

def _model_args(p):
    p.add_argument("--bigram", help="bigram model file (required unless only the "
                   "random system runs)")
    p.add_argument("--spcfg", help="syntax PCFG file (default: empty, all rules at floor)")
    p.add_argument("--dpcfg", help="discourse PCFG file (default: empty)")
    p.add_argument("--dtemplates", help="discourse template file (default: identity only)")
    p.add_argument("--stemplates", help="syntax template file (default: identity only)")
    p.add_argument("--mode", choices=MODES, default="edu")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                   help="length exponent of the chooser (default %(default)s)")
    p.add_argument("--raw-argmax", action="store_true",
                   help="choose by raw log-probability (alpha = 0)")
    p.add_argument("--weights", type=_weights, default=(1.0, 1.0, 1.0, 1.0),
                   help="bigram,spcfg,dpcfg,expansion weights (default 1,1,1,1)")
    p.add_argument("--open-templates", action="store_true",
                   help="license unseen deletions at the template floor")
    p.add_argument("--forest-cap", type=_positive_int, default=DEFAULT_MAX_SIZE)
    p.add_argument("--per-sentence-bigram", action="store_true",
                   help="score each sentence as its own BOS...EOS chain")


def build_parser():
    parser = _Parser(prog="dscompress", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train-bigram", help="train the add-k bigram model")
    p.add_argument("--corpus", nargs="+", required=True, help="DS-tree files or globs")
    p.add_argument("--k", type=float, default=0.1)
    p.add_argument("--unk-min-count", type=_positive_int, default=None)
    p.add_argument("--merge-sentences", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_train_bigram)

    for name, func, what in (("train-pcfg", cmd_train_pcfg, "syntax"),
                             ("train-dpcfg", cmd_train_dpcfg, "discourse")):
        p = sub.add_parser(name, help=f"estimate the {what} PCFG")
        p.add_argument("--trees", nargs="+", required=True)
        p.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
        p.add_argument("--merge-sentences", action="store_true")
        p.add_argument("-o", "--output")
        p.set_defaults(func=func)

    p = sub.add_parser("train-channel", help="estimate expansion-template probabilities")
    p.add_argument("--layer", choices=("discourse", "syntax"), required=True)
    p.add_argument("--trees", nargs="+")
    p.add_argument("--stars", nargs="+", help="STAR annotation files")
    p.add_argument("--pairs", nargs="+", help="tab-separated long/short parse pairs")
    p.add_argument("--identity-count", type=int, default=1)
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    p.add_argument("--merge-sentences", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_train_channel)

    p = sub.add_parser("compress", help="compress one document")
    p.add_argument("doc")
    _model_args(p)
    p.add_argument("--target-length", type=_positive_int)
    p.add_argument("--plot", help="write a length/score figure to this path")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("evaluate", help="run the comparison systems over a corpus")
    p.add_argument("--corpus", nargs="+", required=True)
    _model_args(p)
    p.add_argument("--systems", default="random,concat,edu,sent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5, help="random drop probability")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--records", help="also write per-document records here")
    p.add_argument("--plot", help="write a Cmp bar chart to this path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("dump-forest", help="print the packed forest of a document")
    p.add_argument("doc")
    _model_args(p)
    p.set_defaults(func=cmd_dump_forest)

    p = sub.add_parser("make-fixtures", help="write the Figure-1 document and random data")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--max-words", type=int, default=12)
    p.set_defaults(func=cmd_make_fixtures)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dscompress: error: {exc}", file=sys.stderr)
        return 1
    except DSCompressError as exc:
        print(f"dscompress: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"dscompress: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
