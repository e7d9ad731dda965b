"""Command-line interface; one subcommand per pipeline stage.

Exit codes: 0 success, 1 internal/runtime error, 2 user or input error.
All text output is UTF-8 with LF endings.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from sentmt import __version__, demo
from sentmt import bleu as bleu_mod
from sentmt import dialect as dialect_mod
from sentmt import lexicon as lexicon_mod
from sentmt import report as report_mod
from sentmt import silver as silver_mod
from sentmt import sam as sam_mod
from sentmt import textproc
from sentmt.errors import BackendUnreachableError, InputError, SentmtError

logger = logging.getLogger("sentmt")

TOKENIZER_NAME = "sentmt-edge-punct-1"

_CONFIG_KEYS = {"lexicon", "lexicon_format", "phrases", "threads", "seed", "verbosity", "backend"}
_BACKEND_CONFIG_KEYS = {"endpoint", "auth_env", "batch_size", "max_retries", "timeout"}


def _load_config(path):
    try:
        with open(path, encoding="utf-8-sig") as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: bad config JSON: {exc}") from None
    if not isinstance(config, dict):
        raise InputError(f"{path}: config must be a JSON object")
    unknown = set(config) - _CONFIG_KEYS
    if unknown:
        raise InputError(f"{path}: unknown config keys: {sorted(unknown)}")
    backend = config.get("backend", {})
    if not isinstance(backend, dict):
        raise InputError(f"{path}: backend section must be an object")
    unknown = set(backend) - _BACKEND_CONFIG_KEYS
    if unknown:
        raise InputError(f"{path}: unknown backend config keys: {sorted(unknown)}")
    return config


def _resolve(args, attr, config_key=None, default=None):
    """Flag value if given, else config value, else default."""
    value = getattr(args, attr, None)
    if value is not None:
        return value
    config = getattr(args, "_config", {})
    if config_key:
        section, _, key = config_key.partition(".")
        if key:
            value = config.get(section, {}).get(key)
        else:
            value = config.get(section)
    if value is not None:
        return value
    return default


def _json_out(payload, path=None):
    text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_lexicon(args):
    path = _resolve(args, "lexicon", "lexicon")
    if not path:
        raise InputError("a prior-polarity lexicon is required (--lexicon)")
    fmt = _resolve(args, "lexicon_format", "lexicon_format", lexicon_mod.FORMAT_HASH)
    lex = lexicon_mod.load_prior_polarity(path, format=fmt)
    logger.info("loaded %d lexicon entries from %s", len(lex), path)
    return lex


def _annotated_side(plain_path, conllu_path, lex, what):
    if conllu_path:
        return textproc.ingest_conllu(conllu_path), report_mod.TIER_CONLLU
    if not plain_path:
        raise InputError(f"{what}: provide a plain text file or a CoNLL-U file")
    lines = textproc.read_lines(plain_path)
    return [textproc.annotate(line, textproc.LANG_EN, lex) for line in lines], report_mod.TIER_FALLBACK


def cmd_sam(args):
    lex = _load_lexicon(args)
    hyps, hyp_tier = _annotated_side(args.hyp, args.conllu_hyp, lex, "hypothesis")
    refs, ref_tier = _annotated_side(args.ref, args.conllu_ref, lex, "reference")
    tier = hyp_tier if hyp_tier == ref_tier else report_mod.TIER_MIXED
    pairs = sam_mod.align_pairs(hyps, refs)
    results, summary = sam_mod.corpus_sam(pairs, lex)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "sentences.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for index, r in enumerate(results, start=1):
            fh.write(f"{index}\t{r.sam!r}\t{r.s_h!r}\t{r.s_r!r}\t{r.m}\t{r.n}\n")
    _json_out(
        {
            "total_sam": summary.total_sam,
            "mean_sam_all": summary.mean_sam_all,
            "mean_sam_defined": summary.mean_sam_defined,
            "n_pairs": summary.n_pairs,
            "n_defined": summary.n_defined,
            "annotation_tier": tier,
        },
        out_dir / "summary.json",
    )
    logger.info("scored %d pairs into %s", summary.n_pairs, out_dir)
    return 0


def cmd_bleu(args):
    hyp_lines = textproc.read_lines(args.hyp)
    ref_lines = textproc.read_lines(args.ref)
    if len(hyp_lines) != len(ref_lines):
        raise InputError(
            f"hypothesis has {len(hyp_lines)} lines but reference has {len(ref_lines)}"
        )
    hyps = [[s for s, _, _ in textproc.tokenize(line)] for line in hyp_lines]
    refs = [[s for s, _, _ in textproc.tokenize(line)] for line in ref_lines]
    result = bleu_mod.corpus_bleu(hyps, refs, smoothing=args.smoothing)
    _json_out(
        {
            "score": result.score,
            "precisions": list(result.precisions),
            "bp": result.brevity_penalty,
            "lens": {"hyp": result.hyp_len, "ref": result.ref_len},
            "smoothing": result.smoothing,
            "tokenizer": TOKENIZER_NAME,
        }
    )
    return 0


def _train_config(args):
    return dialect_mod.TrainConfig(
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        l2=args.l2,
        seed=_resolve(args, "seed", "seed", 0),
    )


def cmd_dialect_train(args):
    data = dialect_mod.load_labeled_tsv(args.data)
    model = dialect_mod.train(
        data, split=(args.train_frac, args.dev_frac), config=_train_config(args)
    )
    dialect_mod.save_model(model, args.out)
    _json_out(model.training_meta)
    return 0


def cmd_dialect_predict(args):
    model = dialect_mod.load_model(args.model)
    if args.text is not None:
        lines = [args.text]
    elif args.infile:
        lines = textproc.read_lines(args.infile)
    else:
        raise InputError("provide --text or --in")
    for line in lines:
        label, p = dialect_mod.predict(model, line, threshold=args.threshold)
        sys.stdout.write(f"{label}\t{p!r}\t{line}\n")
    return 0


def cmd_dialect_extract(args):
    model = dialect_mod.load_model(args.model)
    corpus = textproc.read_lines(args.infile)
    da_subset, msa_subset, per_sentence = dialect_mod.extract_da(
        model, corpus, threshold=args.threshold
    )
    textproc.write_lines(da_subset, args.da_out)
    textproc.write_lines(msa_subset, args.msa_out)
    payload = {
        "n_sentences": len(corpus),
        "n_da": len(da_subset),
        "n_msa": len(msa_subset),
        "threshold": args.threshold,
    }
    if args.report:
        _json_out({**payload, "sentences": per_sentence}, args.report)
    _json_out(payload)
    return 0


def cmd_dialect_eval(args):
    model = dialect_mod.load_model(args.model)
    test = dialect_mod.load_labeled_tsv(args.test)
    _json_out(dialect_mod.evaluate(model, test, threshold=args.threshold))
    return 0


def _make_backend(args):
    kind = args.backend
    if kind == "mock":
        return silver_mod.MockBackend()
    if kind == "http":
        endpoint = _resolve(args, "endpoint", "backend.endpoint")
        if not endpoint:
            raise InputError("http backend requires --endpoint")
        return silver_mod.HttpBackend(
            endpoint,
            auth_env=_resolve(args, "auth_env", "backend.auth_env"),
            timeout=_resolve(args, "timeout", "backend.timeout", 30.0),
            max_retries=_resolve(args, "max_retries", "backend.max_retries", 3),
        )
    raise InputError(f"unknown backend: {kind!r}")


def _default_threads():
    return os.cpu_count() or 1


def cmd_silver_roundtrip(args):
    corpus = textproc.read_lines(args.infile)
    backend = _make_backend(args)
    batch_size = _resolve(args, "batch_size", "backend.batch_size", 32)
    threads = _resolve(args, "threads", "threads", _default_threads())
    try:
        triples = silver_mod.round_trip(
            corpus,
            backend,
            batch_size=batch_size,
            threads=threads,
            abort_after=args.abort_after,
        )
    except BackendUnreachableError as exc:
        silver_mod.export_triples(exc.completed, args.out)
        print(
            f"error: {exc}; persisted {len(exc.completed)} completed triples to {args.out}",
            file=sys.stderr,
        )
        return 1
    silver_mod.export_triples(triples, args.out)
    flagged = {
        i: list(t.review_reasons) for i, t in enumerate(triples, start=1) if t.needs_review
    }
    if args.flags_out:
        _json_out({"flagged": flagged}, args.flags_out)
    logger.info("wrote %d triples (%d flagged) to %s", len(triples), len(flagged), args.out)
    return 0


def cmd_silver_infuse(args):
    phrases = lexicon_mod.load_phrase_lexicon(_resolve(args, "phrases", "phrases"))
    triples = silver_mod.import_triples(args.infile)
    corrected, stats = silver_mod.infuse(triples, phrases)
    silver_mod.export_triples(corrected, args.out)
    payload = {
        "phrases_found": stats.phrases_found,
        "replacements_en": stats.replacements_en,
        "replacements_msa": stats.replacements_msa,
        "already_correct": stats.already_correct,
        "flagged": stats.flagged,
    }
    _json_out(payload, args.stats)
    if args.stats:
        _json_out(payload)
    return 0


def cmd_silver_export(args):
    triples = silver_mod.import_triples(args.infile)
    count = silver_mod.export_triples(triples, args.out, format=args.format)
    logger.info("exported %d triples to %s (%s)", count, args.out, args.format)
    return 0


def cmd_report_compare(args):
    systems = []
    for spec in args.system:
        name, sep, path = spec.partition("=")
        if not sep or not name or not path:
            raise InputError(f"--system expects NAME=HYP_PATH, got {spec!r}")
        systems.append((name, path))
    lex = _load_lexicon(args)
    result = report_mod.compare(
        args.ref,
        systems,
        lex,
        human_path=args.human,
        smoothing=args.smoothing,
        threads=_resolve(args, "threads", "threads", _default_threads()),
    )
    text = report_mod.render(result, "json")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_report_render(args):
    with open(args.infile, encoding="utf-8-sig") as fh:
        payload = json.load(fh)
    result = report_mod.report_from_dict(payload)
    text = report_mod.render(result, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_demo(args):
    written = demo.materialize(args.out)
    for path in written:
        print(path)
    return 0


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--seed", type=int, help="seed for anything randomized")
    common.add_argument("--threads", type=int, help="worker parallelism cap (default 1)")
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("-q", "--quiet", action="store_true")
    return common


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="sentmt",
        description="Sentiment-aware MT evaluation and data tooling",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("sam", parents=[common], help="sentiment-distance scoring")
    p.add_argument("--hyp", help="hypothesis plain text, one sentence per line")
    p.add_argument("--ref", help="reference plain text, one sentence per line")
    p.add_argument("--conllu-hyp", help="pre-annotated hypothesis (CoNLL-U)")
    p.add_argument("--conllu-ref", help="pre-annotated reference (CoNLL-U)")
    p.add_argument("--lexicon", help="prior-polarity lexicon path")
    p.add_argument(
        "--lexicon-format", choices=lexicon_mod.LEXICON_FORMATS, dest="lexicon_format"
    )
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=cmd_sam)

    p = sub.add_parser("bleu", parents=[common], help="corpus BLEU")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument(
        "--smoothing",
        choices=bleu_mod.SMOOTHINGS,
        default=bleu_mod.SMOOTHING_ADD_ONE_EXP,
    )
    p.set_defaults(handler=cmd_bleu)

    dialect = sub.add_parser("dialect", help="DA/MSA classification")
    dsub = dialect.add_subparsers(dest="subcommand")

    p = dsub.add_parser("train", parents=[common])
    p.add_argument("--data", required=True, help="label<TAB>text training TSV")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--epochs", type=int, default=25)
    p.add_argument("--learning-rate", type=float, default=1.0, dest="learning_rate")
    p.add_argument("--l2", type=float, default=1e-6)
    p.add_argument("--train-frac", type=float, default=0.8, dest="train_frac")
    p.add_argument("--dev-frac", type=float, default=0.1, dest="dev_frac")
    p.set_defaults(handler=cmd_dialect_train)

    p = dsub.add_parser("predict", parents=[common])
    p.add_argument("--model", required=True)
    p.add_argument("--text")
    p.add_argument("--in", dest="infile")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(handler=cmd_dialect_predict)

    p = dsub.add_parser("extract", parents=[common])
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--da-out", dest="da_out", required=True)
    p.add_argument("--msa-out", dest="msa_out", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--report", help="write per-sentence probabilities JSON here")
    p.set_defaults(handler=cmd_dialect_extract)

    p = dsub.add_parser("eval", parents=[common])
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True, help="label<TAB>text TSV")
    p.add_argument("--threshold", type=float, default=0.5)
    p.set_defaults(handler=cmd_dialect_eval)

    silver = sub.add_parser("silver", help="round-trip silver data pipeline")
    ssub = silver.add_subparsers(dest="subcommand")

    p = ssub.add_parser("roundtrip", parents=[common])
    p.add_argument("--in", dest="infile", required=True, help="DA corpus, one per line")
    p.add_argument("--out", required=True, help="tsv3 triples output")
    p.add_argument("--backend", choices=("mock", "http"), default="mock")
    p.add_argument("--endpoint")
    p.add_argument("--auth-env", dest="auth_env")
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--max-retries", type=int, dest="max_retries")
    p.add_argument("--timeout", type=float)
    p.add_argument("--abort-after", type=int, default=3, dest="abort_after")
    p.add_argument("--flags-out", dest="flags_out", help="JSON sidecar of flagged lines")
    p.set_defaults(handler=cmd_silver_roundtrip)

    p = ssub.add_parser("infuse", parents=[common])
    p.add_argument("--in", dest="infile", required=True, help="tsv3 triples")
    p.add_argument("--phrases", help="phrase lexicon TSV")
    p.add_argument("--out", required=True)
    p.add_argument("--stats", help="write infusion stats JSON here (also printed)")
    p.set_defaults(handler=cmd_silver_infuse)

    p = ssub.add_parser("export", parents=[common])
    p.add_argument("--in", dest="infile", required=True, help="tsv3 triples")
    p.add_argument("--format", choices=silver_mod.EXPORT_FORMATS, required=True)
    p.add_argument("--out", required=True, help="path (tsv3) or prefix (paired-files)")
    p.set_defaults(handler=cmd_silver_export)

    rep = sub.add_parser("report", help="multi-system comparison")
    rsub = rep.add_subparsers(dest="subcommand")

    p = rsub.add_parser("compare", parents=[common])
    p.add_argument("--ref", required=True)
    p.add_argument(
        "--system",
        action="append",
        required=True,
        metavar="NAME=HYP",
        help="repeatable: system name and hypothesis file",
    )
    p.add_argument("--lexicon")
    p.add_argument(
        "--lexicon-format", choices=lexicon_mod.LEXICON_FORMATS, dest="lexicon_format"
    )
    p.add_argument("--human", help="system<TAB>annotator<TAB>mean TSV")
    p.add_argument(
        "--smoothing",
        choices=bleu_mod.SMOOTHINGS,
        default=bleu_mod.SMOOTHING_ADD_ONE_EXP,
    )
    p.add_argument("--out", help="report JSON path (default stdout)")
    p.set_defaults(handler=cmd_report_compare)

    p = rsub.add_parser("render", parents=[common])
    p.add_argument("--in", dest="infile", required=True, help="report JSON")
    p.add_argument("--format", choices=report_mod.RENDER_FORMATS, default="markdown-table")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_report_render)

    p = sub.add_parser("demo", parents=[common], help="materialize bundled demo data")
    p.add_argument("--out", required=True, help="directory to copy demo files into")
    p.set_defaults(handler=cmd_demo)

    return parser


def _setup_logging(args):
    verbose = getattr(args, "verbose", 0) or getattr(args, "_config", {}).get("verbosity", 0)
    quiet = getattr(args, "quiet", False)
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_help(sys.stderr)
        return 2
    try:
        args._config = _load_config(args.config) if getattr(args, "config", None) else {}
        _setup_logging(args)
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        # missing/unreadable/unwritable paths are user input problems
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SentmtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
