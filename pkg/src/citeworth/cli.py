"""Command-line entry point: ``citeworth {build,split,stats,train,predict,eval}``.

Precedence is defaults < ``--config`` JSON file < command-line flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import pipeline
from .evaluation import LengthMismatch, evaluate
from .ingest import MalformedRecord, SourceUnreadable, read_jsonl
from .labeler import TargetTooLarge
from .model import DEFAULT_C, SentenceClassifier, train_sentence_classifier

log = logging.getLogger("citeworth")

# Exit codes by error category.
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_DATA = 4
EXIT_INTERNAL = 5


class CliError(Exception):
    def __init__(self, category: str, message: str, code: int) -> None:
        super().__init__(message)
        self.category = category
        self.code = code


def _add_pipeline_flags(p: argparse.ArgumentParser, with_input: bool = True) -> None:
    p.add_argument("--config", help="JSON file with PipelineConfig fields")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--version", choices=sorted(pipeline.VERSION_SIZES))
    if with_input:
        p.add_argument("--input", help="JSONL file, per-case JSON file, or directory of either")
        p.add_argument("--jurisdiction", action="append", dest="jurisdictions", metavar="SLUG")
        p.add_argument("--max-docs", type=int)
        p.add_argument("--abbrev-table", help="two-column abbreviation table")
        p.add_argument("--reporters", help="reporter lexicon, one abbreviation per line")
        p.add_argument("--schema", help="JSON file describing input field paths")
        p.add_argument("--threads", type=int, help=f"worker processes (default: ${pipeline.THREADS_ENV} or cpu count)")
        p.add_argument("--versus-token", action="append", dest="versus_tokens", metavar="TOKEN")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="citeworth", description="Citation-worthiness dataset construction and baselines.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="ingest, clean, segment, mask, label, split")
    _add_pipeline_flags(b)
    b.add_argument("--dump-sentences", metavar="PATH", help="write segmented sentences with offsets and exit ('-' for stdout)")

    s = sub.add_parser("split", help="resample a version from an existing build checkpoint")
    _add_pipeline_flags(s, with_input=False)

    st = sub.add_parser("stats", help="recompute stats.json for a dataset directory")
    st.add_argument("--data", required=True, help="directory with train/dev/test.jsonl")
    st.add_argument("--output", help="write here instead of stdout")

    t = sub.add_parser("train", help="fit TF-IDF + logistic regression")
    t.add_argument("--train", required=True, help="labeled JSONL")
    t.add_argument("--model", required=True, help="model output path")
    t.add_argument("--pu", action="store_true", help="positive-unlabeled reweighting")
    t.add_argument("--C", type=float, default=DEFAULT_C)
    t.add_argument("--threshold", type=float, default=0.5)
    t.add_argument("--seed", type=int, default=0)

    pr = sub.add_parser("predict", help="label sentences with a trained model")
    pr.add_argument("--model", required=True)
    pr.add_argument("--input", required=True, help="JSONL with a 'sentence' field")
    pr.add_argument("--output", required=True)

    e = sub.add_parser("eval", help="precision/recall/F1 report")
    e.add_argument("--pred", required=True)
    e.add_argument("--gold", required=True)
    e.add_argument("--report", required=True)
    return parser


def resolve_config(args: argparse.Namespace) -> pipeline.PipelineConfig:
    config = pipeline.PipelineConfig()
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError("config", f"cannot read config {args.config}: {exc}", EXIT_USAGE) from exc
        try:
            config = pipeline.PipelineConfig.from_mapping(data)
        except (TypeError, ValueError) as exc:
            raise CliError("config", str(exc), EXIT_USAGE) from exc
    overrides = {}
    for name in ("input", "out", "seed", "version", "max_docs", "abbrev_table", "reporters", "schema", "threads"):
        if getattr(args, name, None) is not None:
            overrides[name] = getattr(args, name)
    for name in ("jurisdictions", "versus_tokens"):
        if getattr(args, name, None):
            overrides[name] = tuple(getattr(args, name))
    return config.merged(**overrides)


def _read_labeled(path: str) -> list[dict]:
    try:
        return list(read_jsonl(path))
    except OSError as exc:
        raise CliError("input", f"cannot read {path}: {exc}", EXIT_INPUT) from exc
    except json.JSONDecodeError as exc:
        raise CliError("input", f"{path}: invalid JSON ({exc})", EXIT_DATA) from exc


def _key(rec: dict, i: int):
    if "file_name" in rec and "sentence_number" in rec:
        return (rec["file_name"], rec["sentence_number"])
    return i


def cmd_build(args) -> None:
    config = resolve_config(args)
    if not config.input:
        raise CliError("usage", "build needs --input", EXIT_USAGE)
    if args.dump_sentences:
        sink = sys.stdout if args.dump_sentences == "-" else open(args.dump_sentences, "w", encoding="utf-8")
        try:
            n = pipeline.dump_sentences(config, sink)
        finally:
            if sink is not sys.stdout:
                sink.close()
        log.info("dumped %d sentences", n)
        return
    if not config.out:
        raise CliError("usage", "build needs --out", EXIT_USAGE)
    result = pipeline.build(config)
    c = result["counters"]
    log.info(
        "%d documents, %d records, %d skipped in ingest, %d empty after cleaning, %d duplicates",
        c["documents"], c["records"], c["ingest"]["skipped"], c["empty_after_cleaning"], c["duplicates"],
    )


def cmd_split(args) -> None:
    config = resolve_config(args)
    if not config.out:
        raise CliError("usage", "split needs --out pointing at a build directory", EXIT_USAGE)
    if not (Path(config.out) / pipeline.INDEX_FILE).exists():
        raise CliError("input", f"{config.out} has no build checkpoint; run build first", EXIT_INPUT)
    stats = pipeline.split_dataset(config.out, config)
    log.info("%d records in %d files", stats["total_sentences"], stats["total_files"])


def cmd_stats(args) -> None:
    stats = pipeline.stats_for_directory(args.data)
    text = json.dumps(stats, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_train(args) -> None:
    rows = _read_labeled(args.train)
    try:
        sentences = [r["sentence"] for r in rows]
        labels = [int(r["label"]) for r in rows]
    except KeyError as exc:
        raise CliError("input", f"{args.train}: record without {exc}", EXIT_DATA) from exc
    model = train_sentence_classifier(sentences, labels, C=args.C, use_pu=args.pu, threshold=args.threshold, seed=args.seed)
    model.save(args.model)
    log.info("trained on %d sentences (%d features)", len(rows), len(model.tfidf.vocabulary))


def cmd_predict(args) -> None:
    try:
        model = SentenceClassifier.load(args.model)
    except OSError as exc:
        raise CliError("input", f"cannot read model {args.model}: {exc}", EXIT_INPUT) from exc
    rows = _read_labeled(args.input)
    try:
        probs = model.predict_proba([r["sentence"] for r in rows])
    except KeyError as exc:
        raise CliError("input", f"{args.input}: record without 'sentence'", EXIT_DATA) from exc
    with open(args.output, "w", encoding="utf-8") as fh:
        for r, p in zip(rows, probs):
            out = {k: r[k] for k in ("file_name", "sentence_number", "sentence") if k in r}
            out["label"] = int(p >= model.threshold)
            out["score"] = round(float(p), 6)
            fh.write(json.dumps(out, ensure_ascii=False) + "\n")


def cmd_eval(args) -> None:
    pred_rows = _read_labeled(args.pred)
    gold_rows = _read_labeled(args.gold)
    if len(pred_rows) != len(gold_rows):
        raise CliError("data", f"{len(pred_rows)} predictions for {len(gold_rows)} gold records", EXIT_DATA)
    pred = {_key(r, i): int(r["label"]) for i, r in enumerate(pred_rows)}
    gold_keys = [_key(r, i) for i, r in enumerate(gold_rows)]
    missing = [k for k in gold_keys if k not in pred]
    if missing:
        raise CliError("data", f"no prediction for gold record {missing[0]!r}", EXIT_DATA)
    rep = evaluate([pred[k] for k in gold_keys], [int(r["label"]) for r in gold_rows])
    Path(args.report).write_text(json.dumps(rep.to_json(6), indent=2) + "\n", encoding="utf-8")
    log.info("macro F1 %.6f, micro F1 %.6f", rep.macro_f1, rep.micro_f1)


COMMANDS = {
    "build": cmd_build,
    "split": cmd_split,
    "stats": cmd_stats,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        COMMANDS[args.command](args)
    except CliError as exc:
        log.error("[%s] %s", exc.category, exc)
        return exc.code
    except SourceUnreadable as exc:
        log.error("[input] %s", exc)
        return EXIT_INPUT
    except (MalformedRecord, TargetTooLarge, LengthMismatch, ValueError) as exc:
        log.error("[data] %s", exc)
        return EXIT_DATA
    except OSError as exc:
        log.error("[io] %s", exc)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - last resort
        log.exception("[internal] %s", exc)
        return EXIT_INTERNAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
