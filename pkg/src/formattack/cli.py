"""Command-line entry point: synthesize corpora, apply transform chains,
evaluate extractors, and run combination sweeps.

Exit codes: 0 success, 1 usage error, 2 corpus validation error,
3 extractor failure(s) (the run completes and the report records which
documents failed).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from .docmodel import CorpusError, Document, load_corpus, write_corpus
from .extract import (
    BaselineConfig,
    FieldConfig,
    WorkerError,
    make_extractor,
    run_extractor,
)
from .metrics import score_corpus
from .sweep import SweepPlan, run_sweep
from .synth import field_configs, synth_corpus
from .transforms import (
    INVOICE_VTA_POLICIES,
    TransformSpec,
    apply_spec,
    chain_from_config,
)

logger = logging.getLogger(__name__)

USAGE_EXIT = 1
VALIDATION_EXIT = 2
EXTRACTOR_EXIT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="formattack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--template", choices=("invoice", "receipt"), required=True)
    p.add_argument("-n", "--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("transform", help="apply a transform chain to a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--chain", required=True,
                   help="chain config file, or comma-separated transform names")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--paper-defaults", action="store_true",
                   help="use the reference invoice policies for value_text_augment")

    p = sub.add_parser("evaluate", help="run an extractor and score a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--extractor", default="baseline",
                   help="baseline | truth | worker:<command line>")
    p.add_argument("--fields", default="invoice",
                   help="fields config file, or builtin template name")
    p.add_argument("--out", help="write the score report JSON here")
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--case-insensitive", action="store_true")

    p = sub.add_parser("sweep", help="exhaustive k-transform combination sweep")
    p.add_argument("--plan", help="sweep plan config file")
    p.add_argument("--corpus")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--extractor")
    p.add_argument("--fields")
    p.add_argument("--top", type=int)
    p.add_argument("--cache-dir")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int)
    p.add_argument("--paper-defaults", action="store_true")

    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _load_yaml(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        obj = yaml.safe_load(fh)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a mapping at top level")
    return obj


def load_fields_config(ref: str) -> tuple[list[FieldConfig], BaselineConfig, float]:
    """Builtin template name, or a YAML file with fields/baseline/threshold."""
    if ref in ("invoice", "receipt"):
        return field_configs(ref), BaselineConfig(), 0.1
    obj = _load_yaml(ref)
    fields = []
    for entry in obj.get("fields", []):
        fields.append(
            FieldConfig(
                name=entry["name"],
                data_type=entry["data_type"],
                multi_word=bool(entry.get("multi_word", False)),
                key_lexicon=tuple(entry.get("keys", ())),
            )
        )
    if not fields:
        raise ValueError(f"{ref}: no fields configured")
    baseline = BaselineConfig(**obj.get("baseline", {}))
    return fields, baseline, float(obj.get("threshold", 0.1))


def load_chain(ref: str, seed: int, paper_defaults: bool = False) -> list[TransformSpec]:
    if Path(ref).exists():
        obj = _load_yaml(ref)
        specs = chain_from_config(obj.get("transforms", []), default_seed=seed)
    else:
        specs = [TransformSpec(name.strip(), {}, seed) for name in ref.split(",") if name.strip()]
    if paper_defaults:
        specs = [
            TransformSpec(s.name, {"policies": dict(INVOICE_VTA_POLICIES)}, s.seed)
            if s.name == "value_text_augment" and not s.params.get("policies")
            else s
            for s in specs
        ]
    return specs


def cmd_synth(args) -> int:
    docs = synth_corpus(args.template, args.count, args.seed)
    write_corpus(docs, args.out)
    print(f"wrote {len(docs)} {args.template} documents to {args.out}")
    return 0


def _summarize(before: Document, after: Document) -> dict:
    summary = {"dropped": max(0, len(before.words) - len(after.words)),
               "text_changed": 0, "box_moved": 0}
    if len(before.words) == len(after.words):
        for wb, wa in zip(before.words, after.words):
            summary["text_changed"] += wb.text != wa.text
            summary["box_moved"] += wb.box != wa.box
    return summary


def cmd_transform(args) -> int:
    docs = load_corpus(args.corpus)
    specs = load_chain(args.chain, args.seed, args.paper_defaults)
    totals = [{"dropped": 0, "text_changed": 0, "box_moved": 0} for _ in specs]
    out_docs = []
    for doc in docs:
        for i, spec in enumerate(specs):
            after = apply_spec(doc, spec)
            for key, value in _summarize(doc, after).items():
                totals[i][key] += value
            doc = after
        out_docs.append(doc)
    write_corpus(out_docs, args.out)
    for spec, total in zip(specs, totals):
        print(
            f"{spec.name}: dropped={total['dropped']} "
            f"text_changed={total['text_changed']} box_moved={total['box_moved']}"
        )
    print(f"wrote {len(out_docs)} documents to {args.out}")
    return 0


def _print_score(score) -> None:
    for name, fs in score.per_field.items():
        print(f"{name}: p={fs.precision:.4f} r={fs.recall:.4f} f1={fs.f1:.4f} "
              f"(tp={fs.tp} fp={fs.fp} fn={fs.fn})")
    print(f"macro: p={score.macro_precision:.4f} r={score.macro_recall:.4f} "
          f"f1={score.macro_f1:.4f} documents={score.documents} "
          f"failed={score.documents_failed}")


def cmd_evaluate(args) -> int:
    docs = load_corpus(args.corpus)
    fields, baseline_cfg, threshold = load_fields_config(args.fields)
    if args.threshold is not None:
        threshold = args.threshold
    extractor = make_extractor(
        args.extractor, fields, baseline_cfg, threshold, timeout=args.timeout
    )
    try:
        preds = run_extractor(docs, extractor)
    finally:
        extractor.close()
    score = score_corpus(preds, docs, [f.name for f in fields], args.case_insensitive)
    _print_score(score)
    if args.out:
        payload = {"corpus": args.corpus, "extractor": args.extractor, "score": score.to_dict()}
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"wrote report to {args.out}")
    return EXTRACTOR_EXIT if score.documents_failed else 0


def cmd_sweep(args) -> int:
    plan_obj = _load_yaml(args.plan) if args.plan else {}
    def pick(flag, key, default):
        return flag if flag is not None else plan_obj.get(key, default)

    corpus = pick(args.corpus, "corpus", None)
    if not corpus:
        raise ValueError("sweep needs --corpus or a plan with 'corpus'")
    params = dict(plan_obj.get("params", {}))
    if args.paper_defaults and "value_text_augment" not in params:
        params["value_text_augment"] = {"policies": dict(INVOICE_VTA_POLICIES)}
    selector = pick(args.extractor, "extractor", "baseline")
    n_jobs = int(pick(args.jobs, "jobs", 1))
    if selector.startswith("worker:") and n_jobs != 1:
        logger.info("worker extractors serve requests serially; forcing --jobs 1")
        n_jobs = 1
    plan = SweepPlan(
        k=int(pick(args.k, "k", 2)),
        seed=int(pick(args.seed, "seed", 0)),
        params=params,
        corpus=corpus,
        extractor=selector,
        fields_ref=pick(args.fields, "fields", "invoice"),
        top_n=int(pick(args.top, "top", 10)),
        cache_dir=pick(args.cache_dir, "cache_dir", None),
        n_jobs=n_jobs,
    )
    docs = load_corpus(corpus)
    fields, baseline_cfg, threshold = load_fields_config(plan.fields_ref)
    extractor = make_extractor(plan.extractor, fields, baseline_cfg, threshold)
    try:
        report = run_sweep(
            plan, docs, extractor, [f.name for f in fields], extractor_id=plan.extractor
        )
    finally:
        extractor.close()
    report.save(args.out)
    table_path = Path(args.out).with_suffix(".tsv")
    table_path.write_text(report.to_table(), encoding="utf-8")
    print(f"wrote report to {args.out} and table to {table_path}")
    print(f"top {plan.top_n} chains by F1 drop:")
    for result in report.top(plan.top_n):
        print(f"  {result.delta_f1:+.4f}  {result.chain}")
    failures = report.original.documents_failed + sum(
        c.score.documents_failed for c in report.chains
    )
    return EXTRACTOR_EXIT if failures else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "synth": cmd_synth,
        "transform": cmd_transform,
        "evaluate": cmd_evaluate,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except CorpusError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT
    except WorkerError as exc:
        print(f"extractor error: {exc}", file=sys.stderr)
        return EXTRACTOR_EXIT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
