"""Exact-match precision/recall/F1 scoring and robustness report assembly.

A prediction counts as a true positive only when its whole string equals
the ground-truth value after whitespace normalization (case-sensitive by
default). A present-but-wrong prediction counts as both a false positive
and a false negative, the standard bookkeeping for single-slot fields.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .docmodel import Document
from .extract import ExtractionResult

_WS = re.compile(r"\s+")


def normalize_text(text: str, case_insensitive: bool = False) -> str:
    out = _WS.sub(" ", text).strip()
    return out.lower() if case_insensitive else out


@dataclass(frozen=True)
class FieldScore:
    field: str
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, field_name: str, tp: int, fp: int, fn: int) -> "FieldScore":
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(field_name, tp, fp, fn, precision, recall, f1)

    def to_dict(self) -> dict:
        return {
            "field": self.field, "tp": self.tp, "fp": self.fp, "fn": self.fn,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "FieldScore":
        return cls(obj["field"], obj["tp"], obj["fp"], obj["fn"],
                   obj["precision"], obj["recall"], obj["f1"])


@dataclass(frozen=True)
class CorpusScore:
    """Per-field and macro scores for one corpus/extractor run."""

    per_field: dict[str, FieldScore]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    documents: int
    documents_failed: int = 0
    failed_doc_ids: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "per_field": {name: s.to_dict() for name, s in self.per_field.items()},
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "documents": self.documents,
            "documents_failed": self.documents_failed,
            "failed_doc_ids": list(self.failed_doc_ids),
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "CorpusScore":
        return cls(
            per_field={k: FieldScore.from_dict(v) for k, v in obj["per_field"].items()},
            macro_precision=obj["macro_precision"],
            macro_recall=obj["macro_recall"],
            macro_f1=obj["macro_f1"],
            documents=obj["documents"],
            documents_failed=obj["documents_failed"],
            failed_doc_ids=tuple(obj["failed_doc_ids"]),
        )


def score_corpus(
    preds: Sequence[ExtractionResult],
    truths: Sequence[Document],
    fields: Sequence[str],
    case_insensitive: bool = False,
) -> CorpusScore:
    """Exact-match scores over aligned prediction/truth pairs.

    Failed extraction results contribute no predictions (their truth fields
    all count as false negatives) and are tallied in documents_failed.
    """
    if len(preds) != len(truths):
        raise ValueError(f"{len(preds)} predictions vs {len(truths)} documents")
    counts = {name: [0, 0, 0] for name in fields}  # tp, fp, fn
    failed = []
    for pred, doc in zip(preds, truths):
        if pred.doc_id != doc.doc_id:
            raise ValueError(f"doc_id mismatch: prediction {pred.doc_id!r} vs {doc.doc_id!r}")
        if pred.error is not None:
            failed.append(doc.doc_id)
        truth_values = {a.field: a.value_text for a in doc.annotations}
        for name in fields:
            truth = truth_values.get(name)
            predicted = None if pred.error is not None else pred.values.get(name)
            if predicted is not None:
                predicted = normalize_text(predicted, case_insensitive) or None
            if truth is not None:
                truth = normalize_text(truth, case_insensitive)
            c = counts[name]
            if predicted is None and truth is None:
                continue
            if predicted is None:
                c[2] += 1
            elif truth is None:
                c[1] += 1
            elif predicted == truth:
                c[0] += 1
            else:
                c[1] += 1
                c[2] += 1
    per_field = {
        name: FieldScore.from_counts(name, *counts[name]) for name in fields
    }
    return CorpusScore(
        per_field=per_field,
        macro_precision=_mean([s.precision for s in per_field.values()]),
        macro_recall=_mean([s.recall for s in per_field.values()]),
        macro_f1=_mean([s.f1 for s in per_field.values()]),
        documents=len(truths),
        documents_failed=len(failed),
        failed_doc_ids=tuple(failed),
    )


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


@dataclass(frozen=True)
class ChainResult:
    """One transform chain's scores and its macro-F1 delta vs the original."""

    chain: str
    specs: tuple[dict, ...]
    score: CorpusScore
    delta_f1: float

    def to_dict(self) -> dict:
        return {
            "chain": self.chain,
            "specs": [dict(s) for s in self.specs],
            "score": self.score.to_dict(),
            "delta_f1": self.delta_f1,
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "ChainResult":
        return cls(
            chain=obj["chain"],
            specs=tuple(obj["specs"]),
            score=CorpusScore.from_dict(obj["score"]),
            delta_f1=obj["delta_f1"],
        )


@dataclass(frozen=True)
class RobustnessReport:
    """Original vs transformed scores, chains sorted by biggest F1 drop."""

    fields: tuple[str, ...]
    original: CorpusScore
    chains: tuple[ChainResult, ...]
    seed: int | None = None

    def top(self, n: int) -> tuple[ChainResult, ...]:
        return self.chains[:n]

    def to_dict(self) -> dict:
        return {
            "fields": list(self.fields),
            "seed": self.seed,
            "original": self.original.to_dict(),
            "chains": [c.to_dict() for c in self.chains],
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "RobustnessReport":
        return cls(
            fields=tuple(obj["fields"]),
            original=CorpusScore.from_dict(obj["original"]),
            chains=tuple(ChainResult.from_dict(c) for c in obj["chains"]),
            seed=obj["seed"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "RobustnessReport":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RobustnessReport":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_table(self) -> str:
        """Flat TSV: one row per chain plus the original row, ready for
        bar-chart plotting."""
        header = ["chain", *[f"f1:{f}" for f in self.fields],
                  "macro_precision", "macro_recall", "macro_f1", "delta_f1", "documents_failed"]
        rows = [_row("original", self.fields, self.original, 0.0)]
        rows.extend(_row(c.chain, self.fields, c.score, c.delta_f1) for c in self.chains)
        return "\n".join("\t".join(r) for r in [header, *rows]) + "\n"


def _row(name: str, fields: Sequence[str], score: CorpusScore, delta: float) -> list[str]:
    return [
        name,
        *[f"{score.per_field[f].f1:.6f}" if f in score.per_field else "" for f in fields],
        f"{score.macro_precision:.6f}",
        f"{score.macro_recall:.6f}",
        f"{score.macro_f1:.6f}",
        f"{delta:+.6f}",
        str(score.documents_failed),
    ]


def build_report(
    original: CorpusScore,
    transformed: Mapping[str, CorpusScore],
    fields: Sequence[str],
    chain_specs: Mapping[str, Sequence[dict]] | None = None,
    seed: int | None = None,
) -> RobustnessReport:
    """Assemble the report; chains sorted ascending by delta (biggest drop
    first), ties broken by chain name for determinism."""
    chain_specs = chain_specs or {}
    chains = [
        ChainResult(
            chain=name,
            specs=tuple(chain_specs.get(name, ())),
            score=score,
            delta_f1=score.macro_f1 - original.macro_f1,
        )
        for name, score in transformed.items()
    ]
    chains.sort(key=lambda c: (c.delta_f1, c.chain))
    return RobustnessReport(
        fields=tuple(fields), original=original, chains=tuple(chains), seed=seed
    )
