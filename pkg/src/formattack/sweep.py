"""Combination sweep engine: enumerate k-transform chains, run the
transform/extract/score pipeline per chain, and rank chains by F1 drop.

Chains are unordered k-subsets of the fourteen sweepable transforms,
realized in canonical registry order (reordering a combination changes
results only negligibly, so one canonical order keeps runs comparable).
Completed chains are cached by content hash of (corpus, chain spec, seed,
extractor), making interrupted sweeps resumable.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .docmodel import Document, dumps_record
from .extract import run_extractor
from .metrics import CorpusScore, RobustnessReport, build_report, score_corpus
from .transforms import SWEEP_NAMES, TransformSpec, apply_chain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepPlan:
    """Everything a sweep needs: combination size, per-transform parameter
    overrides, the corpus/extractor references, and the global seed."""

    k: int
    seed: int = 0
    params: Mapping[str, Mapping] = field(default_factory=dict)
    corpus: str | None = None
    extractor: str = "baseline"
    fields_ref: str = "invoice"
    top_n: int = 10
    cache_dir: str | None = None
    case_insensitive: bool = False
    n_jobs: int = 1

    def base_specs(self) -> list[TransformSpec]:
        unknown = set(self.params) - set(SWEEP_NAMES)
        if unknown:
            raise ValueError(f"params for non-sweepable or unknown transforms: {sorted(unknown)}")
        return [
            TransformSpec(name, dict(self.params.get(name, {})), self.seed)
            for name in SWEEP_NAMES
        ]


def enumerate_chains(plan: SweepPlan) -> list[tuple[TransformSpec, ...]]:
    """All C(14, k) chains in lexicographic registry order."""
    if not 1 <= plan.k <= len(SWEEP_NAMES):
        raise ValueError(f"k must be in [1, {len(SWEEP_NAMES)}], got {plan.k}")
    return list(itertools.combinations(plan.base_specs(), plan.k))


def chain_name(specs: Sequence[TransformSpec]) -> str:
    return "+".join(s.name for s in specs)


def _corpus_fingerprint(docs: Sequence[Document]) -> str:
    h = hashlib.sha256()
    for doc in docs:
        h.update(dumps_record(doc).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def _chain_key(
    corpus_hash: str, specs: Sequence[TransformSpec], seed: int, extractor_id: str
) -> str:
    payload = json.dumps(
        {
            "corpus": corpus_hash,
            "chain": [s.as_dict() for s in specs],
            "seed": seed,
            "extractor": extractor_id,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def run_sweep(
    plan: SweepPlan,
    docs: Sequence[Document],
    extractor,
    fields: Sequence[str],
    extractor_id: str = "",
) -> RobustnessReport:
    """Transform, extract, and score every chain; returns the ranked report.

    ``extractor`` must expose ``extract(doc) -> ExtractionResult``. With
    ``plan.n_jobs > 1`` chains run on a thread pool (only safe for pure
    extractors such as the baseline); results merge in chain order either
    way, so reports are byte-identical across runs.
    """
    chains = enumerate_chains(plan)
    cache = _Cache(plan.cache_dir)
    corpus_hash = _corpus_fingerprint(docs)

    original = score_corpus(run_extractor(docs, extractor), docs, fields, plan.case_insensitive)

    def scored(specs: tuple[TransformSpec, ...]) -> CorpusScore:
        key = _chain_key(corpus_hash, specs, plan.seed, extractor_id)
        hit = cache.get(key)
        if hit is not None:
            logger.info("sweep: %s (cached)", chain_name(specs))
            return hit
        started = time.monotonic()
        transformed = [apply_chain(doc, specs) for doc in docs]
        score = score_corpus(
            run_extractor(transformed, extractor), transformed, fields, plan.case_insensitive
        )
        cache.put(key, score)
        logger.info(
            "sweep: %s macro_f1=%.4f (%.2fs)",
            chain_name(specs), score.macro_f1, time.monotonic() - started,
        )
        return score

    if plan.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=plan.n_jobs) as pool:
            scores = list(pool.map(scored, chains))
    else:
        scores = [scored(specs) for specs in chains]

    transformed_scores = {chain_name(specs): score for specs, score in zip(chains, scores)}
    chain_specs = {chain_name(specs): [s.as_dict() for s in specs] for specs in chains}
    return build_report(
        original, transformed_scores, fields, chain_specs=chain_specs, seed=plan.seed
    )


class _Cache:
    """Completed-chain score cache: one JSON file per chain key."""

    def __init__(self, cache_dir: str | None):
        self.dir = Path(cache_dir) if cache_dir else None
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    def get(self, key: str) -> CorpusScore | None:
        if not self.dir:
            return None
        path = self.dir / f"{key}.json"
        if not path.exists():
            return None
        return CorpusScore.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def put(self, key: str, score: CorpusScore) -> None:
        if not self.dir:
            return
        path = self.dir / f"{key}.json"
        # key order matters: per_field must reload in configured field order
        path.write_text(json.dumps(score.to_dict()), encoding="utf-8")
