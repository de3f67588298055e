"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them inline)."""

from __future__ import annotations

import random
import re
import statistics
import time
from collections import Counter
from contextlib import contextmanager

import pytest
from scipy import stats as scipy_stats

from formattack.docmodel import Document
from formattack.extract import (
    BaselineExtractor,
    ExtractionResult,
    postprocess,
    run_extractor,
)
from formattack.metrics import score_corpus
from formattack.sweep import SweepPlan, enumerate_chains, run_sweep
from formattack.synth import (
    invoice_field_configs,
    receipt_field_configs,
    synth_corpus,
)
from formattack.transforms import (
    INVOICE_VTA_POLICIES,
    REGISTRY_ORDER,
    TransformSpec,
    apply_spec,
)
from formattack.typedgen import MONTH_NAMES, derive_rng, gen_date, gen_money, gen_number, parse_money

from helpers import grid_documents, random_document

ACCEPTANCE_SEED = 20260810


@contextmanager
def criterion(name: str, budget_s: float):
    started = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL")
        raise
    elapsed = time.monotonic() - started
    if elapsed > budget_s:
        print(f"\nACCEPTANCE {name}: FAIL (took {elapsed:.1f}s > {budget_s}s)")
        pytest.fail(f"{name} exceeded its {budget_s}s budget: {elapsed:.1f}s")
    print(f"\nACCEPTANCE {name}: PASS ({elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# 1. combination counts
# ---------------------------------------------------------------------------

def test_combination_counts():
    with criterion("combination-counts", budget_s=1.0):
        assert len(enumerate_chains(SweepPlan(k=2))) == 91
        assert len(enumerate_chains(SweepPlan(k=3))) == 364


# ---------------------------------------------------------------------------
# 2. invariant suite over >= 1000 generated documents
# ---------------------------------------------------------------------------

LOCATION_ONLY = {"center_shift", "box_stretch", "margin_pad",
                 "value_location_augment", "value_location_augment_star"}
ORDER_ONLY = {"global_shuffle", "neighbor_shuffle", "non_neighbor_shuffle"}
TEXT_ONLY = {"bg_typo", "bg_synonyms", "bg_adversarial", "value_text_augment"}
DROPS = {"bg_drop", "neighbor_bg_drop", "key_drop"}
BG_TRANSFORMS = {"bg_drop", "neighbor_bg_drop", "bg_typo", "bg_synonyms", "bg_adversarial"}


def _invariant_corpus() -> list[Document]:
    rng = random.Random(ACCEPTANCE_SEED)
    docs = [random_document(rng, doc_id=f"prop-{i:04d}") for i in range(700)]
    docs += synth_corpus("invoice", 150, seed=ACCEPTANCE_SEED)
    docs += synth_corpus("receipt", 150, seed=ACCEPTANCE_SEED + 1)
    return docs


def _check_invariants(doc: Document, out: Document, name: str) -> None:
    for ann in out.annotations:
        joined = " ".join(out.words[i].text for i in ann.value_indices)
        assert joined == ann.value_text, f"{name}: annotation out of sync"
    if name in LOCATION_ONLY:
        assert Counter(w.text for w in out.words) == Counter(w.text for w in doc.words)
    if name in ORDER_ONLY:
        assert Counter((w.text, w.box) for w in out.words) == Counter(
            (w.text, w.box) for w in doc.words
        )
    if name in TEXT_ONLY:
        assert [w.box for w in out.words] == [w.box for w in doc.words]
    if name in DROPS:
        pos = 0
        originals = [(w.text, w.box) for w in doc.words]
        for item in ((w.text, w.box) for w in out.words):
            while pos < len(originals) and originals[pos] != item:
                pos += 1
            assert pos < len(originals), f"{name}: output is not a subsequence"
            pos += 1
    if name in BG_TRANSFORMS:
        before = {
            (ann.field, k): doc.words[i]
            for ann in doc.annotations
            for k, i in enumerate(ann.value_indices)
        }
        for ann in out.annotations:
            for k, i in enumerate(ann.value_indices):
                assert out.words[i].text == before[(ann.field, k)].text
                if name not in DROPS:
                    assert out.words[i].box == before[(ann.field, k)].box


def test_invariant_suite():
    with criterion("invariant-suite", budget_s=120.0):
        docs = _invariant_corpus()
        assert len(docs) >= 1000
        sample = docs[:: len(docs) // 120]
        for name in REGISTRY_ORDER:
            spec = TransformSpec(name, {}, ACCEPTANCE_SEED)
            outputs = {}
            for doc in docs:
                out = apply_spec(doc, spec)
                _check_invariants(doc, out, name)
                outputs[doc.doc_id] = out
            # determinism: fixed seed, and corpus order must not matter
            reshuffled = list(sample)
            random.Random(1).shuffle(reshuffled)
            for doc in reshuffled:
                assert apply_spec(doc, spec) == outputs[doc.doc_id], name


# ---------------------------------------------------------------------------
# 3. statistical parameters on a 10,000-word corpus
# ---------------------------------------------------------------------------

def test_statistical_parameters():
    with criterion("statistical-parameters", budget_s=120.0):
        docs = grid_documents(20, 500, seed=ACCEPTANCE_SEED)
        total_words = sum(len(d.words) for d in docs)
        assert total_words == 10_000

        band = 3.0 * (0.1 * 0.9 / total_words) ** 0.5
        for name, counter in (
            ("bg_drop", lambda d, o: len(d.words) - len(o.words)),
            ("bg_typo", lambda d, o: sum(a.text != b.text for a, b in zip(d.words, o.words))),
            ("bg_adversarial",
             lambda d, o: sum(a.text != b.text for a, b in zip(d.words, o.words))),
        ):
            spec = TransformSpec(name, {}, ACCEPTANCE_SEED)
            changed = sum(counter(d, apply_spec(d, spec)) for d in docs)
            fraction = changed / total_words
            assert abs(fraction - 0.1) <= band, f"{name}: {fraction:.4f} outside 0.1 +/- {band:.4f}"

        shift_spec = TransformSpec("center_shift", {}, ACCEPTANCE_SEED)
        dx, dy = [], []
        for doc in docs:
            out = apply_spec(doc, shift_spec)
            for wb, wa in zip(doc.words, out.words):
                dx.append((wa.box.center[0] - wb.box.center[0]) / wb.box.width)
                dy.append((wa.box.center[1] - wb.box.center[1]) / wb.box.height)
        for ratios in (dx, dy):
            std = statistics.pstdev(ratios)
            assert abs(std - 0.5) <= 0.025, f"center_shift std {std:.4f} outside 0.5 +/- 5%"

        stretch_spec = TransformSpec("box_stretch", {}, ACCEPTANCE_SEED)
        dx1, dy1 = [], []
        for doc in docs:
            out = apply_spec(doc, stretch_spec)
            for wb, wa in zip(doc.words, out.words):
                dx1.append((wa.box.x1 - wb.box.x1) / wb.box.width)
                dy1.append((wa.box.y1 - wb.box.y1) / wb.box.height)
        for ratios in (dx1, dy1):
            std = statistics.pstdev(ratios)
            assert abs(std - 0.1) <= 0.005, f"box_stretch std {std:.4f} outside 0.1 +/- 5%"


# ---------------------------------------------------------------------------
# 4. typed-generator oracles, 10,000 samples each
# ---------------------------------------------------------------------------

DATE_PATTERNS = {
    "mm/dd/yy": re.compile(r"^(\d{2})/(\d{2})/(\d{2})$"),
    "yy-mm-dd": re.compile(r"^(\d{2})-(\d{2})-(\d{2})$"),
    "dd/monthname/yy": re.compile(r"^(\d{2})/([A-Z][a-z]{2,8})/(\d{2})$"),
}


def _parse_date(text: str) -> tuple[int, int, int]:
    import calendar

    months = {name: i + 1 for i, name in enumerate(MONTH_NAMES)}
    months.update({name[:3]: i + 1 for i, name in enumerate(MONTH_NAMES)})
    if m := DATE_PATTERNS["yy-mm-dd"].match(text):
        y, mo, d = 2000 + int(m.group(1)), int(m.group(2)), int(m.group(3))
    elif m := DATE_PATTERNS["dd/monthname/yy"].match(text):
        assert m.group(2) in months, text
        y, mo, d = 2000 + int(m.group(3)), months[m.group(2)], int(m.group(1))
    else:
        m = DATE_PATTERNS["mm/dd/yy"].match(text)
        assert m, f"unknown date format: {text!r}"
        y, mo, d = 2000 + int(m.group(3)), int(m.group(1)), int(m.group(2))
    assert 1 <= d <= calendar.monthrange(y, mo)[1], text
    return y, mo, d


MONEY_RE = re.compile(r"^\$?\d{1,3}(,\d{3})*\.\d{2}$")


def test_typed_generator_oracles():
    with criterion("typed-generator-oracles", budget_s=60.0):
        rng = derive_rng(ACCEPTANCE_SEED, "dates")
        for _ in range(10_000):
            year, _, _ = _parse_date(gen_date(rng))
            assert 2001 <= year <= 2021

        rng = derive_rng(ACCEPTANCE_SEED, "numbers")
        lengths = Counter(len(gen_number(rng)) for _ in range(10_000))
        assert set(lengths) == set(range(3, 13))
        observed = [lengths[k] for k in range(3, 13)]
        result = scipy_stats.chisquare(observed)
        assert result.pvalue > 0.001, f"length uniformity p={result.pvalue:.5f}"

        rng = derive_rng(ACCEPTANCE_SEED, "money")
        from formattack.typedgen import format_money
        for _ in range(10_000):
            text = gen_money(rng)
            assert MONEY_RE.match(text), text
            cents = parse_money(text)
            assert cents is not None and 1 <= cents <= 10_000_000
            assert format_money(cents, dollar_sign=text.startswith("$")) == text


# ---------------------------------------------------------------------------
# 5. metric oracle vs brute force
# ---------------------------------------------------------------------------

def _brute_force_counts(pairs, fields):
    def norm(s):
        return " ".join(s.split())

    counts = {f: [0, 0, 0] for f in fields}
    for pred, truth in pairs:
        for f in fields:
            p = pred.get(f)
            t = truth.get(f)
            p = norm(p) if p is not None else None
            t = norm(t) if t is not None else None
            if p is None and t is None:
                continue
            if p is None:
                counts[f][2] += 1
            elif t is None:
                counts[f][1] += 1
            elif p == t:
                counts[f][0] += 1
            else:
                counts[f][1] += 1
                counts[f][2] += 1
    return counts


def test_metric_oracle():
    with criterion("metric-oracle", budget_s=30.0):
        rng = random.Random(ACCEPTANCE_SEED)
        truths, preds, pairs = [], [], []
        for i in range(100):
            doc = random_document(rng, doc_id=f"metric-{i}")
            truths.append(doc)
            values = {}
            for ann in doc.annotations:
                roll = rng.random()
                if roll < 0.4:
                    values[ann.field] = ann.value_text
                elif roll < 0.7:
                    values[ann.field] = "wrong-" + str(rng.randrange(100))
            if rng.random() < 0.3:
                values["field_9"] = "spurious"
            preds.append(ExtractionResult(doc_id=doc.doc_id, values=dict(values)))
            pairs.append((values, {a.field: a.value_text for a in doc.annotations}))

        fields = [f"field_{k}" for k in range(4)] + ["field_9"]
        score = score_corpus(preds, truths, fields)
        expected = _brute_force_counts(pairs, fields)
        for f in fields:
            got = score.per_field[f]
            assert (got.tp, got.fp, got.fn) == tuple(expected[f]), f


# ---------------------------------------------------------------------------
# 6. post-processing oracle vs brute force
# ---------------------------------------------------------------------------

def _brute_force_postprocess(scores, doc, fields, theta):
    n = len(doc.words)
    widths = [w.box.width / len(w.text) for w in doc.words if w.text]
    char_w = statistics.median(widths) if widths else 0.0

    def argmax(row):
        return max(range(len(row)), key=lambda c: (row[c], -c))

    predicted = [argmax(scores[i]) for i in range(n)]
    out = {}
    for c, fc in enumerate(fields):
        if not fc.multi_word:
            best = None
            for i in range(n):
                if predicted[i] == c and (best is None or scores[i][c] > scores[best][c]):
                    best = i
            if best is not None and scores[best][c] > theta:
                out[fc.name] = doc.words[best].text
            continue
        kept = [i for i in range(n) if predicted[i] == c and scores[i][c] > theta]
        if not kept:
            continue
        groups = []
        for i in kept:
            if groups:
                j = groups[-1][-1]
                a, b = doc.words[j].box, doc.words[i].box
                linked = i == j + 1 or (
                    min(a.y2, b.y2) - max(a.y1, b.y1) > 0.0
                    and max(a.x1, b.x1) - min(a.x2, b.x2) < char_w
                )
            else:
                linked = False
            if linked:
                groups[-1].append(i)
            else:
                groups.append([i])
        anchor = max(kept, key=lambda i: (scores[i][c], -i))
        group = next(g for g in groups if anchor in g)
        out[fc.name] = " ".join(doc.words[i].text for i in group)
    return out


def test_postprocess_oracle():
    with criterion("postprocess-oracle", budget_s=60.0):
        rng = random.Random(ACCEPTANCE_SEED + 2)
        docs = synth_corpus("invoice", 50, seed=5) + synth_corpus("receipt", 50, seed=6)
        configs = {"invoice": invoice_field_configs(), "receipt": receipt_field_configs()}
        for doc in docs:
            fields = configs[doc.doc_id.split("-")[0]]
            m = len(fields)
            scores = [[rng.random() for _ in range(m + 1)] for _ in doc.words]
            got = postprocess(scores, doc, fields, threshold=0.1)
            expected = _brute_force_postprocess(scores, doc, fields, theta=0.1)
            assert got.values == expected, doc.doc_id


# ---------------------------------------------------------------------------
# 7. directional robustness with the baseline extractor
# ---------------------------------------------------------------------------

def test_directional_robustness():
    with criterion("directional-robustness", budget_s=300.0):
        docs = synth_corpus("invoice", 200, seed=ACCEPTANCE_SEED)
        fields = invoice_field_configs()
        names = [f.name for f in fields]
        extractor = BaselineExtractor(fields)

        def macro(target_docs):
            return score_corpus(run_extractor(target_docs, extractor), target_docs, names).macro_f1

        clean = macro(docs)
        assert clean >= 0.95, f"clean macro F1 {clean:.4f} below fixture design target"

        for name in ("key_drop", "neighbor_bg_drop"):
            spec = TransformSpec(name, {}, ACCEPTANCE_SEED)
            attacked = macro([apply_spec(d, spec) for d in docs])
            assert clean - attacked >= 0.3, f"{name}: drop {clean - attacked:.4f} < 0.3"

        vta = TransformSpec(
            "value_text_augment", {"policies": dict(INVOICE_VTA_POLICIES)}, ACCEPTANCE_SEED
        )
        augmented = macro([apply_spec(d, vta) for d in docs])
        assert abs(augmented - clean) <= 0.05, f"VTA moved F1 by {augmented - clean:.4f}"


# ---------------------------------------------------------------------------
# 8. full k=2 sweep: complete, fast, byte-identical
# ---------------------------------------------------------------------------

def test_full_k2_sweep_deterministic():
    with criterion("k2-sweep-deterministic", budget_s=600.0):
        docs = synth_corpus("invoice", 50, seed=ACCEPTANCE_SEED)
        fields = invoice_field_configs()
        names = [f.name for f in fields]
        plan = SweepPlan(k=2, seed=ACCEPTANCE_SEED)

        first = run_sweep(plan, docs, BaselineExtractor(fields), names)
        second = run_sweep(plan, docs, BaselineExtractor(fields), names)
        assert len(first.chains) == 91
        assert first.to_json().encode() == second.to_json().encode()
        assert first.to_table().encode() == second.to_table().encode()
