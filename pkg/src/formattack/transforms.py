"""The form attack transformations: deterministic Document -> Document
rewrites that keep annotations synchronized with the words they index.

Fifteen transforms are registered (fourteen sweepable ones plus the
receipt-specific ``value_location_augment_star``). Each runs on a derived
RNG substream mixed from (seed, transform name, doc_id), so transforming a
corpus in any order yields identical per-document results.

Transform classes and their preserved quantities:

* location-only (center_shift, box_stretch, margin_pad,
  value_location_augment, value_location_augment_star): word text multiset
  unchanged;
* order-only (global/neighbor/non_neighbor shuffle): multiset of
  (text, box) pairs unchanged;
* text-only (bg_typo, bg_synonyms, bg_adversarial, value_text_augment):
  boxes and reading order unchanged;
* drop (bg_drop, neighbor_bg_drop, key_drop): output words are a
  subsequence of the input words.

No transform ever alters a value word's text or box except
value_text_augment (which rewrites value_text in lockstep) and the two
location augments (which move boxes, never texts).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from . import typedgen
from .docmodel import BoundingBox, Document, FieldAnnotation
from .geometry import ExpandMode, OverlapMetric, union_neighbors
from .typedgen import SynonymLexicon, derive_rng

logger = logging.getLogger(__name__)

# Eligibility of non-value words for the background transforms: "non_value"
# treats key words as background (the default), "background" spares them.
ELIGIBLE_CHOICES = ("non_value", "background")

ADVERSARIAL_DATA_TYPES = ("date", "number", "money")


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _eligible_indices(doc: Document, eligible: str) -> list[int]:
    if eligible not in ELIGIBLE_CHOICES:
        raise ValueError(f"eligible must be one of {ELIGIBLE_CHOICES}, got {eligible!r}")
    values = doc.value_index_set()
    banned = values | doc.key_index_set() if eligible == "background" else values
    return [i for i in range(len(doc.words)) if i not in banned]


def _reorder(doc: Document, order: Sequence[int]) -> Document:
    """Rebuild the document with words[order[j]] at position j, remapping
    every annotation index through the permutation."""
    inv = {old: new for new, old in enumerate(order)}
    words = tuple(doc.words[i] for i in order)
    anns = tuple(
        replace(
            a,
            key_indices=tuple(inv[i] for i in a.key_indices),
            value_indices=tuple(inv[i] for i in a.value_indices),
        )
        for a in doc.annotations
    )
    return replace(doc, words=words, annotations=anns)


def _drop_indices(doc: Document, dropped: set[int]) -> Document:
    """Remove the given word positions (never value words) and recompact."""
    keep = [i for i in range(len(doc.words)) if i not in dropped]
    remap = {old: new for new, old in enumerate(keep)}
    words = tuple(doc.words[i] for i in keep)
    anns = tuple(
        replace(
            a,
            key_indices=tuple(remap[i] for i in a.key_indices if i in remap),
            value_indices=tuple(remap[i] for i in a.value_indices),
        )
        for a in doc.annotations
    )
    return replace(doc, words=words, annotations=anns)


def _translate_clamped(lo: float, hi: float, t: float, bound: float) -> tuple[float, float]:
    """Translate the interval [lo, hi] by t, clamping into [0, bound] by
    translation; interval length is preserved to float rounding."""
    t = max(t, -lo)
    t = min(t, bound - hi)
    lo2, hi2 = lo + t, hi + t
    if hi2 > bound:
        lo2 -= hi2 - bound
        hi2 = bound
    if lo2 < 0.0:
        hi2 = min(bound, hi2 - lo2)
        lo2 = 0.0
    return lo2, hi2


def _rewrite_texts(doc: Document, new_texts: Mapping[int, str]) -> Document:
    words = tuple(
        replace(w, text=new_texts[i]) if i in new_texts else w for i, w in enumerate(doc.words)
    )
    return replace(doc, words=words)


# ---------------------------------------------------------------------------
# OCR location and order rearrangement
# ---------------------------------------------------------------------------

def center_shift(doc: Document, shift_std: float, rng: random.Random) -> Document:
    """Shift each box's center by N(0, shift_std) of its own width/height
    per axis; size preserved, result clamped into the page by translation."""
    words = []
    for w in doc.words:
        b = w.box
        dx = rng.gauss(0.0, shift_std) * b.width
        dy = rng.gauss(0.0, shift_std) * b.height
        x1, x2 = _translate_clamped(b.x1, b.x2, dx, doc.page_width)
        y1, y2 = _translate_clamped(b.y1, b.y2, dy, doc.page_height)
        words.append(replace(w, box=BoundingBox(x1, y1, x2, y2)))
    return replace(doc, words=tuple(words))


def box_stretch(doc: Document, stretch_std: float, rng: random.Random) -> Document:
    """Perturb all four coordinates by N(0, stretch_std) of the box's
    width/height, re-ordering inverted coordinates and clamping to the page."""
    words = []
    for w in doc.words:
        b = w.box
        x1 = b.x1 + rng.gauss(0.0, stretch_std) * b.width
        x2 = b.x2 + rng.gauss(0.0, stretch_std) * b.width
        y1 = b.y1 + rng.gauss(0.0, stretch_std) * b.height
        y2 = b.y2 + rng.gauss(0.0, stretch_std) * b.height
        if x1 > x2:
            x1, x2 = x2, x1
        if y1 > y2:
            y1, y2 = y2, y1
        box = BoundingBox(
            min(max(0.0, x1), doc.page_width),
            min(max(0.0, y1), doc.page_height),
            min(max(0.0, x2), doc.page_width),
            min(max(0.0, y2), doc.page_height),
        )
        words.append(replace(w, box=box))
    return replace(doc, words=tuple(words))


def margin_pad(doc: Document, max_margin_ratio: float, rng: random.Random) -> Document:
    """Pad white margins on all four sides, each uniform in [1, ratio * page
    dimension]; words translate, the page grows, nothing else changes."""
    def margin(dim: float) -> float:
        lo, hi = 1.0, max_margin_ratio * dim
        if hi < lo:
            lo, hi = hi, lo
        return rng.uniform(lo, hi)

    m_left = margin(doc.page_width)
    m_right = margin(doc.page_width)
    m_top = margin(doc.page_height)
    m_bottom = margin(doc.page_height)
    words = tuple(replace(w, box=w.box.translated(m_left, m_top)) for w in doc.words)
    return replace(
        doc,
        words=words,
        page_width=doc.page_width + m_left + m_right,
        page_height=doc.page_height + m_top + m_bottom,
    )


def global_shuffle(doc: Document, rng: random.Random) -> Document:
    """Uniformly permute the reading order; words and boxes untouched."""
    order = list(range(len(doc.words)))
    rng.shuffle(order)
    return _reorder(doc, order)


def _shuffle_positions(doc: Document, positions: Iterable[int], rng: random.Random) -> Document:
    spots = sorted(positions)
    sources = spots[:]
    rng.shuffle(sources)
    order = list(range(len(doc.words)))
    for spot, src in zip(spots, sources):
        order[spot] = src
    return _reorder(doc, order)


def neighbor_shuffle(
    doc: Document,
    expand_rate: float,
    extra_order_neighbors: int,
    rng: random.Random,
    metric: OverlapMetric = "iou",
    expand_mode: ExpandMode = "page_relative",
) -> Document:
    """Shuffle only the reading-order positions of value neighbors; values
    and non-neighbors stay put."""
    nb = union_neighbors(doc, expand_rate, extra_order_neighbors, metric, expand_mode)
    return _shuffle_positions(doc, nb, rng)


def non_neighbor_shuffle(
    doc: Document,
    expand_rate: float,
    extra_order_neighbors: int,
    rng: random.Random,
    metric: OverlapMetric = "iou",
    expand_mode: ExpandMode = "page_relative",
) -> Document:
    """Shuffle only positions of words that are neither values nor neighbors."""
    nb = union_neighbors(doc, expand_rate, extra_order_neighbors, metric, expand_mode)
    keep = nb | doc.value_index_set()
    rest = [i for i in range(len(doc.words)) if i not in keep]
    return _shuffle_positions(doc, rest, rng)


# ---------------------------------------------------------------------------
# background manipulation
# ---------------------------------------------------------------------------

def bg_drop(
    doc: Document, drop_prob: float, rng: random.Random, eligible: str = "non_value"
) -> Document:
    """Drop each eligible word independently with probability drop_prob."""
    dropped = {i for i in _eligible_indices(doc, eligible) if rng.random() < drop_prob}
    return _drop_indices(doc, dropped)


def neighbor_bg_drop(
    doc: Document,
    expand_rate: float,
    extra_order_neighbors: int,
    metric: OverlapMetric = "iou",
    expand_mode: ExpandMode = "page_relative",
) -> Document:
    """Deterministically drop every non-value word in the union neighbor
    set; keys are removed when they are neighbors."""
    nb = union_neighbors(doc, expand_rate, extra_order_neighbors, metric, expand_mode)
    return _drop_indices(doc, set(nb))


def key_drop(doc: Document) -> Document:
    """Remove all key words; annotations keep empty key_indices, values stay."""
    dropped = set(doc.key_index_set() - doc.value_index_set())
    return _drop_indices(doc, dropped)


def bg_typo(
    doc: Document, typo_prob: float, rng: random.Random, eligible: str = "non_value"
) -> Document:
    """Rewrite each eligible word with one character-level typo at
    probability typo_prob; geometry and order untouched."""
    edits: dict[int, str] = {}
    for i in _eligible_indices(doc, eligible):
        if rng.random() < typo_prob:
            edits[i] = typedgen.apply_typo(doc.words[i].text, rng)
    return _rewrite_texts(doc, edits)


def bg_synonyms(
    doc: Document,
    synonym_prob: float,
    lexicon: SynonymLexicon,
    rng: random.Random,
    eligible: str = "non_value",
) -> Document:
    """Replace each eligible word with a synonym at probability synonym_prob;
    words without lexicon entries are selected but left unchanged."""
    edits: dict[int, str] = {}
    for i in _eligible_indices(doc, eligible):
        if rng.random() < synonym_prob:
            swapped = typedgen.synonym(doc.words[i].text, lexicon, rng)
            if swapped is not None:
                edits[i] = swapped
    return _rewrite_texts(doc, edits)


def bg_adversarial(
    doc: Document,
    replace_prob: float,
    expand_rate: float,
    extra_order_neighbors: int,
    rng: random.Random,
    eligible: str = "non_value",
    metric: OverlapMetric = "iou",
    expand_mode: ExpandMode = "page_relative",
) -> Document:
    """Replace eligible words at probability replace_prob with a random
    typed value (date, number, or money, drawn uniformly). Value neighbors
    are never replaced; boxes are unchanged."""
    nb = union_neighbors(doc, expand_rate, extra_order_neighbors, metric, expand_mode)
    edits: dict[int, str] = {}
    for i in _eligible_indices(doc, eligible):
        if i in nb:
            continue
        if rng.random() < replace_prob:
            data_type = rng.choice(ADVERSARIAL_DATA_TYPES)
            edits[i] = _generate_typed(data_type, rng)
    return _rewrite_texts(doc, edits)


def _generate_typed(data_type: str, rng: random.Random, token_count: int = 1) -> str:
    if data_type == "date":
        return typedgen.gen_date(rng)
    if data_type == "number":
        return typedgen.gen_number(rng)
    if data_type == "money":
        return typedgen.gen_money(rng)
    return typedgen.gen_words(rng, token_count)


# ---------------------------------------------------------------------------
# field-value augmentation
# ---------------------------------------------------------------------------

# Per-field value_text_augment policies, as found in config files:
#   "replace_typed" (default), "skip", or
#   {"derived_percent": {"base_field": ..., "lo": 0.0, "hi": 0.15}}.
VtaPolicy = str | Mapping[str, Mapping[str, object]]

# The invoice policy used for the headline experiments: totals are kept
# (they encode arithmetic), tax is re-derived as 0-15% of the total.
INVOICE_VTA_POLICIES: dict[str, VtaPolicy] = {
    "total_amount": "skip",
    "amount_due": "skip",
    "total_tax": {"derived_percent": {"base_field": "total_amount", "lo": 0.0, "hi": 0.15}},
}

# Receipt counterpart: the total is kept for the same reason.
RECEIPT_VTA_POLICIES: dict[str, VtaPolicy] = {"total": "skip"}


def _parse_policy(policy: VtaPolicy) -> tuple:
    if policy == "replace_typed":
        return ("replace_typed",)
    if policy == "skip":
        return ("skip",)
    if isinstance(policy, Mapping) and set(policy) == {"derived_percent"}:
        spec = policy["derived_percent"]
        return ("derived_percent", str(spec["base_field"]), float(spec["lo"]), float(spec["hi"]))
    raise ValueError(f"unknown value_text_augment policy: {policy!r}")


def _numeric_value(text: str) -> float | None:
    cents = typedgen.parse_money(text)
    if cents is not None:
        return cents / 100.0
    try:
        return float(text.replace(",", ""))
    except ValueError:
        return None


def value_text_augment(
    doc: Document, policies: Mapping[str, VtaPolicy], rng: random.Random
) -> Document:
    """Replace field values with fresh same-data-type values.

    A replacement is tokenized on spaces and applied only when the token
    count matches the original value word count (free-text generation always
    matches; typed generators yield one token). ``derived_percent`` fields
    are processed after the others so their base field is final; the derived
    amount is floored to whole cents, keeping it within the lo-hi fraction.
    """
    parsed = {name: _parse_policy(p) for name, p in policies.items()}
    new_words = list(doc.words)
    new_anns = list(doc.annotations)
    derived: list[int] = []

    def rewrite(slot: int, ann: FieldAnnotation, text: str) -> None:
        tokens = text.split(" ")
        if len(tokens) != len(ann.value_indices):
            return
        for idx, tok in zip(ann.value_indices, tokens):
            new_words[idx] = replace(new_words[idx], text=tok)
        new_anns[slot] = replace(ann, value_text=text)

    for slot, ann in enumerate(new_anns):
        policy = parsed.get(ann.field, ("replace_typed",))
        if policy[0] == "skip":
            continue
        if policy[0] == "derived_percent":
            derived.append(slot)
            continue
        rewrite(slot, ann, _generate_typed(ann.data_type, rng, len(ann.value_indices)))

    for slot in derived:
        ann = new_anns[slot]
        _, base_field, lo, hi = parsed[ann.field]
        base = next((a for a in new_anns if a.field == base_field), None)
        base_value = _numeric_value(base.value_text) if base is not None else None
        if base_value is None:
            logger.warning(
                "value_text_augment: %s: base field %r missing or non-numeric; skipped",
                doc.doc_id, base_field,
            )
            continue
        amount = rng.uniform(lo, hi) * base_value
        text = typedgen.format_money(int(amount * 100), dollar_sign=rng.random() < 0.5)
        rewrite(slot, ann, text)

    return replace(doc, words=tuple(new_words), annotations=tuple(new_anns))


def value_location_augment(doc: Document, rng: random.Random) -> Document:
    """Exchange key/value box locations between fields of matching shape.

    Fields are grouped by (key word count, value word count); within each
    group of two or more a uniformly random derangement moves the i-th
    key/value word box of one field to another. Texts, annotation indices,
    and reading order never change.
    """
    groups: dict[tuple[int, int], list[int]] = {}
    for slot, ann in enumerate(doc.annotations):
        groups.setdefault((len(ann.key_indices), len(ann.value_indices)), []).append(slot)

    new_boxes = {i: w.box for i, w in enumerate(doc.words)}
    for shape in sorted(groups):
        members = groups[shape]
        if len(members) < 2:
            continue
        perm = _derangement(len(members), rng)
        for pos, src_pos in enumerate(perm):
            dst = doc.annotations[members[pos]]
            src = doc.annotations[members[src_pos]]
            for d_idx, s_idx in zip(dst.key_indices, src.key_indices):
                new_boxes[d_idx] = doc.words[s_idx].box
            for d_idx, s_idx in zip(dst.value_indices, src.value_indices):
                new_boxes[d_idx] = doc.words[s_idx].box
    words = tuple(replace(w, box=new_boxes[i]) for i, w in enumerate(doc.words))
    return replace(doc, words=words)


def _derangement(n: int, rng: random.Random) -> list[int]:
    """Uniform random permutation of range(n) with no fixed point."""
    while True:
        perm = list(range(n))
        rng.shuffle(perm)
        if all(p != i for i, p in enumerate(perm)):
            return perm


def value_location_augment_star(
    doc: Document, fields: Sequence[str], rng: random.Random | None = None
) -> Document:
    """Move the named fields' values to the page bottom and close the gap.

    A field moves only when its value words own their horizontal line bands
    exclusively; otherwise it is skipped and reported. The band(s) are
    removed, everything below shifts up by the removed height, and the value
    words reappear below the lowest remaining word with their within-line
    layout intact. Moved values go to the end of the reading order.
    """
    for name in fields:
        doc = _move_value_to_bottom(doc, name)
    return doc


def _move_value_to_bottom(doc: Document, field_name: str) -> Document:
    ann = doc.annotation_for(field_name)
    if ann is None:
        logger.warning("value_location_augment_star: %s: no field %r", doc.doc_id, field_name)
        return doc
    moved = set(ann.value_indices)

    bands: list[list[float]] = []
    for y1, y2 in sorted((doc.words[i].box.y1, doc.words[i].box.y2) for i in moved):
        if bands and y1 <= bands[-1][1]:
            bands[-1][1] = max(bands[-1][1], y2)
        else:
            bands.append([y1, y2])

    for i, w in enumerate(doc.words):
        if i in moved:
            continue
        for lo, hi in bands:
            if w.box.y1 < hi and w.box.y2 > lo:
                logger.warning(
                    "value_location_augment_star: %s: field %r shares a line band "
                    "with other words; skipped",
                    doc.doc_id, field_name,
                )
                return doc

    remaining = [i for i in range(len(doc.words)) if i not in moved]
    new_box: dict[int, BoundingBox] = {}
    lowest = 0.0
    for i in remaining:
        b = doc.words[i].box
        shift = sum(hi - lo for lo, hi in bands if hi <= b.y1)
        new_box[i] = b.translated(0.0, -shift)
        lowest = max(lowest, new_box[i].y2)

    # Splice gap: reuse the original spacing between the last band and the
    # first word below it, falling back to 2% of the page height.
    last_hi = bands[-1][1]
    below = [doc.words[i].box.y1 for i in remaining if doc.words[i].box.y1 >= last_hi]
    gap = min(below) - last_hi if below else 0.02 * doc.page_height

    block_top = min(lo for lo, _ in bands)
    block_bottom = max(hi for _, hi in bands)
    delta = (lowest + gap) - block_top
    if block_bottom + delta > doc.page_height:
        delta = doc.page_height - block_bottom
    for i in moved:
        b = doc.words[i].box.translated(0.0, delta)
        y1, y2 = _translate_clamped(b.y1, b.y2, 0.0, doc.page_height)
        new_box[i] = BoundingBox(b.x1, y1, b.x2, y2)

    order = remaining + list(ann.value_indices)
    inv = {old: new for new, old in enumerate(order)}
    words = tuple(replace(doc.words[i], box=new_box[i]) for i in order)
    anns = tuple(
        replace(
            a,
            key_indices=tuple(inv[i] for i in a.key_indices),
            value_indices=tuple(inv[i] for i in a.value_indices),
        )
        for a in doc.annotations
    )
    return replace(doc, words=words, annotations=anns)


# ---------------------------------------------------------------------------
# registry, specs, chains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransformDef:
    name: str
    apply: Callable[[Document, Mapping[str, object], random.Random], Document]
    defaults: dict
    sweepable: bool = True


@lru_cache(maxsize=8)
def _lexicon_for(path: str | None) -> SynonymLexicon:
    if path is None:
        return typedgen.default_lexicon()
    return SynonymLexicon.from_file(path)


def _registry() -> dict[str, TransformDef]:
    defs = [
        TransformDef(
            "center_shift",
            lambda d, p, r: center_shift(d, p["shift_std"], r),
            {"shift_std": 0.5},
        ),
        TransformDef(
            "box_stretch",
            lambda d, p, r: box_stretch(d, p["stretch_std"], r),
            {"stretch_std": 0.1},
        ),
        TransformDef(
            "margin_pad",
            lambda d, p, r: margin_pad(d, p["max_margin_ratio"], r),
            {"max_margin_ratio": 0.3},
        ),
        TransformDef("global_shuffle", lambda d, p, r: global_shuffle(d, r), {}),
        TransformDef(
            "neighbor_shuffle",
            lambda d, p, r: neighbor_shuffle(
                d, p["expand_rate"], p["extra_order_neighbors"], r
            ),
            {"expand_rate": 0.02, "extra_order_neighbors": 2},
        ),
        TransformDef(
            "non_neighbor_shuffle",
            lambda d, p, r: non_neighbor_shuffle(
                d, p["expand_rate"], p["extra_order_neighbors"], r
            ),
            {"expand_rate": 0.02, "extra_order_neighbors": 2},
        ),
        TransformDef(
            "bg_drop",
            lambda d, p, r: bg_drop(d, p["drop_prob"], r, p["eligible"]),
            {"drop_prob": 0.1, "eligible": "non_value"},
        ),
        TransformDef(
            "neighbor_bg_drop",
            lambda d, p, r: neighbor_bg_drop(d, p["expand_rate"], p["extra_order_neighbors"]),
            {"expand_rate": 0.02, "extra_order_neighbors": 2},
        ),
        TransformDef("key_drop", lambda d, p, r: key_drop(d), {}),
        TransformDef(
            "bg_typo",
            lambda d, p, r: bg_typo(d, p["typo_prob"], r, p["eligible"]),
            {"typo_prob": 0.1, "eligible": "non_value"},
        ),
        TransformDef(
            "bg_synonyms",
            lambda d, p, r: bg_synonyms(
                d, p["synonym_prob"], _lexicon_for(p["lexicon_path"]), r, p["eligible"]
            ),
            {"synonym_prob": 0.1, "lexicon_path": None, "eligible": "non_value"},
        ),
        TransformDef(
            "bg_adversarial",
            lambda d, p, r: bg_adversarial(
                d, p["replace_prob"], p["expand_rate"], p["extra_order_neighbors"], r,
                p["eligible"],
            ),
            {
                "replace_prob": 0.1,
                "expand_rate": 0.02,
                "extra_order_neighbors": 2,
                "eligible": "non_value",
            },
        ),
        TransformDef(
            "value_text_augment",
            lambda d, p, r: value_text_augment(d, p["policies"], r),
            {"policies": {}},
        ),
        TransformDef(
            "value_location_augment",
            lambda d, p, r: value_location_augment(d, r),
            {},
        ),
        TransformDef(
            "value_location_augment_star",
            lambda d, p, r: value_location_augment_star(d, p["fields"], r),
            {"fields": ("company", "address")},
            sweepable=False,
        ),
    ]
    return {t.name: t for t in defs}


REGISTRY: dict[str, TransformDef] = _registry()

# Canonical order for chains and sweeps = registry insertion order.
REGISTRY_ORDER: tuple[str, ...] = tuple(REGISTRY)
SWEEP_NAMES: tuple[str, ...] = tuple(t.name for t in REGISTRY.values() if t.sweepable)


class UnknownTransformError(ValueError):
    pass


@dataclass(frozen=True)
class TransformSpec:
    """A named transformation with parameters and a seed, composable into
    chains. Unknown names or parameter keys are rejected; missing parameters
    fall back to the registry defaults."""

    name: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.name not in REGISTRY:
            raise UnknownTransformError(
                f"unknown transform {self.name!r}; known: {', '.join(REGISTRY_ORDER)}"
            )
        defaults = REGISTRY[self.name].defaults
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(f"{self.name}: unknown parameters {sorted(unknown)}")
        merged = {**defaults, **dict(self.params)}
        object.__setattr__(self, "params", merged)

    def as_dict(self) -> dict:
        return {"name": self.name, "params": _plain(self.params), "seed": self.seed}


def _plain(value):
    if isinstance(value, Mapping):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def apply_spec(doc: Document, spec: TransformSpec) -> Document:
    rng = derive_rng(spec.seed, spec.name, doc.doc_id)
    return REGISTRY[spec.name].apply(doc, spec.params, rng)


def apply_chain(doc: Document, specs: Sequence[TransformSpec]) -> Document:
    """Apply specs left to right, each on its own derived substream."""
    for spec in specs:
        doc = apply_spec(doc, spec)
    return doc


def chain_from_config(entries: Sequence[Mapping], default_seed: int = 0) -> list[TransformSpec]:
    """Build a chain from config records of {name, params?, seed?}."""
    specs = []
    for entry in entries:
        unknown = set(entry) - {"name", "params", "seed"}
        if unknown:
            raise ValueError(f"chain entry has unknown keys {sorted(unknown)}")
        specs.append(
            TransformSpec(
                name=entry["name"],
                params=dict(entry.get("params") or {}),
                seed=int(entry.get("seed", default_seed)),
            )
        )
    return specs
